#include "oarpost/nrrd_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oarpost/error.hpp"

namespace oarpost {
namespace {

std::size_t element_size(ScalarType t) {
  switch (t) {
    case ScalarType::U8: return 1;
    case ScalarType::U16: return 2;
    case ScalarType::I16: return 2;
    case ScalarType::F32: return 4;
  }
  return 0;
}

const char* type_name(ScalarType t) {
  switch (t) {
    case ScalarType::U8: return "unsigned char";
    case ScalarType::U16: return "unsigned short";
    case ScalarType::I16: return "short";
    case ScalarType::F32: return "float";
  }
  return "";
}

ScalarType parse_type(const std::string& v) {
  static const std::pair<const char*, ScalarType> names[] = {
      {"unsigned char", ScalarType::U8},   {"uchar", ScalarType::U8},
      {"uint8", ScalarType::U8},           {"uint8_t", ScalarType::U8},
      {"unsigned short", ScalarType::U16}, {"ushort", ScalarType::U16},
      {"uint16", ScalarType::U16},         {"uint16_t", ScalarType::U16},
      {"unsigned short int", ScalarType::U16},
      {"short", ScalarType::I16},          {"short int", ScalarType::I16},
      {"signed short", ScalarType::I16},   {"int16", ScalarType::I16},
      {"int16_t", ScalarType::I16},        {"float", ScalarType::F32},
  };
  for (const auto& [name, t] : names) {
    if (v == name) return t;
  }
  throw Error("unsupported NRRD field: type '" + v + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_number(const std::string& s, const char* field) {
  double v = 0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) {
    throw Error(std::string("malformed NRRD field: ") + field);
  }
  return v;
}

// "(a,b,c)" -> {a,b,c}
std::array<double, 3> parse_vector(const std::string& token, const char* field) {
  if (token.size() < 2 || token.front() != '(' || token.back() != ')') {
    throw Error(std::string("malformed NRRD field: ") + field);
  }
  std::array<double, 3> out{};
  std::istringstream in(token.substr(1, token.size() - 2));
  std::string part;
  int k = 0;
  while (std::getline(in, part, ',')) {
    if (k >= 3) throw Error(std::string("malformed NRRD field: ") + field);
    out[k++] = parse_number(trim(part), field);
  }
  if (k != 3) throw Error(std::string("malformed NRRD field: ") + field);
  return out;
}

std::vector<std::string> vector_tokens(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  bool inside = false;
  for (char c : v) {
    if (c == '(') inside = true;
    if (inside && c != ' ' && c != '\t') cur.push_back(c);
    if (c == ')') {
      inside = false;
      out.push_back(cur);
      cur.clear();
    }
  }
  return out;
}

std::string gzip_compress(const std::string& raw) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("gzip: deflateInit failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(raw.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("gzip: compression failed");
  out.resize(zs.total_out);
  return out;
}

std::string gzip_decompress(const char* data, std::size_t n) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error("gzip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
  zs.avail_in = static_cast<uInt>(n);
  std::string out;
  char buf[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error("gzip: corrupt payload");
    }
    out.append(buf, sizeof buf - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error("gzip: truncated payload");
    }
  }
  inflateEnd(&zs);
  return out;
}

template <class T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof v);
  }
  return v;
}

template <class T>
void store_le(std::string& out, T v) {
  char b[sizeof v];
  std::memcpy(b, &v, sizeof v);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) std::reverse(b, b + sizeof v);
  out.append(b, sizeof v);
}

struct RawFile {
  NrrdHeader header;
  std::string payload;  // decoded, little endian
};

RawFile read_raw(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  // Header ends at the first empty line.
  std::size_t pos = 0;
  std::size_t header_end = std::string::npos;
  while (pos < bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) break;
    const auto line_len = nl - pos;
    if (line_len == 0 || (line_len == 1 && bytes[pos] == '\r')) {
      header_end = nl + 1;
      break;
    }
    pos = nl + 1;
  }
  if (header_end == std::string::npos) throw Error("malformed NRRD: missing header terminator");
  RawFile out;
  out.header = parse_header(bytes.substr(0, header_end));
  const char* data = bytes.data() + header_end;
  const std::size_t n = bytes.size() - header_end;
  out.payload = out.header.encoding == Encoding::Gzip ? gzip_decompress(data, n) : std::string(data, n);
  const auto expected = static_cast<std::size_t>(out.header.sizes[0] * out.header.sizes[1] * out.header.sizes[2]) *
                        element_size(out.header.type);
  if (out.payload.size() != expected) throw Error("payload size mismatch");
  return out;
}

std::vector<float> payload_as_float(const RawFile& f) {
  const std::size_t n = f.payload.size() / element_size(f.header.type);
  std::vector<float> v(n);
  const char* p = f.payload.data();
  for (std::size_t i = 0; i < n; ++i) {
    switch (f.header.type) {
      case ScalarType::U8: v[i] = static_cast<float>(static_cast<unsigned char>(p[i])); break;
      case ScalarType::U16: v[i] = static_cast<float>(load_le<std::uint16_t>(p + 2 * i)); break;
      case ScalarType::I16: v[i] = static_cast<float>(load_le<std::int16_t>(p + 2 * i)); break;
      case ScalarType::F32: v[i] = load_le<float>(p + 4 * i); break;
    }
  }
  return v;
}

std::string encode_payload(const std::string& raw, Encoding e) {
  return e == Encoding::Gzip ? gzip_compress(raw) : raw;
}

NrrdHeader header_for(const GridGeometry& g, ScalarType t, Encoding e) {
  NrrdHeader h;
  h.sizes = g.sizes;
  h.spacing = g.spacing;
  h.origin = g.origin;
  h.type = t;
  h.encoding = e;
  return h;
}

}  // namespace

std::filesystem::path registry_sidecar_path(const std::filesystem::path& volume_path) {
  auto p = volume_path;
  const auto name = p.filename().string();
  std::string stem = name;
  for (const char* ext : {".nrrd", ".nhdr"}) {
    const std::string e(ext);
    if (stem.size() > e.size() && stem.compare(stem.size() - e.size(), e.size(), e) == 0) {
      stem.resize(stem.size() - e.size());
      break;
    }
  }
  return p.replace_filename(stem + ".classes.txt");
}

std::string format_header(const NrrdHeader& h) {
  std::ostringstream out;
  out << "NRRD0004\n";
  out << "type: " << type_name(h.type) << '\n';
  out << "dimension: 3\n";
  out << "sizes: " << h.sizes[0] << ' ' << h.sizes[1] << ' ' << h.sizes[2] << '\n';
  out << "space: left-posterior-superior\n";
  out << "space directions: (" << format_number(h.spacing[0]) << ",0,0) (0," << format_number(h.spacing[1])
      << ",0) (0,0," << format_number(h.spacing[2]) << ")\n";
  out << "space origin: (" << format_number(h.origin[0]) << ',' << format_number(h.origin[1]) << ','
      << format_number(h.origin[2]) << ")\n";
  out << "endian: little\n";
  out << "encoding: " << (h.encoding == Encoding::Gzip ? "gzip" : "raw") << '\n';
  out << '\n';
  return out.str();
}

NrrdHeader parse_header(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line).rfind("NRRD000", 0) != 0) throw Error("malformed NRRD: bad magic");
  NrrdHeader h;
  bool have_type = false, have_dim = false, have_sizes = false, have_encoding = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) break;
    if (line[0] == '#') continue;
    if (line.find(":=") != std::string::npos) continue;  // key/value pairs carry no geometry
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw Error("malformed NRRD line: " + line);
    const std::string key = line.substr(0, colon);
    const std::string value = trim(line.substr(colon + 2));
    if (key == "type") {
      h.type = parse_type(value);
      have_type = true;
    } else if (key == "dimension") {
      if (value != "3") throw Error("unsupported NRRD field: dimension " + value);
      have_dim = true;
    } else if (key == "sizes") {
      std::istringstream s(value);
      for (auto& v : h.sizes) {
        if (!(s >> v) || v < 1) throw Error("malformed NRRD field: sizes");
      }
      std::string extra;
      if (s >> extra) throw Error("malformed NRRD field: sizes");
      have_sizes = true;
    } else if (key == "space directions") {
      const auto tokens = vector_tokens(value);
      if (tokens.size() != 3) throw Error("malformed NRRD field: space directions");
      for (int a = 0; a < 3; ++a) {
        const auto d = parse_vector(tokens[static_cast<std::size_t>(a)], "space directions");
        for (int b = 0; b < 3; ++b) {
          if (a != b && d[static_cast<std::size_t>(b)] != 0.0) {
            throw Error("unsupported NRRD field: space directions (non-diagonal)");
          }
        }
        if (!(d[static_cast<std::size_t>(a)] > 0.0)) {
          throw Error("unsupported NRRD field: space directions (non-positive spacing)");
        }
        h.spacing[static_cast<std::size_t>(a)] = d[static_cast<std::size_t>(a)];
      }
    } else if (key == "spacings") {
      std::istringstream s(value);
      for (auto& v : h.spacing) {
        std::string tok;
        if (!(s >> tok)) throw Error("malformed NRRD field: spacings");
        v = parse_number(tok, "spacings");
        if (!(v > 0.0)) throw Error("unsupported NRRD field: spacings (non-positive)");
      }
    } else if (key == "space origin") {
      const auto tokens = vector_tokens(value);
      if (tokens.size() != 1) throw Error("malformed NRRD field: space origin");
      h.origin = parse_vector(tokens[0], "space origin");
    } else if (key == "endian") {
      if (value != "little") throw Error("unsupported NRRD field: endian " + value);
    } else if (key == "encoding") {
      if (value == "raw") h.encoding = Encoding::Raw;
      else if (value == "gzip" || value == "gz") h.encoding = Encoding::Gzip;
      else throw Error("unsupported NRRD field: encoding " + value);
      have_encoding = true;
    } else if (key == "space" || key == "space dimension" || key == "kinds" || key == "content" ||
               key == "space units" || key == "labels" || key == "units" || key == "measurement frame") {
      continue;
    } else {
      throw Error("unsupported NRRD field: " + key);
    }
  }
  if (!have_type) throw Error("malformed NRRD: missing field type");
  if (!have_dim) throw Error("malformed NRRD: missing field dimension");
  if (!have_sizes) throw Error("malformed NRRD: missing field sizes");
  if (!have_encoding) throw Error("malformed NRRD: missing field encoding");
  return h;
}

VolumeData read_volume(const std::filesystem::path& path) {
  const RawFile f = read_raw(path);
  const auto geometry = f.header.geometry();
  const auto sidecar = registry_sidecar_path(path);
  if (f.header.type == ScalarType::U16 && std::filesystem::exists(sidecar)) {
    auto registry = std::make_shared<const ClassRegistry>(ClassRegistry::parse(read_file(sidecar)));
    std::vector<LabelWord> words(geometry.voxel_count());
    for (std::size_t i = 0; i < words.size(); ++i) words[i] = load_le<std::uint16_t>(f.payload.data() + 2 * i);
    return MultiLabelMask(geometry, std::move(registry), std::move(words));
  }
  return Volume3D(geometry, payload_as_float(f));
}

Volume3D read_scalar_volume(const std::filesystem::path& path) {
  const RawFile f = read_raw(path);
  return Volume3D(f.header.geometry(), payload_as_float(f));
}

MultiLabelMask read_label_mask(const std::filesystem::path& path) {
  auto data = read_volume(path);
  if (auto* m = std::get_if<MultiLabelMask>(&data)) return std::move(*m);
  throw Error("not a label mask (needs unsigned short payload and " +
              registry_sidecar_path(path).filename().string() + ")");
}

BinaryMask read_binary_mask(const std::filesystem::path& path) {
  const Volume3D v = read_scalar_volume(path);
  std::vector<std::uint8_t> bits(v.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = v[i] != 0.0F ? 1 : 0;
  return BinaryMask(v.geometry(), std::move(bits));
}

void write_volume(const Volume3D& volume, const std::filesystem::path& path, ScalarType type, Encoding encoding) {
  std::string raw;
  raw.reserve(volume.size() * element_size(type));
  auto check_integral = [](float v, double lo, double hi) {
    if (v != std::floor(v) || v < lo || v > hi) throw Error("value not representable in the requested NRRD type");
  };
  for (float v : volume.values()) {
    switch (type) {
      case ScalarType::U8:
        check_integral(v, 0, 255);
        raw.push_back(static_cast<char>(static_cast<unsigned char>(v)));
        break;
      case ScalarType::U16:
        check_integral(v, 0, 65535);
        store_le(raw, static_cast<std::uint16_t>(v));
        break;
      case ScalarType::I16:
        check_integral(v, -32768, 32767);
        store_le(raw, static_cast<std::int16_t>(v));
        break;
      case ScalarType::F32: store_le(raw, v); break;
    }
  }
  write_file_atomic(path, format_header(header_for(volume.geometry(), type, encoding)) + encode_payload(raw, encoding));
}

void write_volume(const MultiLabelMask& mask, const std::filesystem::path& path, Encoding encoding) {
  std::string raw;
  raw.reserve(mask.size() * 2);
  for (auto w : mask.words()) store_le(raw, w);
  write_file_atomic(registry_sidecar_path(path), mask.registry().serialize());
  write_file_atomic(path, format_header(header_for(mask.geometry(), ScalarType::U16, encoding)) + encode_payload(raw, encoding));
}

void write_volume(const BinaryMask& mask, const std::filesystem::path& path, Encoding encoding) {
  std::string raw(mask.bits().begin(), mask.bits().end());
  write_file_atomic(path, format_header(header_for(mask.geometry(), ScalarType::U8, encoding)) + encode_payload(raw, encoding));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move into place: " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oarpost
