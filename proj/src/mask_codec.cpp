#include "oarpost/mask_codec.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "oarpost/error.hpp"
#include "oarpost/simd.hpp"

namespace oarpost {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ClassRegistry::ClassRegistry(std::vector<ClassInfo> classes) : classes_(std::move(classes)) {
  LabelWord seen_bits = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.name.empty()) throw Error("registry: empty class name");
    if (c.bit >= kLabelWordBits) throw Error("registry: bit index out of range for " + c.name);
    if ((seen_bits & c.code()) != 0) throw Error("registry: duplicate bit for " + c.name);
    seen_bits = static_cast<LabelWord>(seen_bits | c.code());
    for (std::size_t j = 0; j < i; ++j) {
      if (classes_[j].name == c.name) throw Error("registry: duplicate class " + c.name);
    }
  }
  for (const auto& c : classes_) {
    for (const auto& p : c.parents) {
      if (!contains(p)) throw Error("registry: unknown parent " + p + " of " + c.name);
    }
  }
  // Depth-first cycle check over the containment graph.
  std::vector<int> state(classes_.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) throw Error("registry: cyclic containment at " + classes_[i].name);
    state[i] = 1;
    for (const auto& p : classes_[i].parents) {
      const auto it = std::find_if(classes_.begin(), classes_.end(), [&](const ClassInfo& c) { return c.name == p; });
      visit(static_cast<std::size_t>(it - classes_.begin()));
    }
    state[i] = 2;
  };
  for (std::size_t i = 0; i < classes_.size(); ++i) visit(i);
}

std::shared_ptr<const ClassRegistry> ClassRegistry::default_registry() {
  static const auto registry = std::make_shared<const ClassRegistry>(std::vector<ClassInfo>{
      {"eye", 0, true, {}},
      {"lens", 1, true, {"eye"}},
      {"optic_nerve", 2, true, {}},
      {"optic_chiasm", 3, false, {}},
      {"pituitary", 4, false, {}},
      {"hippocampus", 5, true, {}},
      {"brainstem", 6, false, {"brain"}},
      {"brain", 7, false, {}},
  });
  return registry;
}

ClassRegistry ClassRegistry::parse(std::string_view text) {
  std::vector<ClassInfo> classes;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    ClassInfo info;
    std::string bilateral, parents;
    if (!(fields >> info.name >> info.bit >> bilateral >> parents)) {
      throw Error("registry: malformed line " + std::to_string(line_no));
    }
    if (bilateral != "0" && bilateral != "1") {
      throw Error("registry: bilateral flag must be 0 or 1 on line " + std::to_string(line_no));
    }
    info.bilateral = bilateral == "1";
    if (parents != "-") info.parents = split(parents, ',');
    classes.push_back(std::move(info));
  }
  return ClassRegistry(std::move(classes));
}

std::string ClassRegistry::serialize() const {
  std::ostringstream out;
  out << "# name bit bilateral parents\n";
  for (const auto& c : classes_) {
    out << c.name << ' ' << c.bit << ' ' << (c.bilateral ? 1 : 0) << ' ';
    if (c.parents.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < c.parents.size(); ++i) out << (i ? "," : "") << c.parents[i];
    }
    out << '\n';
  }
  return out.str();
}

const ClassInfo* ClassRegistry::find(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ClassInfo& ClassRegistry::at(std::string_view name) const {
  if (const auto* c = find(name)) return *c;
  throw Error("unknown class: " + std::string(name));
}

LabelWord ClassRegistry::valid_bits() const {
  LabelWord bits = 0;
  for (const auto& c : classes_) bits = static_cast<LabelWord>(bits | c.code());
  return bits;
}

MultiLabelMask::MultiLabelMask(const GridGeometry& geometry, RegistryPtr registry)
    : geometry_(geometry), registry_(std::move(registry)), words_(geometry.voxel_count(), 0) {
  geometry_.validate();
  if (!registry_) throw Error("missing class registry");
}

MultiLabelMask::MultiLabelMask(const GridGeometry& geometry, RegistryPtr registry, std::vector<LabelWord> words)
    : geometry_(geometry), registry_(std::move(registry)), words_(std::move(words)) {
  geometry_.validate();
  if (!registry_) throw Error("missing class registry");
  if (words_.size() != geometry_.voxel_count()) throw Error("payload size mismatch");
  const LabelWord invalid = static_cast<LabelWord>(~registry_->valid_bits());
  for (auto w : words_) {
    if ((w & invalid) != 0) throw Error("label word has bits outside the class registry");
  }
}

MultiLabelMask encode(const std::map<std::string, BinaryMask>& masks, RegistryPtr registry) {
  if (!registry) throw Error("missing class registry");
  std::optional<GridGeometry> geometry;
  for (const auto& [name, m] : masks) {
    registry->at(name);
    if (geometry) require_same_grid(*geometry, m.geometry());
    else geometry = m.geometry();
  }
  if (!geometry) throw Error("encode: no masks given");
  MultiLabelMask out(*geometry, registry);
  for (const auto& [name, m] : masks) simd::encode(m.bits(), registry->at(name).code(), out.words());
  return out;
}

BinaryMask decode(const MultiLabelMask& mask, std::string_view class_name) {
  const auto code = mask.registry().at(class_name).code();
  BinaryMask out(mask.geometry());
  simd::decode(mask.words(), code, out.bits());
  return out;
}

std::set<std::string> present_classes(const MultiLabelMask& mask) {
  LabelWord seen = 0;
  for (auto w : mask.words()) seen = static_cast<LabelWord>(seen | w);
  std::set<std::string> out;
  for (const auto& c : mask.registry().classes()) {
    if ((seen & c.code()) != 0) out.insert(c.name);
  }
  return out;
}

void require_compatible(const MultiLabelMask& a, const MultiLabelMask& b) {
  if (!(a.registry() == b.registry())) throw Error("registry mismatch");
  require_same_grid(a.geometry(), b.geometry());
}

}  // namespace oarpost
