#include "oarpost/params.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "oarpost/error.hpp"

namespace oarpost {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("invalid value for " + key + ": '" + text + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second) throw Error("duplicate key: " + key);
  }
  return out;
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  PipelineConfig cfg;
  auto& n = cfg.postprocess.nerve;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "landmark_points") n.landmark_points = parse_number<int>(key, value);
    else if (key == "label_penalty") n.label_penalty = parse_number<double>(key, value);
    else if (key == "distance_weight") n.distance_weight = parse_number<double>(key, value);
    else if (key == "radius_eye") n.radius_eye = parse_number<double>(key, value);
    else if (key == "radius_chiasm") n.radius_chiasm = parse_number<double>(key, value);
    else if (key == "inner_radius") n.inner_radius = parse_number<double>(key, value);
    else if (key == "fat_quantile") n.fat_quantile = parse_number<double>(key, value);
    else if (key == "fat_factor") n.fat_factor = parse_number<double>(key, value);
    else if (key == "fat_box_halfwidth") n.fat_box_halfwidth = parse_number<int>(key, value);
    else if (key == "close_landmark_mm") n.close_landmark_mm = parse_number<double>(key, value);
    else if (key == "min_eye_volume_mm3") cfg.postprocess.min_eye_volume_mm3 = parse_number<double>(key, value);
    else if (key.rfind("corrupt.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string cls = key.substr(8, dot == std::string::npos || dot < 8 ? 0 : dot - 8);
      const std::string field = key.substr(dot + 1);
      if (cls.empty()) throw Error("unknown key: " + key);
      auto& c = cfg.corruption.classes[cls];
      if (field == "hole_rate") c.hole_rate = parse_number<double>(key, value);
      else if (field == "erase_span_fraction") c.erase_span_fraction = parse_number<double>(key, value);
      else if (field == "erase_span_count") c.erase_span_count = parse_number<int>(key, value);
      else if (field == "distractors") c.distractors = parse_number<int>(key, value);
      else if (field == "jitter") c.jitter = parse_number<double>(key, value);
      else throw Error("unknown key: " + key);
    } else {
      throw Error("unknown key: " + key);
    }
  }
  n.validate();
  if (cfg.postprocess.min_eye_volume_mm3 < 0) throw Error("invalid value for min_eye_volume_mm3");
  cfg.corruption.validate();
  return cfg;
}

std::string format_pipeline_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  const auto& n = cfg.postprocess.nerve;
  out << "landmark_points = " << n.landmark_points << '\n'
      << "label_penalty = " << format_double(n.label_penalty) << '\n'
      << "distance_weight = " << format_double(n.distance_weight) << '\n'
      << "radius_eye = " << format_double(n.radius_eye) << '\n'
      << "radius_chiasm = " << format_double(n.radius_chiasm) << '\n'
      << "inner_radius = " << format_double(n.inner_radius) << '\n'
      << "fat_quantile = " << format_double(n.fat_quantile) << '\n'
      << "fat_factor = " << format_double(n.fat_factor) << '\n'
      << "fat_box_halfwidth = " << n.fat_box_halfwidth << '\n'
      << "close_landmark_mm = " << format_double(n.close_landmark_mm) << '\n'
      << "min_eye_volume_mm3 = " << format_double(cfg.postprocess.min_eye_volume_mm3) << '\n';
  for (const auto& [cls, c] : cfg.corruption.classes) {
    const std::string p = "corrupt." + cls + ".";
    out << p << "hole_rate = " << format_double(c.hole_rate) << '\n'
        << p << "erase_span_fraction = " << format_double(c.erase_span_fraction) << '\n'
        << p << "erase_span_count = " << c.erase_span_count << '\n'
        << p << "distractors = " << c.distractors << '\n'
        << p << "jitter = " << format_double(c.jitter) << '\n';
  }
  return out.str();
}

}  // namespace oarpost
