#pragma once

#include <map>
#include <string>
#include <string_view>

#include "oarpost/anatomy.hpp"
#include "oarpost/phantom.hpp"

namespace oarpost {

/// Flat "key = value" document; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);

/// Known keys: landmark_points, label_penalty, distance_weight,
/// radius_eye, radius_chiasm, inner_radius, fat_quantile, fat_factor,
/// fat_box_halfwidth, close_landmark_mm, min_eye_volume_mm3 and
/// corrupt.<class>.{hole_rate,erase_span_fraction,erase_span_count,
/// distractors,jitter}. Unknown keys throw Error.
struct PipelineConfig {
  PostprocessParams postprocess;
  CorruptionSpec corruption = CorruptionSpec::standard();
};

PipelineConfig parse_pipeline_config(std::string_view text);
std::string format_pipeline_config(const PipelineConfig& config);

}  // namespace oarpost
