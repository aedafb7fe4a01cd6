#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "oarpost/mask_codec.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

enum class ScalarType { U8, U16, I16, F32 };
enum class Encoding { Raw, Gzip };

/// The supported subset of NRRD: 3D, little endian, diagonal directions.
struct NrrdHeader {
  int dimension = 3;
  Sizes3 sizes{1, 1, 1};
  ScalarType type = ScalarType::F32;
  Encoding encoding = Encoding::Raw;
  Spacing3 spacing{1.0, 1.0, 1.0};
  Spacing3 origin{0.0, 0.0, 0.0};

  GridGeometry geometry() const { return {sizes, spacing, origin}; }
};

using VolumeData = std::variant<Volume3D, MultiLabelMask>;

/// "<stem>.classes.txt" next to the volume.
std::filesystem::path registry_sidecar_path(const std::filesystem::path& volume_path);

std::string format_header(const NrrdHeader& header);
/// Parses the text before the blank separator line.
NrrdHeader parse_header(const std::string& text);

/// A u16 payload with a registry sidecar yields a MultiLabelMask; anything
/// else a Volume3D. Throws Error naming the offending field, or
/// "payload size mismatch".
VolumeData read_volume(const std::filesystem::path& path);
Volume3D read_scalar_volume(const std::filesystem::path& path);
MultiLabelMask read_label_mask(const std::filesystem::path& path);
/// Nonzero voxels become set.
BinaryMask read_binary_mask(const std::filesystem::path& path);

/// Written to a temporary file and renamed into place. Integer types
/// require integral values in range; Error otherwise.
void write_volume(const Volume3D& volume, const std::filesystem::path& path,
                  ScalarType type = ScalarType::F32, Encoding encoding = Encoding::Raw);
/// u16 words plus the registry sidecar.
void write_volume(const MultiLabelMask& mask, const std::filesystem::path& path,
                  Encoding encoding = Encoding::Raw);
/// u8 0/1.
void write_volume(const BinaryMask& mask, const std::filesystem::path& path,
                  Encoding encoding = Encoding::Raw);

/// Writes `contents` via temp file + rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace oarpost
