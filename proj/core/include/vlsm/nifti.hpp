#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vlsm/volume.hpp"

namespace vlsm {

/// Single-file NIfTI-1 (.nii, or .nii.gz on read and write), little-endian.
/// Only pixdim and qoffset (or the sform translation when qform_code is 0)
/// are honored; rotations are ignored with a warning.
namespace nifti {

inline constexpr std::int32_t kHeaderSize = 348;
inline constexpr std::int32_t kVoxOffset = 352;

enum class Datatype : std::int16_t { kUint8 = 2, kInt16 = 4, kFloat32 = 16 };

using VoxelData = std::variant<std::vector<std::uint8_t>, std::vector<std::int16_t>, std::vector<float>>;

struct Volume {
  VolumeGeometry geometry;
  VoxelData data;
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
  std::vector<std::string> warnings;

  Datatype datatype() const;
  std::size_t voxel_count() const;
  /// Values with scl_slope/scl_inter applied when the slope is nonzero and not 1.
  std::vector<double> as_double() const;
  /// Any nonzero raw value is lesioned.
  BinaryMask as_mask() const;
};

Volume read(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

/// Throws InputError when the data length does not match the geometry or a
/// dimension exceeds the int16 header field; Error on I/O failure.
void write(const VolumeGeometry& geometry, const VoxelData& data, const std::filesystem::path& path);
/// uint8, datatype 2.
void write(const BinaryMask& mask, const std::filesystem::path& path);
/// float32, datatype 16.
void write_float(const VolumeGeometry& geometry, std::span<const double> values, const std::filesystem::path& path);
/// int16, datatype 4. Throws InputError when a value does not fit.
void write_int16(const VolumeGeometry& geometry, std::span<const std::int32_t> values,
                 const std::filesystem::path& path);

}  // namespace nifti
}  // namespace vlsm
