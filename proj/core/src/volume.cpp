#include "vlsm/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "vlsm/error.hpp"

namespace vlsm {

VolumeGeometry::VolumeGeometry(std::array<std::int32_t, 3> d, std::array<double, 3> s, std::array<double, 3> o)
    : dims(d), spacing(s), origin(o) {
  for (int axis = 0; axis < 3; ++axis) {
    if (dims[axis] < 1) {
      throw InputError("geometry: dim[" + std::to_string(axis + 1) + "] = " + std::to_string(dims[axis]) +
                       " must be >= 1");
    }
    if (!(spacing[axis] > 0.0) || !std::isfinite(spacing[axis])) {
      throw InputError("geometry: pixdim[" + std::to_string(axis + 1) + "] = " + std::to_string(spacing[axis]) +
                       " must be > 0");
    }
  }
}

std::array<std::int32_t, 3> VolumeGeometry::coords(std::size_t i) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  return {static_cast<std::int32_t>(i % nx), static_cast<std::int32_t>((i / nx) % ny),
          static_cast<std::int32_t>(i / (nx * ny))};
}

bool VolumeGeometry::compatible(const VolumeGeometry& other) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (dims[axis] != other.dims[axis]) return false;
    if (std::abs(spacing[axis] - other.spacing[axis]) > kTolerance) return false;
    if (std::abs(origin[axis] - other.origin[axis]) > kTolerance) return false;
  }
  return true;
}

std::string VolumeGeometry::describe() const {
  std::ostringstream out;
  out << dims[0] << "x" << dims[1] << "x" << dims[2] << " @ (" << spacing[0] << "," << spacing[1] << ","
      << spacing[2] << ") mm, origin (" << origin[0] << "," << origin[1] << "," << origin[2] << ")";
  return out.str();
}

void require_compatible(const VolumeGeometry& a, const VolumeGeometry& b, const std::string& what) {
  if (!a.compatible(b)) {
    throw InputError(what + ": incompatible geometries " + a.describe() + " vs " + b.describe());
  }
}

BinaryMask::BinaryMask(VolumeGeometry geometry) : geometry_(geometry), voxels_(geometry.voxel_count(), 0) {}

BinaryMask::BinaryMask(VolumeGeometry geometry, std::vector<std::uint8_t> voxels)
    : geometry_(geometry), voxels_(std::move(voxels)) {
  if (voxels_.size() != geometry_.voxel_count()) {
    throw InputError("mask: " + std::to_string(voxels_.size()) + " voxels for geometry " + geometry_.describe());
  }
  for (auto& v : voxels_) v = v != 0 ? 1 : 0;
}

std::size_t BinaryMask::size() const {
  return static_cast<std::size_t>(std::count(voxels_.begin(), voxels_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> BinaryMask::true_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < voxels_.size(); ++i) {
    if (voxels_[i]) out.push_back(i);
  }
  return out;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_compatible(a.geometry(), b.geometry(), "mask_and");
  BinaryMask out(a.geometry());
  for (std::size_t i = 0; i < a.voxel_count(); ++i) out.set(i, a[i] && b[i]);
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_compatible(a.geometry(), b.geometry(), "mask_or");
  BinaryMask out(a.geometry());
  for (std::size_t i = 0; i < a.voxel_count(); ++i) out.set(i, a[i] || b[i]);
  return out;
}

std::size_t intersection_size(const BinaryMask& a, const BinaryMask& b) {
  require_compatible(a.geometry(), b.geometry(), "intersection");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.voxel_count(); ++i) n += (a[i] && b[i]) ? 1 : 0;
  return n;
}

bool is_subset(const BinaryMask& inner, const BinaryMask& outer) {
  require_compatible(inner.geometry(), outer.geometry(), "subset");
  for (std::size_t i = 0; i < inner.voxel_count(); ++i) {
    if (inner[i] && !outer[i]) return false;
  }
  return true;
}

Cohort::Cohort(std::vector<Subject> subjects, std::vector<double> scores)
    : subjects_(std::move(subjects)), scores_(std::move(scores)) {
  if (subjects_.size() < 2) {
    throw InputError("cohort: need at least 2 subjects, got " + std::to_string(subjects_.size()));
  }
  if (scores_.size() != subjects_.size()) {
    throw InputError("cohort: " + std::to_string(scores_.size()) + " scores for " +
                     std::to_string(subjects_.size()) + " subjects");
  }
  std::unordered_set<std::string> ids;
  for (const auto& s : subjects_) {
    if (!ids.insert(s.id).second) throw InputError("cohort: duplicate subject id '" + s.id + "'");
    require_compatible(subjects_.front().mask.geometry(), s.mask.geometry(), "cohort subject '" + s.id + "'");
  }
}

Cohort Cohort::with_scores(std::vector<double> scores) const { return Cohort(subjects_, std::move(scores)); }

CountMap overlap_map(const Cohort& cohort) {
  CountMap map{cohort.geometry(), std::vector<std::int32_t>(cohort.geometry().voxel_count(), 0)};
  for (const auto& subject : cohort.subjects()) {
    require_compatible(map.geometry, subject.mask.geometry(), "overlap_map");
    const auto voxels = subject.mask.voxels();
    for (std::size_t i = 0; i < voxels.size(); ++i) map.counts[i] += voxels[i];
  }
  return map;
}

double percent_damage(const BinaryMask& mask, const BinaryMask& roi) {
  require_compatible(mask.geometry(), roi.geometry(), "percent_damage");
  const std::size_t roi_size = roi.size();
  if (roi_size == 0) throw InputError("percent_damage: empty ROI");
  return static_cast<double>(intersection_size(mask, roi)) / static_cast<double>(roi_size);
}

}  // namespace vlsm
