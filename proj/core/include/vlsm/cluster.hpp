#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vlsm/volume.hpp"

namespace vlsm {

/// Face-6, edge-18 or corner-26 adjacency; the enumerator value is the neighbor count.
enum class Connectivity { kFace6 = 6, kEdge18 = 18, kCorner26 = 26 };

std::vector<std::array<int, 3>> neighbor_offsets(Connectivity connectivity);
Connectivity connectivity_from_int(int neighbors);
std::string to_string(Connectivity connectivity);

/// labels[v] = 0 for background, 1..K otherwise; label k is the k-th
/// component met in x-fastest scan order and sizes[k-1] its voxel count.
struct ClusterLabeling {
  VolumeGeometry geometry;
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> sizes;
  Connectivity connectivity = Connectivity::kCorner26;

  std::size_t count() const { return sizes.size(); }
  BinaryMask mask() const;
};

ClusterLabeling label_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::kCorner26);

/// 0 when there are no clusters.
std::size_t max_cluster_size(const ClusterLabeling& labeling);

/// Keeps clusters whose size is strictly greater than `min_exclusive`,
/// renumbered 1..K' in their original order.
ClusterLabeling filter_clusters(const ClusterLabeling& labeling, std::size_t min_exclusive);

/// Two-pass union-find labeler with reusable buffers, for repeated calls on
/// masks of one geometry (the permutation loop).
class ComponentLabeler {
 public:
  ComponentLabeler(const VolumeGeometry& geometry, Connectivity connectivity);

  /// Labels `mask` (one byte per voxel, nonzero = foreground) into `labels`
  /// and writes component sizes in label order to `sizes`.
  void label(std::span<const std::uint8_t> mask, std::vector<std::int32_t>& labels, std::vector<std::size_t>& sizes);

  /// Component sizes only; `foreground` is a list of foreground voxel indices in
  /// ascending order. Faster when the foreground is sparse.
  void sizes_from_voxels(std::span<const std::size_t> foreground, std::vector<std::size_t>& sizes);

 private:
  std::int32_t find(std::int32_t x);
  void unite(std::int32_t a, std::int32_t b);

  VolumeGeometry geometry_;
  // Neighbors that precede a voxel in scan order, as (dx, dy, dz).
  std::vector<std::array<int, 3>> backward_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> provisional_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
  std::vector<std::int32_t> remap_;
};

}  // namespace vlsm
