#include "vlsm/cluster.hpp"

#include <algorithm>
#include <cstdlib>

#include "vlsm/error.hpp"

namespace vlsm {

std::vector<std::array<int, 3>> neighbor_offsets(Connectivity connectivity) {
  std::vector<std::array<int, 3>> out;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nonzero = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (nonzero == 0) continue;
        if (connectivity == Connectivity::kFace6 && nonzero > 1) continue;
        if (connectivity == Connectivity::kEdge18 && nonzero > 2) continue;
        out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

Connectivity connectivity_from_int(int neighbors) {
  switch (neighbors) {
    case 6: return Connectivity::kFace6;
    case 18: return Connectivity::kEdge18;
    case 26: return Connectivity::kCorner26;
    default: throw ConfigError("connectivity must be 6, 18 or 26, got " + std::to_string(neighbors));
  }
}

std::string to_string(Connectivity connectivity) { return std::to_string(static_cast<int>(connectivity)); }

BinaryMask ClusterLabeling::mask() const {
  BinaryMask out(geometry);
  for (std::size_t v = 0; v < labels.size(); ++v) out.set(v, labels[v] > 0);
  return out;
}

ComponentLabeler::ComponentLabeler(const VolumeGeometry& geometry, Connectivity connectivity) : geometry_(geometry) {
  for (const auto& o : neighbor_offsets(connectivity)) {
    // Strictly earlier in x-fastest order.
    if (o[2] < 0 || (o[2] == 0 && o[1] < 0) || (o[2] == 0 && o[1] == 0 && o[0] < 0)) backward_.push_back(o);
  }
}

std::int32_t ComponentLabeler::find(std::int32_t x) {
  std::int32_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::int32_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

void ComponentLabeler::unite(std::int32_t a, std::int32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (a < b) {
    parent_[b] = a;
  } else {
    parent_[a] = b;
  }
}

void ComponentLabeler::label(std::span<const std::uint8_t> mask, std::vector<std::int32_t>& labels,
                             std::vector<std::size_t>& sizes) {
  const auto nx = geometry_.dims[0];
  const auto ny = geometry_.dims[1];
  const auto nz = geometry_.dims[2];
  labels.assign(mask.size(), 0);
  parent_.clear();
  parent_.push_back(0);  // label 0 is background

  std::size_t v = 0;
  for (std::int32_t z = 0; z < nz; ++z) {
    for (std::int32_t y = 0; y < ny; ++y) {
      for (std::int32_t x = 0; x < nx; ++x, ++v) {
        if (!mask[v]) continue;
        std::int32_t current = 0;
        for (const auto& o : backward_) {
          const std::int64_t qx = x + o[0], qy = y + o[1], qz = z + o[2];
          if (!geometry_.contains(qx, qy, qz)) continue;
          const std::int32_t neighbor = labels[geometry_.index(static_cast<std::int32_t>(qx), static_cast<std::int32_t>(qy),
                                                               static_cast<std::int32_t>(qz))];
          if (neighbor == 0) continue;
          if (current == 0) {
            current = neighbor;
          } else if (neighbor != current) {
            unite(current, neighbor);
          }
        }
        if (current == 0) {
          current = static_cast<std::int32_t>(parent_.size());
          parent_.push_back(current);
        }
        labels[v] = current;
      }
    }
  }

  remap_.assign(parent_.size(), 0);
  sizes.clear();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue;
    const std::int32_t root = find(labels[i]);
    if (remap_[root] == 0) {
      sizes.push_back(0);
      remap_[root] = static_cast<std::int32_t>(sizes.size());
    }
    labels[i] = remap_[root];
    ++sizes[static_cast<std::size_t>(labels[i] - 1)];
  }
}

void ComponentLabeler::sizes_from_voxels(std::span<const std::size_t> foreground, std::vector<std::size_t>& sizes) {
  if (stamp_.size() != geometry_.voxel_count()) {
    stamp_.assign(geometry_.voxel_count(), 0);
    provisional_.assign(geometry_.voxel_count(), 0);
    generation_ = 0;
  }
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  parent_.clear();

  // Backward neighbors of v precede it in scan order, so with `foreground`
  // ascending they are already labeled when stamped with this generation.
  for (std::size_t v : foreground) {
    const auto c = geometry_.coords(v);
    std::int32_t current = -1;
    for (const auto& o : backward_) {
      const std::int64_t qx = c[0] + o[0], qy = c[1] + o[1], qz = c[2] + o[2];
      if (!geometry_.contains(qx, qy, qz)) continue;
      const std::size_t q = geometry_.index(static_cast<std::int32_t>(qx), static_cast<std::int32_t>(qy),
                                            static_cast<std::int32_t>(qz));
      if (stamp_[q] != generation_) continue;
      const std::int32_t neighbor = provisional_[q];
      if (current < 0) {
        current = neighbor;
      } else if (neighbor != current) {
        unite(current, neighbor);
      }
    }
    if (current < 0) {
      current = static_cast<std::int32_t>(parent_.size());
      parent_.push_back(current);
    }
    provisional_[v] = current;
    stamp_[v] = generation_;
  }

  remap_.assign(parent_.size(), -1);
  sizes.clear();
  for (std::size_t v : foreground) {
    const std::int32_t root = find(provisional_[v]);
    if (remap_[root] < 0) {
      remap_[root] = static_cast<std::int32_t>(sizes.size());
      sizes.push_back(0);
    }
    ++sizes[static_cast<std::size_t>(remap_[root])];
  }
}

ClusterLabeling label_components(const BinaryMask& mask, Connectivity connectivity) {
  ClusterLabeling out;
  out.geometry = mask.geometry();
  out.connectivity = connectivity;
  ComponentLabeler labeler(mask.geometry(), connectivity);
  labeler.label(mask.voxels(), out.labels, out.sizes);
  return out;
}

std::size_t max_cluster_size(const ClusterLabeling& labeling) {
  if (labeling.sizes.empty()) return 0;
  return *std::max_element(labeling.sizes.begin(), labeling.sizes.end());
}

ClusterLabeling filter_clusters(const ClusterLabeling& labeling, std::size_t min_exclusive) {
  ClusterLabeling out;
  out.geometry = labeling.geometry;
  out.connectivity = labeling.connectivity;
  std::vector<std::int32_t> remap(labeling.sizes.size() + 1, 0);
  for (std::size_t k = 0; k < labeling.sizes.size(); ++k) {
    if (labeling.sizes[k] > min_exclusive) {
      out.sizes.push_back(labeling.sizes[k]);
      remap[k + 1] = static_cast<std::int32_t>(out.sizes.size());
    }
  }
  out.labels.resize(labeling.labels.size());
  for (std::size_t v = 0; v < labeling.labels.size(); ++v) out.labels[v] = remap[labeling.labels[v]];
  return out;
}

}  // namespace vlsm
