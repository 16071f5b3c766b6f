#include "vlsm/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "vlsm/error.hpp"

namespace vlsm {
namespace {

constexpr int kMaxRestarts = 100;
constexpr std::uint64_t kSubjectDomain = 0x53554253594E5448ULL;  // "SUBSYNTH"

// Frontier voxels bucketed by occupied face-neighbor count (1..6).
class Frontier {
 public:
  explicit Frontier(std::size_t voxels) : count_(voxels, 0), slot_(voxels, 0) {}

  void clear() {
    for (auto& bucket : buckets_) {
      for (std::size_t v : bucket) count_[v] = 0;
      bucket.clear();
    }
  }
  void remove(std::size_t v) {
    if (count_[v] == 0) return;
    auto& bucket = buckets_[count_[v]];
    const std::size_t last = bucket.back();
    bucket[slot_[v]] = last;
    slot_[last] = slot_[v];
    bucket.pop_back();
    count_[v] = 0;
  }
  void bump(std::size_t v) {
    const std::uint8_t next = count_[v] + 1;
    remove(v);
    count_[v] = next;
    slot_[v] = buckets_[next].size();
    buckets_[next].push_back(v);
  }
  bool empty() const {
    for (const auto& bucket : buckets_) {
      if (!bucket.empty()) return false;
    }
    return true;
  }
  std::size_t sample(const std::array<double, 7>& weight, RngStream& rng) const {
    double total = 0.0;
    for (int k = 1; k <= 6; ++k) total += weight[k] * static_cast<double>(buckets_[k].size());
    double r = rng.uniform01() * total;
    int chosen = 0;
    for (int k = 1; k <= 6; ++k) {
      if (buckets_[k].empty()) continue;
      chosen = k;
      const double w = weight[k] * static_cast<double>(buckets_[k].size());
      if (r < w) break;
      r -= w;
    }
    const auto& bucket = buckets_[chosen];
    return bucket[rng.uniform_below(bucket.size())];
  }

 private:
  std::array<std::vector<std::size_t>, 7> buckets_;
  std::vector<std::uint8_t> count_;
  std::vector<std::size_t> slot_;
};

}  // namespace

BinaryMask make_ellipsoid(const VolumeGeometry& geometry, std::array<double, 3> center, std::array<double, 3> radii) {
  BinaryMask mask(geometry);
  for (std::int32_t z = 0; z < geometry.dims[2]; ++z) {
    for (std::int32_t y = 0; y < geometry.dims[1]; ++y) {
      for (std::int32_t x = 0; x < geometry.dims[0]; ++x) {
        const double dx = (x - center[0]) / radii[0];
        const double dy = (y - center[1]) / radii[1];
        const double dz = (z - center[2]) / radii[2];
        if (dx * dx + dy * dy + dz * dz <= 1.0) mask.set(x, y, z, true);
      }
    }
  }
  return mask;
}

BinaryMask make_box(const VolumeGeometry& geometry, std::array<std::int32_t, 3> lo, std::array<std::int32_t, 3> hi) {
  BinaryMask mask(geometry);
  for (std::int32_t z = std::max(lo[2], 0); z <= std::min(hi[2], geometry.dims[2] - 1); ++z) {
    for (std::int32_t y = std::max(lo[1], 0); y <= std::min(hi[1], geometry.dims[1] - 1); ++y) {
      for (std::int32_t x = std::max(lo[0], 0); x <= std::min(hi[0], geometry.dims[0] - 1); ++x) {
        mask.set(x, y, z, true);
      }
    }
  }
  return mask;
}

void SyntheticCohortSpec::validate() const {
  if (!brain_mask.geometry().compatible(geometry)) throw ConfigError("brain_mask geometry differs from the grid");
  if (!roi.geometry().compatible(geometry)) throw ConfigError("roi geometry differs from the grid");
  if (n_subjects < 4) throw ConfigError("n_subjects must be >= 4, got " + std::to_string(n_subjects));
  if (min_lesion_voxels < 1) throw ConfigError("lesion_size_range: min_voxels must be >= 1");
  if (min_lesion_voxels > max_lesion_voxels) throw ConfigError("lesion_size_range: min_voxels > max_voxels");
  if (max_lesion_voxels > brain_mask.size()) {
    throw ConfigError("lesion_size_range: max_voxels = " + std::to_string(max_lesion_voxels) +
                      " exceeds brain_mask size " + std::to_string(brain_mask.size()));
  }
  if (!(growth_bias >= 0.0) || !std::isfinite(growth_bias)) throw ConfigError("growth_bias must be >= 0");
  if (!(score_noise_sd >= 0.0) || !std::isfinite(score_noise_sd)) throw ConfigError("score_noise_sd must be >= 0");
  if (roi.empty()) throw ConfigError("roi must be nonempty");
  if (!is_subset(roi, brain_mask)) throw ConfigError("roi must lie within brain_mask (roi ⊆ brain_mask violated)");
}

BinaryMask grow_lesion(const BinaryMask& brain_mask, std::size_t target_size, double growth_bias, RngStream& rng) {
  const std::vector<std::size_t> brain = brain_mask.true_indices();
  if (target_size < 1 || target_size > brain.size()) {
    throw ConfigError("grow_lesion: target_size " + std::to_string(target_size) + " outside [1, " +
                      std::to_string(brain.size()) + "]");
  }
  const VolumeGeometry& g = brain_mask.geometry();
  std::array<double, 7> weight{};
  for (int k = 1; k <= 6; ++k) weight[k] = std::exp(growth_bias * k);
  static constexpr std::array<std::array<int, 3>, 6> kFace{
      {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

  BinaryMask lesion(g);
  Frontier frontier(g.voxel_count());
  for (int attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    lesion = BinaryMask(g);
    frontier.clear();
    std::size_t grown = 0;
    std::size_t next = brain[rng.uniform_below(brain.size())];
    while (true) {
      frontier.remove(next);
      lesion.set(next, true);
      ++grown;
      if (grown == target_size) return lesion;
      const auto c = g.coords(next);
      for (const auto& o : kFace) {
        const std::int64_t x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
        if (!g.contains(x, y, z)) continue;
        const std::size_t q = g.index(static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
                                      static_cast<std::int32_t>(z));
        if (brain_mask[q] && !lesion[q]) frontier.bump(q);
      }
      if (frontier.empty()) break;
      next = frontier.sample(weight, rng);
    }
  }
  throw ConfigError("grow_lesion: target size " + std::to_string(target_size) + " unreachable after " +
                    std::to_string(kMaxRestarts) + " restarts (no brain_mask component that large?)");
}

SyntheticCohort generate_cohort(const SyntheticCohortSpec& spec) {
  spec.validate();
  std::vector<Subject> subjects;
  std::vector<double> scores;
  std::vector<double> damage;
  subjects.reserve(spec.n_subjects);
  const std::size_t span = spec.max_lesion_voxels - spec.min_lesion_voxels + 1;
  for (std::size_t j = 0; j < spec.n_subjects; ++j) {
    RngStream rng(spec.seed ^ kSubjectDomain, j);
    const std::size_t size = spec.min_lesion_voxels + rng.uniform_below(span);
    BinaryMask lesion = grow_lesion(spec.brain_mask, size, spec.growth_bias, rng);
    const double d = percent_damage(lesion, spec.roi);
    const double noise = spec.score_noise_sd > 0.0 ? spec.score_noise_sd * rng.normal() : 0.0;
    char id[32];
    std::snprintf(id, sizeof(id), "sub-%03zu", j + 1);
    subjects.push_back(Subject{id, std::move(lesion)});
    damage.push_back(d);
    scores.push_back(d + noise);
  }
  return SyntheticCohort{Cohort(std::move(subjects), std::move(scores)), GroundTruth{spec.roi, spec, std::move(damage)}};
}

}  // namespace vlsm
