#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vlsm/volume.hpp"

namespace testing_support {

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vlsm_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline vlsm::VolumeGeometry cube(int n, double spacing = 1.0) {
  return vlsm::VolumeGeometry({n, n, n}, {spacing, spacing, spacing});
}

inline vlsm::BinaryMask random_mask(const vlsm::VolumeGeometry& g, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  vlsm::BinaryMask m(g);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) m.set(i, on(rng));
  return m;
}

// Independent random lesion masks plus normal scores.
inline vlsm::Cohort random_cohort(const vlsm::VolumeGeometry& g, std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<vlsm::Subject> subjects;
  std::vector<double> scores;
  for (std::size_t j = 0; j < n; ++j) {
    subjects.push_back({"s" + std::to_string(j), random_mask(g, density, rng)});
    scores.push_back(normal(rng));
  }
  return vlsm::Cohort(std::move(subjects), std::move(scores));
}

// Masks that switch on whole slabs so nearby voxels share lesion patterns.
inline vlsm::Cohort blob_cohort(const vlsm::VolumeGeometry& g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick_x(0, g.dims[0] - 1), pick_y(0, g.dims[1] - 1), pick_z(0, g.dims[2] - 1);
  std::uniform_int_distribution<int> radius(1, 3);
  std::vector<vlsm::Subject> subjects;
  std::vector<double> scores;
  for (std::size_t j = 0; j < n; ++j) {
    vlsm::BinaryMask m(g);
    const int cx = pick_x(rng), cy = pick_y(rng), cz = pick_z(rng), r = radius(rng);
    for (int z = 0; z < g.dims[2]; ++z)
      for (int y = 0; y < g.dims[1]; ++y)
        for (int x = 0; x < g.dims[0]; ++x)
          if (std::abs(x - cx) <= r && std::abs(y - cy) <= r && std::abs(z - cz) <= r) m.set(x, y, z, true);
    subjects.push_back({"b" + std::to_string(j), std::move(m)});
    scores.push_back(normal(rng));
  }
  return vlsm::Cohort(std::move(subjects), std::move(scores));
}

}  // namespace testing_support
