#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "vlsm/permute.hpp"
#include "vlsm/synth.hpp"

namespace vlsm::app {

/// Synthetic scenario: ellipsoidal brain, box ROI, lesion growth parameters.
struct SynthSection {
  std::array<std::int32_t, 3> dims{32, 32, 32};
  std::array<double, 3> spacing{2.0, 2.0, 2.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> brain_center{15.5, 15.5, 15.5};
  std::array<double, 3> brain_radii{13.0, 11.0, 10.0};
  std::array<std::int32_t, 3> roi_lo{14, 14, 14};
  std::array<std::int32_t, 3> roi_hi{18, 17, 17};
  std::size_t n_subjects = 60;
  std::size_t min_lesion_voxels = 50;
  std::size_t max_lesion_voxels = 800;
  double growth_bias = 1.0;
  double score_noise_sd = 0.0;
  std::uint64_t seed = 1;
};

/// Which null modes `run` evaluates.
enum class ModeSelection { kMaxCluster, kAllClusters, kBoth };
ModeSelection mode_selection_from_string(const std::string& text);
std::string to_string(ModeSelection modes);

struct AnalysisSection {
  PermutationConfig permutation;  // permutation.mode is ignored; see `modes`
  std::size_t n_audit_permutations = 400;
  ModeSelection modes = ModeSelection::kBoth;
  double fdr_q = 0.05;
};

/// Single JSON configuration file with "synth" and "analysis" sections.
/// Every key is optional; the effective config (defaults filled in) is
/// echoed into run manifests.
struct AppConfig {
  SynthSection synth;
  AnalysisSection analysis;

  /// Throws ConfigError on malformed JSON, unknown keys or invalid values.
  static AppConfig from_json(const std::string& text);
  static AppConfig from_file(const std::filesystem::path& path);
  std::string to_json() const;
};

SyntheticCohortSpec to_cohort_spec(const SynthSection& synth);

}  // namespace vlsm::app
