#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "vlsm/app/config.hpp"

namespace vlsm::app {

/// Command-line overrides shared by the subcommands.
struct Overrides {
  unsigned threads = 0;  // 0: hardware concurrency
  std::optional<std::uint64_t> seed;
  std::optional<ModeSelection> modes;
};

/// Output file names under a `run` output directory.
struct RunFiles {
  static constexpr const char* kTMap = "tmap.nii";
  static constexpr const char* kAnalyzable = "analyzable.nii";
  static constexpr const char* kOverlap = "overlap.nii";
  static constexpr const char* kFwer = "fwer.nii";
  static constexpr const char* kCorrectedDir = "corrected";
  static constexpr const char* kFpRates = "fp_rates.csv";
  static constexpr const char* kNullClusters = "null_clusters.csv";
  static constexpr const char* kManifest = "manifest.json";

  static std::string thresholds_json(NullMode mode);
  static std::string thresholds_csv(NullMode mode);
  static std::string null_json(NullMode mode);
  static std::string audit_null_json(NullMode mode);
  /// corrected/<mode>_p<p>.nii
  static std::filesystem::path corrected_map(NullMode mode, double p_threshold);
  static std::string fdr_map(double q);
};

/// Generates the synthetic cohort described by the config's "synth" section.
/// `overrides.seed` replaces synth.seed.
void cmd_synth(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
               const Overrides& overrides = {});

/// Observed t-map, permutation nulls (build + audit batch), thresholds and
/// corrected maps for every selected mode. All inputs are loaded and
/// validated before the first permutation. `overrides.seed` replaces
/// analysis.master_seed.
void cmd_run(const std::filesystem::path& cohort_dir, const std::filesystem::path& config_path,
             const std::filesystem::path& out_dir, const Overrides& overrides = {});

}  // namespace vlsm::app
