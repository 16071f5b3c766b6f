#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlsm/permute.hpp"
#include "vlsm/volume.hpp"

namespace vlsm::app {

/// Detected region against the analyzable part of the true ROI.
/// sensitivity = |D ∩ R| / |R|, spill_over = |D| / |R|, dice = 2|D ∩ R| / (|D| + |R|).
/// All three are 0 when R is empty.
struct RecoveryMetrics {
  std::size_t detected_voxels = 0;
  std::size_t roi_voxels = 0;
  std::size_t hit_voxels = 0;
  double sensitivity = 0.0;
  double spill_over = 0.0;
  double dice = 0.0;
};

RecoveryMetrics recovery_metrics(const BinaryMask& detected, const BinaryMask& analyzable_roi);

/// Least squares of log10(threshold) on log10(p) over entries with threshold > 0.
struct LogLogFit {
  std::size_t points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LogLogFit loglog_fit(std::span<const double> p_thresholds, std::span<const double> thresholds);

struct ThresholdEvaluation {
  double p_threshold = 0.0;
  std::uint64_t cluster_size_threshold = 0;
  double fp_rate_build = 0.0;
  std::optional<double> fp_rate_audit;
  std::vector<std::size_t> surviving_cluster_sizes;
  std::optional<RecoveryMetrics> recovery;
};

struct ModeEvaluation {
  NullMode mode = NullMode::kMaxCluster;
  std::vector<ThresholdEvaluation> thresholds;
  LogLogFit threshold_curve;
};

struct EvaluationReport {
  std::vector<ModeEvaluation> modes;
  double fwer_t_threshold = 0.0;
  double fwer_fp_rate_build = 0.0;
  std::optional<double> fwer_fp_rate_audit;
  std::optional<RecoveryMetrics> fwer_recovery;
  bool has_ground_truth = false;

  const ModeEvaluation* find(NullMode mode) const;
  std::string to_json() const;
};

/// Reads a `run` output directory (and optionally the cohort's
/// ground_truth.json), computes the report and writes report.json,
/// fp_rates.csv, threshold_curve.csv and recovery.csv into `report_dir`.
/// Without ground truth only the null-calibration entries are filled.
EvaluationReport cmd_evaluate(const std::filesystem::path& output_dir,
                              const std::optional<std::filesystem::path>& ground_truth,
                              const std::filesystem::path& report_dir);

}  // namespace vlsm::app
