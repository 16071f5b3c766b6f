#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vlsm/synth.hpp"
#include "vlsm/volume.hpp"

namespace vlsm::app {

/// Cohort directory layout:
///   masks/<subject_id>.nii   uint8 lesion masks
///   scores.csv               header "subject_id,score", one row per subject
///   ground_truth.json        optional; roi path, spec echo, true damage
///   roi.nii, brain_mask.nii  written by `synth`
///   manifest.json
struct CohortFiles {
  static constexpr const char* kScores = "scores.csv";
  static constexpr const char* kMasks = "masks";
  static constexpr const char* kGroundTruth = "ground_truth.json";
  static constexpr const char* kRoi = "roi.nii";
  static constexpr const char* kBrain = "brain_mask.nii";
};

struct ScoreRow {
  std::string subject_id;
  double score = 0.0;
};

std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);
/// Scores are written with 17 significant digits (exact round trip).
void write_scores_csv(const std::vector<ScoreRow>& rows, const std::filesystem::path& path);

/// Throws InputError on missing files, malformed rows or geometry mismatch.
Cohort load_cohort(const std::filesystem::path& dir);

/// Writes masks, scores, roi, brain mask and ground truth; returns written paths (relative).
std::vector<std::filesystem::path> save_synthetic_cohort(const SyntheticCohort& cohort, const std::string& spec_json,
                                                         const std::filesystem::path& dir);

struct GroundTruthFile {
  BinaryMask roi;
  std::vector<ScoreRow> true_damage;
};
GroundTruthFile load_ground_truth(const std::filesystem::path& path);

}  // namespace vlsm::app
