#include "vlsm/app/cohort_io.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "vlsm/error.hpp"
#include "vlsm/nifti.hpp"
#include "vlsm/permute_io.hpp"

namespace vlsm::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<ScoreRow> read_scores_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty scores file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "subject_id,score") throw InputError(path.string() + ": header must be 'subject_id,score'");
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 'subject_id,score'");
    }
    ScoreRow row{line.substr(0, comma), 0.0};
    const std::string value = line.substr(comma + 1);
    std::size_t used = 0;
    try {
      row.score = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + value + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scores_csv(const std::vector<ScoreRow>& rows, const fs::path& path) {
  std::string out = "subject_id,score\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.score);
    out += row.subject_id + "," + buf + "\n";
  }
  write_text_file(path, out);
}

Cohort load_cohort(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError(dir.string() + ": cohort directory not found");
  const auto rows = read_scores_csv(dir / CohortFiles::kScores);
  std::vector<Subject> subjects;
  std::vector<double> scores;
  for (const auto& row : rows) {
    const fs::path mask_path = dir / CohortFiles::kMasks / (row.subject_id + ".nii");
    const fs::path gz_path = dir / CohortFiles::kMasks / (row.subject_id + ".nii.gz");
    const fs::path chosen = fs::exists(mask_path) || !fs::exists(gz_path) ? mask_path : gz_path;
    subjects.push_back(Subject{row.subject_id, nifti::read_mask(chosen)});
    scores.push_back(row.score);
  }
  return Cohort(std::move(subjects), std::move(scores));
}

std::vector<fs::path> save_synthetic_cohort(const SyntheticCohort& synthetic, const std::string& spec_json,
                                            const fs::path& dir) {
  fs::create_directories(dir / CohortFiles::kMasks);
  std::vector<fs::path> written;
  const Cohort& cohort = synthetic.cohort;
  std::vector<ScoreRow> rows;
  ordered_json damage = ordered_json::array();
  for (std::size_t j = 0; j < cohort.size(); ++j) {
    const auto& subject = cohort.subjects()[j];
    const fs::path rel = fs::path(CohortFiles::kMasks) / (subject.id + ".nii");
    nifti::write(subject.mask, dir / rel);
    written.push_back(rel);
    rows.push_back({subject.id, cohort.scores()[j]});
    damage.push_back(ordered_json{{"subject_id", subject.id}, {"damage", synthetic.truth.true_damage[j]}});
  }
  write_scores_csv(rows, dir / CohortFiles::kScores);
  written.emplace_back(CohortFiles::kScores);
  nifti::write(synthetic.truth.roi, dir / CohortFiles::kRoi);
  written.emplace_back(CohortFiles::kRoi);
  nifti::write(synthetic.truth.spec.brain_mask, dir / CohortFiles::kBrain);
  written.emplace_back(CohortFiles::kBrain);

  ordered_json truth{{"schema", "vlsm.ground_truth/1"},
                     {"roi", CohortFiles::kRoi},
                     {"brain_mask", CohortFiles::kBrain},
                     {"roi_voxels", synthetic.truth.roi.size()},
                     {"spec", ordered_json::parse(spec_json)},
                     {"true_damage", std::move(damage)}};
  write_text_file(dir / CohortFiles::kGroundTruth, truth.dump(2));
  written.emplace_back(CohortFiles::kGroundTruth);
  return written;
}

GroundTruthFile load_ground_truth(const fs::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  GroundTruthFile out;
  try {
    out.roi = nifti::read_mask(path.parent_path() / j.at("roi").get<std::string>());
    if (j.contains("true_damage")) {
      for (const auto& row : j.at("true_damage")) {
        out.true_damage.push_back({row.at("subject_id").get<std::string>(), row.at("damage").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace vlsm::app
