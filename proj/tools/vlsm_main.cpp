// vlsm: lesion-symptom mapping with permutation-based cluster and max-t correction.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vlsm/app/evaluation.hpp"
#include "vlsm/app/pipeline.hpp"
#include "vlsm/error.hpp"
#include "vlsm/permute_io.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kInputError = 3, kNumericError = 4 };

std::optional<fs::path> default_ground_truth(const fs::path& output_dir) {
  const fs::path manifest = output_dir / vlsm::app::RunFiles::kManifest;
  if (!fs::exists(manifest)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(vlsm::read_text_file(manifest));
    if (!j.contains("cohort_dir")) return std::nullopt;
    const fs::path truth = fs::path(j.at("cohort_dir").get<std::string>()) / "ground_truth.json";
    if (fs::exists(truth)) return truth;
  } catch (const nlohmann::json::exception&) {
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vlsm - voxel-based lesion-symptom mapping with permutation correction"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string cohort_dir;
  std::string run_dir;
  std::string truth_path;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::string mode;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic lesion cohort from the config's synth section");
  synth->add_option("--config", config_path, "JSON config file")->required();
  synth->add_option("--out", out_dir, "Cohort output directory")->required();
  synth->add_option("--seed", seed, "Override synth.seed");

  auto* run = app.add_subcommand("run", "VLSM t-map, permutation nulls, thresholds and corrected maps");
  run->add_option("cohort", cohort_dir, "Cohort directory (masks/, scores.csv)")->required();
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--threads", threads, "Worker threads (default: available cores); output does not depend on it");
  run->add_option("--seed", seed, "Override analysis.master_seed");
  run->add_option("--mode", mode,
                  "Null distribution mode: max-cluster, all-clusters (demonstration only: does not control "
                  "false positives) or both")
      ->check(CLI::IsMember({"max-cluster", "all-clusters", "both"}));

  auto* evaluate = app.add_subcommand("evaluate", "Calibration and ground-truth metrics for a run directory");
  evaluate->add_option("run_dir", run_dir, "Output directory of `vlsm run`")->required();
  evaluate->add_option("--truth", truth_path, "ground_truth.json (default: from the run manifest's cohort)");
  evaluate->add_option("--out", out_dir, "Report directory (default: <run_dir>/evaluation)");

  app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors count as configuration errors; --help exits 0.
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    vlsm::app::Overrides overrides;
    overrides.threads = threads;
    overrides.seed = seed;
    if (!mode.empty()) overrides.modes = vlsm::app::mode_selection_from_string(mode);

    if (app.got_subcommand("version")) {
      std::cout << "vlsm " << VLSM_VERSION << "\n";
    } else if (app.got_subcommand(synth)) {
      vlsm::app::cmd_synth(config_path, out_dir, overrides);
      std::cout << "cohort written to " << out_dir << "\n";
    } else if (app.got_subcommand(run)) {
      vlsm::app::cmd_run(cohort_dir, config_path, out_dir, overrides);
      std::cout << "results written to " << out_dir << "\n";
    } else if (app.got_subcommand(evaluate)) {
      std::optional<fs::path> truth;
      if (!truth_path.empty()) {
        truth = truth_path;
      } else {
        truth = default_ground_truth(run_dir);
      }
      const fs::path report_dir = out_dir.empty() ? fs::path(run_dir) / "evaluation" : fs::path(out_dir);
      const auto report = vlsm::app::cmd_evaluate(run_dir, truth, report_dir);
      if (!report.has_ground_truth) std::cerr << "warning: no ground truth; reporting null calibration only\n";
      std::cout << "report written to " << report_dir.string() << "\n";
    }
  } catch (const vlsm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const vlsm::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const vlsm::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const vlsm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << "\n";
    return kNumericError;
  }
  return kOk;
}
