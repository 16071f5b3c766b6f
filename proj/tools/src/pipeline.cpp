#include "vlsm/app/pipeline.hpp"

#include <chrono>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vlsm/app/checksum.hpp"
#include "vlsm/app/cohort_io.hpp"
#include "vlsm/error.hpp"
#include "vlsm/nifti.hpp"
#include "vlsm/permute_io.hpp"
#include "vlsm/stats.hpp"

#ifndef VLSM_VERSION
#define VLSM_VERSION "dev"
#endif

namespace vlsm::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class StageTimer {
 public:
  void start(std::string stage) {
    stop();
    stage_ = std::move(stage);
    begin_ = std::chrono::steady_clock::now();
  }
  void stop() {
    if (stage_.empty()) return;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - begin_;
    timings_.push_back(ordered_json{{"stage", stage_}, {"seconds", elapsed.count()}});
    stage_.clear();
  }
  ordered_json timings() {
    stop();
    return timings_;
  }

 private:
  std::string stage_;
  std::chrono::steady_clock::time_point begin_;
  ordered_json timings_ = ordered_json::array();
};

ordered_json checksum_list(const fs::path& root, const std::vector<fs::path>& relative) {
  ordered_json list = ordered_json::array();
  for (const auto& rel : relative) {
    list.push_back(ordered_json{
        {"path", rel.generic_string()}, {"sha256", sha256_file(root / rel)}, {"bytes", fs::file_size(root / rel)}});
  }
  return list;
}

std::string directory_checksum(const ordered_json& artifacts) {
  std::string text;
  for (const auto& a : artifacts) text += a.at("path").get<std::string>() + " " + a.at("sha256").get<std::string>() + "\n";
  return sha256_text(text);
}

void write_manifest(const fs::path& out_dir, ordered_json manifest, const std::vector<fs::path>& artifacts,
                    StageTimer& timer) {
  manifest["artifacts"] = checksum_list(out_dir, artifacts);
  manifest["directory_checksum"] = directory_checksum(manifest["artifacts"]);
  manifest["timings"] = timer.timings();
  write_text_file(out_dir / RunFiles::kManifest, manifest.dump(2));
}

std::vector<NullMode> selected_modes(ModeSelection modes) {
  switch (modes) {
    case ModeSelection::kMaxCluster: return {NullMode::kMaxCluster};
    case ModeSelection::kAllClusters: return {NullMode::kAllClusters};
    case ModeSelection::kBoth: return {NullMode::kMaxCluster, NullMode::kAllClusters};
  }
  return {};
}

std::string double_text(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string RunFiles::thresholds_json(NullMode mode) { return "thresholds_" + to_string(mode) + ".json"; }
std::string RunFiles::thresholds_csv(NullMode mode) { return "thresholds_" + to_string(mode) + ".csv"; }
std::string RunFiles::null_json(NullMode mode) { return "null_" + to_string(mode) + ".json"; }
std::string RunFiles::audit_null_json(NullMode mode) { return "audit_null_" + to_string(mode) + ".json"; }
fs::path RunFiles::corrected_map(NullMode mode, double p_threshold) {
  return fs::path(kCorrectedDir) / (to_string(mode) + "_p" + format_p(p_threshold) + ".nii");
}
std::string RunFiles::fdr_map(double q) { return "fdr_q" + format_p(q) + ".nii"; }

void cmd_synth(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides) {
  StageTimer timer;
  timer.start("configure");
  AppConfig config = AppConfig::from_file(config_path);
  if (overrides.seed) config.synth.seed = *overrides.seed;
  const SyntheticCohortSpec spec = to_cohort_spec(config.synth);

  timer.start("generate");
  const SyntheticCohort synthetic = generate_cohort(spec);

  timer.start("write");
  fs::create_directories(out_dir);
  ordered_json synth_echo = ordered_json::parse(config.to_json()).at("synth");
  const auto written = save_synthetic_cohort(synthetic, synth_echo.dump(), out_dir);

  ordered_json manifest{{"tool", "vlsm"},
                        {"version", VLSM_VERSION},
                        {"command", "synth"},
                        {"config_path", config_path.string()},
                        {"effective_config", ordered_json::parse(config.to_json())},
                        {"output_dir", out_dir.string()},
                        {"inputs", ordered_json::array({ordered_json{{"path", config_path.string()},
                                                                     {"sha256", sha256_file(config_path)}}})}};
  write_manifest(out_dir, std::move(manifest), written, timer);
}

void cmd_run(const fs::path& cohort_dir, const fs::path& config_path, const fs::path& out_dir,
             const Overrides& overrides) {
  StageTimer timer;
  timer.start("configure");
  AppConfig config = AppConfig::from_file(config_path);
  if (overrides.seed) config.analysis.permutation.master_seed = *overrides.seed;
  if (overrides.modes) config.analysis.modes = *overrides.modes;
  const AnalysisSection& analysis = config.analysis;
  PermutationConfig perm = analysis.permutation;
  perm.mode = NullMode::kAllClusters;
  perm.validate();
  const unsigned threads = overrides.threads != 0 ? overrides.threads : std::max(1u, std::thread::hardware_concurrency());

  timer.start("load_cohort");
  const Cohort cohort = load_cohort(cohort_dir);
  ordered_json inputs = ordered_json::array();
  inputs.push_back(ordered_json{{"path", config_path.string()}, {"sha256", sha256_file(config_path)}});
  inputs.push_back(ordered_json{{"path", (cohort_dir / CohortFiles::kScores).string()},
                                {"sha256", sha256_file(cohort_dir / CohortFiles::kScores)}});
  for (const auto& subject : cohort.subjects()) {
    const fs::path p = cohort_dir / CohortFiles::kMasks / (subject.id + ".nii");
    if (fs::exists(p)) inputs.push_back(ordered_json{{"path", p.string()}, {"sha256", sha256_file(p)}});
  }

  timer.start("observed_map");
  const LesionDesign design(cohort, perm.min_lesion);
  if (design.analyzable_voxels().empty()) {
    throw NumericError("run: no analyzable voxels with min_lesion = " + std::to_string(perm.min_lesion));
  }
  const StatMap observed = design.stat_map(cohort.scores());

  fs::create_directories(out_dir / RunFiles::kCorrectedDir);
  std::vector<fs::path> artifacts;
  auto emit = [&](const fs::path& rel) { artifacts.push_back(rel); };

  nifti::write_float(observed.geometry, observed.t, out_dir / RunFiles::kTMap);
  emit(RunFiles::kTMap);
  nifti::write(observed.analyzable, out_dir / RunFiles::kAnalyzable);
  emit(RunFiles::kAnalyzable);
  const CountMap overlap = overlap_map(cohort);
  nifti::write_int16(overlap.geometry, overlap.counts, out_dir / RunFiles::kOverlap);
  emit(RunFiles::kOverlap);

  // FDR over analyzable-voxel p-values.
  {
    std::vector<std::size_t> voxels;
    std::vector<double> p_values;
    for (std::size_t v = 0; v < observed.t.size(); ++v) {
      if (!observed.analyzable[v]) continue;
      voxels.push_back(v);
      p_values.push_back(t_to_p(observed.t[v], observed.df, perm.tail));
    }
    const FdrResult fdr = fdr_bh(p_values, analysis.fdr_q);
    BinaryMask fdr_mask(observed.geometry);
    for (std::size_t i = 0; i < voxels.size(); ++i) fdr_mask.set(voxels[i], fdr.reject[i]);
    nifti::write(fdr_mask, out_dir / RunFiles::fdr_map(analysis.fdr_q));
    emit(RunFiles::fdr_map(analysis.fdr_q));
  }

  timer.start("permutations");
  const NullDistribution build_all = build_null(cohort, perm, BuildOptions{threads, 1});
  std::optional<NullDistribution> audit_all;
  if (analysis.n_audit_permutations > 0) {
    timer.start("audit_permutations");
    PermutationConfig audit_cfg = perm;
    audit_cfg.n_permutations = analysis.n_audit_permutations;
    audit_all = build_null(cohort, audit_cfg, BuildOptions{threads, perm.n_permutations + 1});
  }

  timer.start("correction");
  write_cluster_csv(build_all, out_dir / RunFiles::kNullClusters);
  emit(RunFiles::kNullClusters);

  std::ostringstream fp;
  fp << "mode,p_threshold,threshold,fp_rate_build,fp_rate_audit\n";
  std::optional<double> fwer_threshold;
  for (NullMode mode : selected_modes(analysis.modes)) {
    const NullDistribution null = mode == NullMode::kMaxCluster ? reduce_to_max_cluster(build_all) : build_all;
    const ThresholdTable table = derive_thresholds(null, perm.alpha);
    write_text_file(out_dir / RunFiles::null_json(mode), to_json(null));
    emit(RunFiles::null_json(mode));
    write_text_file(out_dir / RunFiles::thresholds_json(mode), to_json(table));
    emit(RunFiles::thresholds_json(mode));
    write_threshold_csv(table, out_dir / RunFiles::thresholds_csv(mode));
    emit(RunFiles::thresholds_csv(mode));

    const std::vector<double> build_rates = false_positive_rate(null, table);
    std::vector<double> audit_rates;
    if (audit_all) {
      const NullDistribution audit = mode == NullMode::kMaxCluster ? reduce_to_max_cluster(*audit_all) : *audit_all;
      write_text_file(out_dir / RunFiles::audit_null_json(mode), to_json(audit));
      emit(RunFiles::audit_null_json(mode));
      audit_rates = false_positive_rate(audit, table);
    }
    for (std::size_t k = 0; k < table.entries.size(); ++k) {
      fp << to_string(mode) << ',' << format_p(table.entries[k].p_threshold) << ','
         << table.entries[k].cluster_size_threshold << ',' << double_text(build_rates[k]) << ','
         << (audit_rates.empty() ? std::string() : double_text(audit_rates[k])) << '\n';
    }

    PermutationConfig mode_cfg = perm;
    mode_cfg.mode = mode;
    const CorrectedResult corrected = apply_correction(observed, table, mode_cfg);
    for (const auto& ct : corrected.per_threshold) {
      const fs::path rel = RunFiles::corrected_map(mode, ct.p_threshold);
      nifti::write(ct.surviving.mask(), out_dir / rel);
      emit(rel);
    }
    if (!fwer_threshold) {
      fwer_threshold = corrected.fwer_t_threshold;
      nifti::write(corrected.fwer_mask, out_dir / RunFiles::kFwer);
      emit(RunFiles::kFwer);
      const double build_fwer = fwer_false_positive_rate(build_all, *fwer_threshold);
      fp << "fwer,," << double_text(*fwer_threshold) << ',' << double_text(build_fwer) << ','
         << (audit_all ? double_text(fwer_false_positive_rate(*audit_all, *fwer_threshold)) : std::string()) << '\n';
    }
  }
  write_text_file(out_dir / RunFiles::kFpRates, fp.str());
  emit(RunFiles::kFpRates);

  ordered_json manifest{{"tool", "vlsm"},
                        {"version", VLSM_VERSION},
                        {"command", "run"},
                        {"config_path", config_path.string()},
                        {"effective_config", ordered_json::parse(config.to_json())},
                        {"cohort_dir", cohort_dir.string()},
                        {"output_dir", out_dir.string()},
                        {"threads", threads},
                        {"degenerate_voxels", observed.degenerate_voxels},
                        {"inputs", std::move(inputs)}};
  write_manifest(out_dir, std::move(manifest), artifacts, timer);
}

}  // namespace vlsm::app
