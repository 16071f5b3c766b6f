#include "vlsm/app/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "vlsm/app/cohort_io.hpp"
#include "vlsm/app/pipeline.hpp"
#include "vlsm/cluster.hpp"
#include "vlsm/error.hpp"
#include "vlsm/nifti.hpp"
#include "vlsm/permute_io.hpp"

namespace vlsm::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json metrics_json(const RecoveryMetrics& m) {
  return ordered_json{{"detected_voxels", m.detected_voxels}, {"roi_voxels", m.roi_voxels},
                      {"hit_voxels", m.hit_voxels},           {"sensitivity", m.sensitivity},
                      {"spill_over", m.spill_over},           {"dice", m.dice}};
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

RecoveryMetrics recovery_metrics(const BinaryMask& detected, const BinaryMask& analyzable_roi) {
  RecoveryMetrics m;
  m.detected_voxels = detected.size();
  m.roi_voxels = analyzable_roi.size();
  m.hit_voxels = intersection_size(detected, analyzable_roi);
  if (m.roi_voxels == 0) return m;
  const auto roi = static_cast<double>(m.roi_voxels);
  m.sensitivity = static_cast<double>(m.hit_voxels) / roi;
  m.spill_over = static_cast<double>(m.detected_voxels) / roi;
  m.dice = 2.0 * static_cast<double>(m.hit_voxels) / (static_cast<double>(m.detected_voxels) + roi);
  return m;
}

LogLogFit loglog_fit(std::span<const double> p_thresholds, std::span<const double> thresholds) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < std::min(p_thresholds.size(), thresholds.size()); ++i) {
    if (thresholds[i] > 0.0 && p_thresholds[i] > 0.0) {
      xs.push_back(std::log10(p_thresholds[i]));
      ys.push_back(std::log10(thresholds[i]));
    }
  }
  LogLogFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A flat curve is fit exactly.
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

const ModeEvaluation* EvaluationReport::find(NullMode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

std::string EvaluationReport::to_json() const {
  ordered_json modes_json = ordered_json::array();
  for (const auto& m : modes) {
    ordered_json rows = ordered_json::array();
    for (const auto& t : m.thresholds) {
      ordered_json row{{"p_threshold", t.p_threshold},
                       {"cluster_size_threshold", t.cluster_size_threshold},
                       {"fp_rate_build", t.fp_rate_build},
                       {"fp_rate_audit", t.fp_rate_audit ? ordered_json(*t.fp_rate_audit) : ordered_json(nullptr)},
                       {"surviving_cluster_sizes", t.surviving_cluster_sizes}};
      if (t.recovery) row["recovery"] = metrics_json(*t.recovery);
      rows.push_back(std::move(row));
    }
    modes_json.push_back(ordered_json{{"mode", to_string(m.mode)},
                                      {"thresholds", std::move(rows)},
                                      {"threshold_curve",
                                       {{"points", m.threshold_curve.points},
                                        {"slope", m.threshold_curve.slope},
                                        {"intercept", m.threshold_curve.intercept},
                                        {"r_squared", m.threshold_curve.r_squared}}}});
  }
  ordered_json j{{"schema", "vlsm.evaluation/1"},
                 {"has_ground_truth", has_ground_truth},
                 {"fwer",
                  {{"t_threshold", fwer_t_threshold},
                   {"fp_rate_build", fwer_fp_rate_build},
                   {"fp_rate_audit", fwer_fp_rate_audit ? ordered_json(*fwer_fp_rate_audit) : ordered_json(nullptr)}}},
                 {"modes", std::move(modes_json)}};
  if (fwer_recovery) j["fwer"]["recovery"] = metrics_json(*fwer_recovery);
  return j.dump(2);
}

EvaluationReport cmd_evaluate(const fs::path& output_dir, const std::optional<fs::path>& ground_truth,
                              const fs::path& report_dir) {
  if (!fs::is_directory(output_dir)) throw InputError(output_dir.string() + ": run output directory not found");
  EvaluationReport report;

  const BinaryMask analyzable = nifti::read_mask(output_dir / RunFiles::kAnalyzable);
  std::optional<BinaryMask> analyzable_roi;
  if (ground_truth) {
    const GroundTruthFile truth = load_ground_truth(*ground_truth);
    analyzable_roi = mask_and(truth.roi, analyzable);
    report.has_ground_truth = true;
  }

  bool fwer_done = false;
  for (NullMode mode : {NullMode::kMaxCluster, NullMode::kAllClusters}) {
    const fs::path table_path = output_dir / RunFiles::thresholds_json(mode);
    if (!fs::exists(table_path)) continue;
    const ThresholdTable table = table_from_json(read_text_file(table_path));
    const NullDistribution null = null_from_json(read_text_file(output_dir / RunFiles::null_json(mode)));
    const std::vector<double> build_rates = false_positive_rate(null, table);
    std::optional<NullDistribution> audit;
    std::vector<double> audit_rates;
    const fs::path audit_path = output_dir / RunFiles::audit_null_json(mode);
    if (fs::exists(audit_path)) {
      audit = null_from_json(read_text_file(audit_path));
      audit_rates = false_positive_rate(*audit, table);
    }

    ModeEvaluation eval;
    eval.mode = mode;
    std::vector<double> ps, sizes;
    for (std::size_t k = 0; k < table.entries.size(); ++k) {
      const auto& entry = table.entries[k];
      ThresholdEvaluation t;
      t.p_threshold = entry.p_threshold;
      t.cluster_size_threshold = entry.cluster_size_threshold;
      t.fp_rate_build = build_rates[k];
      if (!audit_rates.empty()) t.fp_rate_audit = audit_rates[k];
      const BinaryMask detected = nifti::read_mask(output_dir / RunFiles::corrected_map(mode, entry.p_threshold));
      t.surviving_cluster_sizes = label_components(detected, table.config.connectivity).sizes;
      if (analyzable_roi) t.recovery = recovery_metrics(detected, *analyzable_roi);
      ps.push_back(entry.p_threshold);
      sizes.push_back(static_cast<double>(entry.cluster_size_threshold));
      eval.thresholds.push_back(std::move(t));
    }
    eval.threshold_curve = loglog_fit(ps, sizes);
    report.modes.push_back(std::move(eval));

    if (!fwer_done) {
      fwer_done = true;
      report.fwer_t_threshold = table.fwer_t_threshold;
      report.fwer_fp_rate_build = fwer_false_positive_rate(null, table.fwer_t_threshold);
      if (audit) report.fwer_fp_rate_audit = fwer_false_positive_rate(*audit, table.fwer_t_threshold);
      if (analyzable_roi) {
        report.fwer_recovery = recovery_metrics(nifti::read_mask(output_dir / RunFiles::kFwer), *analyzable_roi);
      }
    }
  }
  if (report.modes.empty()) throw InputError(output_dir.string() + ": no threshold tables found");

  fs::create_directories(report_dir);
  write_text_file(report_dir / "report.json", report.to_json());

  std::ostringstream fp, curve, recovery;
  fp << "mode,p_threshold,cluster_size_threshold,fp_rate_build,fp_rate_audit\n";
  curve << "mode,p_threshold,log10_p,cluster_size_threshold,log10_threshold\n";
  recovery << "method,p_threshold,detected_voxels,roi_voxels,hit_voxels,sensitivity,spill_over,dice\n";
  for (const auto& m : report.modes) {
    for (const auto& t : m.thresholds) {
      fp << to_string(m.mode) << ',' << format_p(t.p_threshold) << ',' << t.cluster_size_threshold << ','
         << num(t.fp_rate_build) << ',' << (t.fp_rate_audit ? num(*t.fp_rate_audit) : "") << '\n';
      curve << to_string(m.mode) << ',' << format_p(t.p_threshold) << ',' << num(std::log10(t.p_threshold)) << ','
            << t.cluster_size_threshold << ','
            << (t.cluster_size_threshold > 0 ? num(std::log10(static_cast<double>(t.cluster_size_threshold))) : "")
            << '\n';
      if (t.recovery) {
        const auto& r = *t.recovery;
        recovery << to_string(m.mode) << ',' << format_p(t.p_threshold) << ',' << r.detected_voxels << ','
                 << r.roi_voxels << ',' << r.hit_voxels << ',' << num(r.sensitivity) << ',' << num(r.spill_over)
                 << ',' << num(r.dice) << '\n';
      }
    }
  }
  if (report.fwer_recovery) {
    const auto& r = *report.fwer_recovery;
    recovery << "fwer,," << r.detected_voxels << ',' << r.roi_voxels << ',' << r.hit_voxels << ','
             << num(r.sensitivity) << ',' << num(r.spill_over) << ',' << num(r.dice) << '\n';
  }
  write_text_file(report_dir / "fp_rates.csv", fp.str());
  write_text_file(report_dir / "threshold_curve.csv", curve.str());
  if (report.has_ground_truth) write_text_file(report_dir / "recovery.csv", recovery.str());
  return report;
}

}  // namespace vlsm::app
