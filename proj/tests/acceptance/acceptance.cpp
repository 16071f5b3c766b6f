// End-to-end acceptance: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/bh_percentile.hpp"
#include "oracles/direct_t.hpp"
#include "oracles/flood_fill.hpp"
#include "oracles/nifti_bytes.hpp"
#include "oracles/t_integral.hpp"
#include "support/fixtures.hpp"
#include "vlsm/app/cohort_io.hpp"
#include "vlsm/app/config.hpp"
#include "vlsm/app/evaluation.hpp"
#include "vlsm/app/pipeline.hpp"
#include "vlsm/cluster.hpp"
#include "vlsm/nifti.hpp"
#include "vlsm/permute.hpp"
#include "vlsm/permute_io.hpp"
#include "vlsm/stats.hpp"

using namespace vlsm;
using namespace vlsm::app;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int criterion, const std::string& name, Outcome& o) {
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << criterion << " (" << name << "):" << o.detail.str()
            << std::endl;
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

// Exact 99% two-sided acceptance region of Binomial(n, p): the smallest and
// largest counts whose tail probabilities stay above 0.005.
std::pair<std::size_t, std::size_t> binomial_region(std::size_t n, double p) {
  std::vector<double> pmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    pmf[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                      (n - k) * std::log1p(-p));
  }
  std::size_t lo = 0, hi = n;
  double lower = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (lower + pmf[k] > 0.005) {
      lo = k;
      break;
    }
    lower += pmf[k];
  }
  double upper = 0.0;
  for (std::size_t k = n + 1; k-- > 0;) {
    if (upper + pmf[k] > 0.005) {
      hi = k;
      break;
    }
    upper += pmf[k];
  }
  return {lo, hi};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && oracle::read_bytes(a.string()) == oracle::read_bytes(b.string());
}

const ThresholdEvaluation* at_p(const ModeEvaluation& mode, double p) {
  for (const auto& t : mode.thresholds) {
    if (std::abs(t.p_threshold - p) <= 1e-12 * p) return &t;
  }
  return nullptr;
}

void scenario_criteria(const fs::path& work) {
  const fs::path config = VLSM_SCENARIO_CONFIG;
  const AppConfig app_config = AppConfig::from_file(config);
  const auto& p_thresholds = app_config.analysis.permutation.p_thresholds;
  const double strictest = p_thresholds.back();

  cmd_synth(config, work / "cohort");
  Overrides eight;
  eight.threads = 8;
  cmd_run(work / "cohort", config, work / "run_t8", eight);
  const EvaluationReport r =
      cmd_evaluate(work / "run_t8", work / "cohort" / CohortFiles::kGroundTruth, work / "evaluation");
  const ModeEvaluation* max = r.find(NullMode::kMaxCluster);
  const ModeEvaluation* all = r.find(NullMode::kAllClusters);

  {
    Outcome o;
    o.require(max != nullptr, "max-cluster mode evaluated");
    const std::size_t n_audit = app_config.analysis.n_audit_permutations;
    const auto [lo, hi] = binomial_region(n_audit, 0.05);
    o.detail << " audit n=" << n_audit << ", 99% region [" << num(double(lo) / n_audit) << ", "
             << num(double(hi) / n_audit) << "]; rates";
    if (max) {
      o.require(max->thresholds.size() == 6, "six p-thresholds");
      for (const auto& t : max->thresholds) {
        const double rate = t.fp_rate_audit.value_or(-1.0);
        const auto k = static_cast<std::size_t>(std::llround(rate * n_audit));
        o.detail << " p" << format_p(t.p_threshold) << "=" << num(rate);
        o.require(t.fp_rate_audit.has_value() && k >= lo && k <= hi,
                  "rate at p=" + format_p(t.p_threshold) + " inside region");
      }
    }
    report(1, "max-cluster null calibration", o);
  }

  {
    Outcome o;
    o.require(all != nullptr, "all-clusters mode evaluated");
    if (all) {
      o.detail << " rates";
      for (const auto& t : all->thresholds) o.detail << " p" << format_p(t.p_threshold) << "=" << num(*t.fp_rate_audit);
      const auto* s = at_p(*all, strictest);
      o.require(s && *s->fp_rate_audit >= 0.10, ">= 0.10 at strictest p");
      // Thresholds are stored strictly decreasing in p; the rate must not increase along them.
      for (std::size_t k = 1; k < all->thresholds.size(); ++k) {
        o.require(*all->thresholds[k].fp_rate_audit <= *all->thresholds[k - 1].fp_rate_audit,
                  "non-decreasing in p at " + format_p(all->thresholds[k].p_threshold));
      }
      for (const auto& t : all->thresholds) {
        if (t.p_threshold >= 0.005) o.require(*t.fp_rate_audit >= 0.90, ">= 0.90 at p=" + format_p(t.p_threshold));
      }
    }
    report(2, "all-clusters inflation", o);
  }

  {
    Outcome o;
    if (max) {
      o.detail << " thresholds";
      for (const auto& t : max->thresholds) o.detail << " " << t.cluster_size_threshold;
      for (std::size_t k = 1; k < max->thresholds.size(); ++k) {
        o.require(max->thresholds[k].cluster_size_threshold <= max->thresholds[k - 1].cluster_size_threshold,
                  "non-decreasing in p");
      }
      std::vector<double> ps, sizes;
      for (const auto& t : max->thresholds) {
        ps.push_back(t.p_threshold);
        sizes.push_back(static_cast<double>(t.cluster_size_threshold));
      }
      const LogLogFit fit = loglog_fit(ps, sizes);
      o.detail << "; log-log R^2=" << num(fit.r_squared) << " over " << fit.points << " points";
      o.require(fit.points == ps.size(), "every threshold positive");
      o.require(fit.r_squared >= 0.9, "R^2 >= 0.9");
    } else {
      o.require(false, "max-cluster mode evaluated");
    }
    report(3, "threshold curve", o);
  }

  const ThresholdEvaluation* strict = max ? at_p(*max, strictest) : nullptr;
  {
    Outcome o;
    o.require(app_config.synth.score_noise_sd == 0.0, "noise-free scores");
    o.require(strict && strict->recovery.has_value(), "recovery at strictest p");
    if (strict && strict->recovery) {
      const auto& m = *strict->recovery;
      o.detail << " p=" << format_p(strictest) << " sensitivity=" << num(m.sensitivity)
               << " spill_over=" << num(m.spill_over) << " (detected " << m.detected_voxels << ", roi " << m.roi_voxels
               << ")";
      o.require(m.sensitivity >= 0.8, "sensitivity >= 0.8");
      o.require(m.spill_over > 1.0, "spill-over > 1");
    }
    report(4, "recovery and spill-over", o);
  }

  {
    Outcome o;
    o.require(r.fwer_recovery.has_value() && strict && strict->recovery.has_value(), "both recoveries available");
    if (r.fwer_recovery && strict && strict->recovery) {
      o.detail << " fwer t>" << num(r.fwer_t_threshold) << " dice=" << num(r.fwer_recovery->dice)
               << " vs cluster dice=" << num(strict->recovery->dice);
      o.require(r.fwer_recovery->dice > strict->recovery->dice, "FWER Dice > cluster Dice");
    }
    report(5, "FWER vs cluster correction", o);
  }

  // Criterion 7 is reported after the oracle suites to keep the numbering in order.
  Overrides one;
  one.threads = 1;
  cmd_run(work / "cohort", config, work / "run_t1", one);
}

void oracle_criteria() {
  Outcome o;
  std::mt19937_64 rng(2024);

  // (a) connected components
  std::size_t masks = 0, mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const BinaryMask m = testing_support::random_mask(testing_support::cube(8), 0.1 + 0.005 * i, rng);
    for (int neighbors : {6, 18, 26}) {
      const auto got = label_components(m, connectivity_from_int(neighbors));
      const auto ref = oracle::flood_fill(m, neighbors);
      ++masks;
      if (got.labels != ref.labels || got.sizes != ref.sizes) ++mismatches;
    }
  }
  o.detail << " (a) " << masks - mismatches << "/" << masks << " labelings exact;";
  o.require(mismatches == 0, "(a) labeling");

  // (b) voxel t-values
  double worst_t = 0.0;
  std::size_t compared = 0;
  bool masks_agree = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Cohort c = seed % 2 ? testing_support::random_cohort(testing_support::cube(8), 10 + seed, 0.3, seed)
                              : testing_support::blob_cohort(testing_support::cube(8), 10 + seed, seed);
    for (int min_lesion : {1, 2, 3}) {
      const StatMap map = voxelwise_t(c, min_lesion);
      const auto ref = oracle::direct_t(c, min_lesion);
      for (std::size_t v = 0; v < map.t.size(); ++v) {
        masks_agree &= map.analyzable[v] == static_cast<bool>(ref.analyzable[v]);
        if (!map.analyzable[v] || !ref.analyzable[v]) continue;
        worst_t = std::max(worst_t, std::abs(map.t[v] - ref.t[v]));
        ++compared;
      }
    }
  }
  o.detail << " (b) max |dt|=" << num(worst_t) << " over " << compared << " voxels;";
  o.require(masks_agree && worst_t <= 1e-10, "(b) t-values");

  // (c) t to p
  double worst_p = 0.0;
  for (int df : {1, 2, 3, 5, 10, 20, 58, 200}) {
    for (double t = -10.0; t <= 30.0; t += 0.37) {
      worst_p = std::max(worst_p, std::abs(t_to_p(t, df, Tail::kGreater) - oracle::upper_tail(t, df)));
    }
  }
  o.detail << " (c) max |dp|=" << num(worst_p) << ";";
  o.require(worst_p <= 1e-8, "(c) t_to_p");

  // (d) BH FDR
  bool bh_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(1, 300);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(static_cast<std::size_t>(len(rng)));
    for (auto& x : p) x = trial % 3 == 0 ? std::pow(u(rng), 4.0) : u(rng);
    for (double q : {0.01, 0.05, 0.2}) {
      const FdrResult got = fdr_bh(p, q);
      const auto ref = oracle::benjamini_hochberg(p, q);
      std::vector<bool> got_reject(got.reject.begin(), got.reject.end());
      bh_ok &= got_reject == ref.reject && got.cutoff == ref.cutoff;
    }
  }
  o.detail << " (d) BH " << (bh_ok ? "exact" : "mismatch") << ";";
  o.require(bh_ok, "(d) BH");

  // (e) percentile
  bool pct_ok = true;
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> len(1, 1000), value(0, trial % 2 ? 4 : 5000);
    std::vector<double> s(static_cast<std::size_t>(len(rng)));
    for (auto& x : s) x = value(rng);
    for (double alpha : {0.05, 0.01, 0.1}) pct_ok &= percentile_threshold(s, alpha) == oracle::percentile_by_scan(s, alpha);
  }
  o.detail << " (e) percentile " << (pct_ok ? "exact" : "mismatch");
  o.require(pct_ok, "(e) percentile");
  report(6, "oracle equivalence", o);
}

void determinism_criterion(const fs::path& work) {
  Outcome o;
  const fs::path a = work / "run_t1", b = work / "run_t8";
  std::vector<fs::path> files;
  for (NullMode mode : {NullMode::kMaxCluster, NullMode::kAllClusters}) {
    files.push_back(RunFiles::thresholds_json(mode));
    files.push_back(RunFiles::thresholds_csv(mode));
  }
  files.push_back(RunFiles::kFwer);
  for (const auto& e : fs::directory_iterator(b / RunFiles::kCorrectedDir)) {
    files.push_back(fs::path(RunFiles::kCorrectedDir) / e.path().filename());
  }
  std::size_t identical = 0;
  for (const auto& f : files) {
    if (same_bytes(a / f, b / f)) {
      ++identical;
    } else {
      o.require(false, f.generic_string());
    }
  }
  o.detail << " threads 1 vs 8: " << identical << "/" << files.size() << " files byte-identical";
  o.require(files.size() >= 17, "all threshold tables and corrected maps present");
  report(7, "determinism", o);
}

void format_criterion(const fs::path& work) {
  Outcome o;
  // Round trips.
  std::mt19937_64 rng(8);
  const auto g = VolumeGeometry({7, 5, 3}, {1.5, 2.0, 2.5}, {-10.0, 4.0, 0.5});
  const BinaryMask m = testing_support::random_mask(g, 0.4, rng);
  nifti::write(m, work / "mask.nii");
  nifti::write(m, work / "mask.nii.gz");
  std::vector<double> values(g.voxel_count());
  std::normal_distribution<float> normal;
  for (auto& v : values) v = normal(rng);
  nifti::write_float(g, values, work / "float.nii");
  const auto back = nifti::read(work / "float.nii").as_double();
  const bool round_trip = nifti::read_mask(work / "mask.nii") == m && nifti::read_mask(work / "mask.nii.gz") == m &&
                          back == values && nifti::read(work / "mask.nii").geometry.compatible(g);
  o.detail << " round trip " << (round_trip ? "exact" : "mismatch") << ";";
  o.require(round_trip, "round trip");

  // Handcrafted fixture read by the library.
  oracle::NiftiFields f;
  f.dim[0] = 3;
  f.dim[1] = 4;
  f.dim[2] = 3;
  f.dim[3] = 2;
  f.datatype = 2;
  f.bitpix = 8;
  f.pixdim[1] = 1.25f;
  f.pixdim[2] = 2.5f;
  f.pixdim[3] = 3.0f;
  std::vector<std::uint8_t> voxels(24);
  for (std::size_t i = 0; i < voxels.size(); ++i) voxels[i] = (i * 7) % 3 == 0;
  oracle::write_bytes((work / "fixture.nii").string(), oracle::image_bytes(f, voxels));
  const BinaryMask fixture = nifti::read_mask(work / "fixture.nii");
  bool fixture_ok = fixture.geometry().dims == std::array<std::int32_t, 3>{4, 3, 2} &&
                    fixture.geometry().spacing == std::array<double, 3>{1.25, 2.5, 3.0};
  for (std::size_t i = 0; i < voxels.size(); ++i) fixture_ok &= fixture[i] == (voxels[i] != 0);

  // Emitted masks read back byte by byte, without the library.
  const auto bytes = oracle::read_bytes((work / "run_t8" / RunFiles::kFwer).string());
  const VolumeGeometry run_g = nifti::read_mask(work / "cohort" / CohortFiles::kRoi).geometry();
  bool emitted_ok = bytes.size() >= 352 && oracle::get<std::int32_t>(bytes, 0) == 348;
  if (emitted_ok) {
    for (int i = 0; i < 3; ++i) {
      emitted_ok &= oracle::get<std::int16_t>(bytes, 40 + 2 * (i + 1)) == run_g.dims[i];
      emitted_ok &= oracle::get<float>(bytes, 76 + 4 * (i + 1)) == static_cast<float>(run_g.spacing[i]);
    }
    emitted_ok &= bytes.size() == static_cast<std::size_t>(oracle::get<float>(bytes, 108)) + run_g.voxel_count();
  }
  o.detail << " handcrafted fixture " << (fixture_ok ? "ok" : "mismatch") << "; emitted mask header "
           << (emitted_ok ? "ok" : "mismatch");
  o.require(fixture_ok, "handcrafted fixture");
  o.require(emitted_ok, "emitted mask read independently");

#ifdef VLSM_PYTHON
  const std::string cmd = std::string("\"") + VLSM_PYTHON + "\" \"" + VLSM_PY_READER + "\" --check-file \"" +
                          (work / "run_t8" / RunFiles::kFwer).string() + "\" " + std::to_string(run_g.dims[0]) + " " +
                          std::to_string(run_g.dims[1]) + " " + std::to_string(run_g.dims[2]) + " " +
                          std::to_string(run_g.spacing[0]) + " " + std::to_string(run_g.spacing[1]) + " " +
                          std::to_string(run_g.spacing[2]) + " > /dev/null";
  const bool py_ok = std::system(cmd.c_str()) == 0;
  o.detail << "; python reader " << (py_ok ? "ok" : "mismatch");
  o.require(py_ok, "python reader");
#endif
  report(8, "format fidelity", o);
}

}  // namespace

int main() {
  testing_support::TempDir work("acceptance");
  try {
    scenario_criteria(work.path());
    oracle_criteria();
    determinism_criterion(work.path());
    format_criterion(work.path());
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
