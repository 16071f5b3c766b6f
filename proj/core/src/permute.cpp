#include "vlsm/permute.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "vlsm/error.hpp"

namespace vlsm {
namespace {

// Stream ids for permutations live in their own domain.
constexpr std::uint64_t kPermutationDomain = 0x5045524D55544531ULL;  // "PERMUTE1"

struct PermutationOutcome {
  double max_t = 0.0;
  std::vector<std::vector<std::uint64_t>> sizes;  // per threshold, label order
};

class PermutationWorker {
 public:
  PermutationWorker(const LesionDesign& design, std::span<const double> scores, const PermutationConfig& config)
      : design_(design), scores_(scores), config_(config), labeler_(design.geometry(), config.connectivity) {
    for (double p : config.p_thresholds) cutoffs_.emplace_back(p, design.df(), config.tail);
  }

  PermutationOutcome run(std::uint64_t index) {
    RngStream rng = permutation_stream(config_.master_seed, index);
    const std::vector<double> permuted = permute_scores(scores_, rng);
    design_.compact_t(permuted, sum_, sum_sq_, t_);

    PermutationOutcome out;
    bool any = false;
    double best = -std::numeric_limits<double>::infinity();
    for (double t : t_) {
      if (std::isnan(t)) continue;
      const double stat = config_.tail == Tail::kTwoSided ? std::abs(t) : t;
      best = std::max(best, stat);
      any = true;
    }
    out.max_t = any ? best : 0.0;

    const auto voxels = design_.analyzable_voxels();
    out.sizes.resize(cutoffs_.size());
    for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
      foreground_.clear();
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!std::isnan(t_[i]) && cutoffs_[k].passes(t_[i])) foreground_.push_back(voxels[i]);
      }
      labeler_.sizes_from_voxels(foreground_, sizes_);
      out.sizes[k].assign(sizes_.begin(), sizes_.end());
    }
    return out;
  }

 private:
  const LesionDesign& design_;
  std::span<const double> scores_;
  const PermutationConfig& config_;
  ComponentLabeler labeler_;
  std::vector<PThresholdCutoff> cutoffs_;
  std::vector<double> sum_, sum_sq_, t_;
  std::vector<std::size_t> foreground_;
  std::vector<std::size_t> sizes_;
};

double rank_statistic(std::vector<double> sorted, double alpha) {
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // The epsilon keeps exact products such as 0.95 * 100 from rounding up a rank.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> as_doubles(std::span<const std::uint64_t> values) {
  return std::vector<double>(values.begin(), values.end());
}

}  // namespace

std::string to_string(NullMode mode) { return mode == NullMode::kAllClusters ? "all-clusters" : "max-cluster"; }

NullMode null_mode_from_string(const std::string& text) {
  if (text == "all-clusters") return NullMode::kAllClusters;
  if (text == "max-cluster") return NullMode::kMaxCluster;
  throw ConfigError("mode must be 'max-cluster' or 'all-clusters', got '" + text + "'");
}

std::string to_string(Tail tail) { return tail == Tail::kGreater ? "greater" : "two-sided"; }

Tail tail_from_string(const std::string& text) {
  if (text == "greater") return Tail::kGreater;
  if (text == "two-sided") return Tail::kTwoSided;
  throw ConfigError("tail must be 'greater' or 'two-sided', got '" + text + "'");
}

void PermutationConfig::validate() const {
  if (n_permutations == 0) throw ConfigError("no permutations: n_permutations must be >= 1");
  if (p_thresholds.empty()) throw ConfigError("p_thresholds must be nonempty");
  for (std::size_t i = 0; i < p_thresholds.size(); ++i) {
    const double p = p_thresholds[i];
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("p_thresholds must lie in (0,1), got " + std::to_string(p));
    if (i > 0 && !(p < p_thresholds[i - 1])) {
      throw ConfigError("p_thresholds must be unique and strictly decreasing");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1), got " + std::to_string(alpha));
  if (min_lesion < 1) throw ConfigError("min_lesion must be >= 1");
}

RngStream permutation_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed ^ kPermutationDomain, index);
}

std::vector<double> permute_scores(std::span<const double> scores, RngStream& rng) {
  std::vector<double> out(scores.begin(), scores.end());
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

NullDistribution build_null(const Cohort& cohort, const PermutationConfig& config, const BuildOptions& options) {
  config.validate();
  const LesionDesign design(cohort, config.min_lesion);
  if (design.analyzable_voxels().empty()) {
    throw NumericError("build_null: no analyzable voxels (min_lesion = " + std::to_string(config.min_lesion) + ")");
  }

  const std::size_t n = config.n_permutations;
  std::vector<PermutationOutcome> outcomes(n);
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      PermutationWorker worker(design, cohort.scores(), config);
      for (std::size_t i = next++; i < n; i = next++) outcomes[i] = worker.run(options.first_permutation + i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  NullDistribution null;
  null.config = config;
  null.config.mode = NullMode::kAllClusters;
  null.first_permutation = options.first_permutation;
  null.max_t_samples.reserve(n);
  for (const auto& o : outcomes) null.max_t_samples.push_back(o.max_t);
  null.thresholds.resize(config.p_thresholds.size());
  for (std::size_t k = 0; k < config.p_thresholds.size(); ++k) {
    auto& ts = null.thresholds[k];
    ts.p_threshold = config.p_thresholds[k];
    ts.permutation_offsets.reserve(n + 1);
    ts.permutation_offsets.push_back(0);
    for (const auto& o : outcomes) {
      ts.cluster_samples.insert(ts.cluster_samples.end(), o.sizes[k].begin(), o.sizes[k].end());
      ts.permutation_offsets.push_back(ts.cluster_samples.size());
    }
  }
  return config.mode == NullMode::kMaxCluster ? reduce_to_max_cluster(null) : null;
}

NullDistribution reduce_to_max_cluster(const NullDistribution& all_clusters) {
  if (all_clusters.config.mode == NullMode::kMaxCluster) return all_clusters;
  NullDistribution out = all_clusters;
  out.config.mode = NullMode::kMaxCluster;
  const std::size_t n = all_clusters.n_permutations();
  for (auto& ts : out.thresholds) {
    std::vector<std::uint64_t> maxima(n, 0);
    std::vector<std::size_t> offsets(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto group = ts.permutation(i);
      if (!group.empty()) maxima[i] = *std::max_element(group.begin(), group.end());
      offsets[i + 1] = i + 1;
    }
    ts.cluster_samples = std::move(maxima);
    ts.permutation_offsets = std::move(offsets);
  }
  return out;
}

double percentile_threshold(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw ConfigError("percentile_threshold: empty samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("percentile_threshold: alpha must lie in (0,1)");
  return rank_statistic(std::vector<double>(samples.begin(), samples.end()), alpha);
}

SampleSummary summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  s.median = rank_statistic(sorted, 0.5);
  s.q95 = rank_statistic(sorted, 0.05);
  s.max = sorted.back();
  return s;
}

ThresholdTable derive_thresholds(const NullDistribution& null, double alpha) {
  if (null.n_permutations() == 0) throw ConfigError("derive_thresholds: no permutations");
  ThresholdTable table;
  table.config = null.config;
  table.config.alpha = alpha;
  table.alpha = alpha;
  table.n_permutations = null.n_permutations();
  for (const auto& ts : null.thresholds) {
    const std::vector<double> samples = as_doubles(ts.cluster_samples);
    ThresholdEntry entry;
    entry.p_threshold = ts.p_threshold;
    entry.null_summary = summarize(samples);
    // An all-clusters null with no clusters at all behaves like an all-zero max-cluster null.
    entry.cluster_size_threshold =
        samples.empty() ? 0 : static_cast<std::uint64_t>(percentile_threshold(samples, alpha));
    table.entries.push_back(entry);
  }
  table.fwer_t_threshold = percentile_threshold(null.max_t_samples, alpha);
  table.max_t_summary = summarize(null.max_t_samples);
  return table;
}

CorrectedResult apply_correction(const StatMap& map, const ThresholdTable& table, const PermutationConfig& config) {
  if (table.entries.size() != config.p_thresholds.size()) {
    throw InputError("apply_correction: threshold table has " + std::to_string(table.entries.size()) +
                     " entries for " + std::to_string(config.p_thresholds.size()) + " p-thresholds");
  }
  require_compatible(map.geometry, map.analyzable.geometry(), "apply_correction");
  if (map.t.size() != map.geometry.voxel_count()) throw InputError("apply_correction: stat map size mismatch");

  CorrectedResult result;
  result.provenance = table;
  result.fwer_t_threshold = table.fwer_t_threshold;
  for (std::size_t k = 0; k < table.entries.size(); ++k) {
    const auto& entry = table.entries[k];
    if (entry.p_threshold != config.p_thresholds[k]) {
      throw InputError("apply_correction: table p-threshold " + std::to_string(entry.p_threshold) +
                       " does not match config " + std::to_string(config.p_thresholds[k]));
    }
    CorrectedThreshold ct;
    ct.p_threshold = entry.p_threshold;
    ct.cluster_size_threshold = entry.cluster_size_threshold;
    ct.suprathreshold = apply_p_threshold(map, entry.p_threshold, config.tail);
    ct.clusters = label_components(ct.suprathreshold.mask, config.connectivity);
    ct.surviving = filter_clusters(ct.clusters, entry.cluster_size_threshold);
    result.per_threshold.push_back(std::move(ct));
  }
  result.fwer_mask = BinaryMask(map.geometry);
  for (std::size_t v = 0; v < map.t.size(); ++v) {
    if (!map.analyzable[v]) continue;
    const double stat = config.tail == Tail::kTwoSided ? std::abs(map.t[v]) : map.t[v];
    if (stat > table.fwer_t_threshold) result.fwer_mask.set(v, true);
  }
  return result;
}

std::vector<double> false_positive_rate(const NullDistribution& null, const ThresholdTable& table) {
  if (table.entries.size() != null.thresholds.size()) {
    throw InputError("false_positive_rate: table and null have different p-threshold counts");
  }
  const std::size_t n = null.n_permutations();
  if (n == 0) throw ConfigError("false_positive_rate: no permutations");
  std::vector<double> rates;
  for (std::size_t k = 0; k < null.thresholds.size(); ++k) {
    const auto& ts = null.thresholds[k];
    const std::uint64_t limit = table.entries[k].cluster_size_threshold;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto group = ts.permutation(i);
      if (std::any_of(group.begin(), group.end(), [&](std::uint64_t s) { return s > limit; })) ++hits;
    }
    rates.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  return rates;
}

double fwer_false_positive_rate(const NullDistribution& null, double fwer_t_threshold) {
  if (null.n_permutations() == 0) throw ConfigError("fwer_false_positive_rate: no permutations");
  const auto hits = std::count_if(null.max_t_samples.begin(), null.max_t_samples.end(),
                                  [&](double t) { return t > fwer_t_threshold; });
  return static_cast<double>(hits) / static_cast<double>(null.n_permutations());
}

}  // namespace vlsm
