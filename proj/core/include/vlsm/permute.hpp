#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vlsm/cluster.hpp"
#include "vlsm/rng.hpp"
#include "vlsm/stats.hpp"
#include "vlsm/volume.hpp"

namespace vlsm {

/// How cluster sizes from each permutation enter the null distribution.
/// kAllClusters pools every cluster of every permutation; it does not
/// control the family-wise rate and is kept for demonstration.
/// kMaxCluster keeps only the largest cluster (0 when there is none).
enum class NullMode { kAllClusters, kMaxCluster };

std::string to_string(NullMode mode);
NullMode null_mode_from_string(const std::string& text);
std::string to_string(Tail tail);
Tail tail_from_string(const std::string& text);

inline const std::vector<double> kDefaultPThresholds{0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};

struct PermutationConfig {
  std::size_t n_permutations = 1000;
  std::vector<double> p_thresholds = kDefaultPThresholds;  // strictly decreasing
  double alpha = 0.05;
  NullMode mode = NullMode::kMaxCluster;
  Connectivity connectivity = Connectivity::kCorner26;
  Tail tail = Tail::kGreater;
  int min_lesion = 2;
  std::uint64_t master_seed = 0;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

/// Stream for permutation `index` (1-based) under `master_seed`.
RngStream permutation_stream(std::uint64_t master_seed, std::uint64_t index);

/// Fisher-Yates shuffle: for i = n-1 down to 1, swap i with uniform j in [0, i].
std::vector<double> permute_scores(std::span<const double> scores, RngStream& rng);

/// Cluster-size samples at one p-threshold. Samples of permutation i
/// (0-based within the distribution) are
/// cluster_samples[permutation_offsets[i] .. permutation_offsets[i+1]).
struct ThresholdSamples {
  double p_threshold = 0.0;
  std::vector<std::uint64_t> cluster_samples;
  std::vector<std::size_t> permutation_offsets;

  std::span<const std::uint64_t> permutation(std::size_t i) const {
    return std::span<const std::uint64_t>(cluster_samples)
        .subspan(permutation_offsets[i], permutation_offsets[i + 1] - permutation_offsets[i]);
  }
};

struct NullDistribution {
  PermutationConfig config;  // config.mode is the mode of these samples
  std::uint64_t first_permutation = 1;
  std::vector<ThresholdSamples> thresholds;  // config.p_thresholds order
  std::vector<double> max_t_samples;         // one per permutation; |t| when two-sided

  std::size_t n_permutations() const { return max_t_samples.size(); }
};

struct BuildOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  /// Index of the first permutation stream; an audit batch starts after the build batch.
  std::uint64_t first_permutation = 1;
};

/// Runs config.n_permutations permutations of the cohort's scores. Every
/// p-threshold is evaluated within the same permutations. Output is
/// independent of `options.threads`. Throws ConfigError for an invalid
/// config (including zero permutations) and NumericError when the cohort
/// has no analyzable voxel.
NullDistribution build_null(const Cohort& cohort, const PermutationConfig& config, const BuildOptions& options = {});

/// Max-cluster distribution from an all-clusters one over the same permutations.
NullDistribution reduce_to_max_cluster(const NullDistribution& all_clusters);

/// Order statistic at rank ceil((1 - alpha) * n) (1-based) of the sorted
/// samples. A statistic passes iff strictly greater. Throws ConfigError on
/// empty samples or alpha outside (0,1).
double percentile_threshold(std::span<const double> samples, double alpha);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};
SampleSummary summarize(std::span<const double> samples);

struct ThresholdEntry {
  double p_threshold = 0.0;
  std::uint64_t cluster_size_threshold = 0;
  SampleSummary null_summary;
};

struct ThresholdTable {
  PermutationConfig config;  // echo, config.mode gives the null mode
  double alpha = 0.05;
  std::size_t n_permutations = 0;
  std::vector<ThresholdEntry> entries;
  double fwer_t_threshold = 0.0;
  SampleSummary max_t_summary;
};

ThresholdTable derive_thresholds(const NullDistribution& null, double alpha);

struct CorrectedThreshold {
  double p_threshold = 0.0;
  std::uint64_t cluster_size_threshold = 0;
  SuprathresholdMask suprathreshold;
  ClusterLabeling clusters;   // every suprathreshold cluster
  ClusterLabeling surviving;  // clusters with size > cluster_size_threshold
};

struct CorrectedResult {
  std::vector<CorrectedThreshold> per_threshold;
  double fwer_t_threshold = 0.0;
  BinaryMask fwer_mask;
  ThresholdTable provenance;
};

/// Throws InputError when the table does not match the map or config.
CorrectedResult apply_correction(const StatMap& map, const ThresholdTable& table, const PermutationConfig& config);

/// Per p-threshold: fraction of the null's permutations with at least one
/// cluster larger than the table's threshold.
std::vector<double> false_positive_rate(const NullDistribution& null, const ThresholdTable& table);

/// Fraction of the null's permutations whose maximum t exceeds `fwer_t_threshold`.
double fwer_false_positive_rate(const NullDistribution& null, double fwer_t_threshold);

}  // namespace vlsm
