#pragma once

#include <filesystem>
#include <string>

#include "vlsm/permute.hpp"

namespace vlsm {

/// JSON documents for null distributions and threshold tables.
///
/// Null distribution:
///   { "schema": "vlsm.null/1", "mode", "n_permutations", "first_permutation",
///     "config": {...}, "max_t_samples": [...],
///     "thresholds": [ { "p_threshold", "cluster_samples": [...],
///                       "permutation_offsets": [...],   // all-clusters only
///                       "summary": {count, mean, median, q95, max} } ] }
///
/// Threshold table:
///   { "schema": "vlsm.thresholds/1", "mode", "alpha", "n_permutations",
///     "config": {...}, "fwer_t_threshold", "max_t_summary": {...},
///     "entries": [ { "p_threshold", "cluster_size_threshold", "null_summary" } ] }
///
/// "config" carries n_permutations, p_thresholds, alpha, mode, connectivity
/// (6/18/26), tail ("greater"/"two-sided"), min_lesion and master_seed.
/// Doubles are printed with round-trip precision, so equal inputs give
/// byte-identical documents.
std::string to_json(const PermutationConfig& config);
PermutationConfig config_from_json(const std::string& text);

std::string to_json(const NullDistribution& null);
NullDistribution null_from_json(const std::string& text);

std::string to_json(const ThresholdTable& table);
ThresholdTable table_from_json(const std::string& text);

/// CSV rows: permutation_index,p_threshold,cluster_size (index is the 1-based stream index).
void write_cluster_csv(const NullDistribution& null, const std::filesystem::path& path);
/// CSV rows: p_threshold,cluster_size_threshold,fwer_t_threshold.
void write_threshold_csv(const ThresholdTable& table, const std::filesystem::path& path);

/// Formats a p-threshold for file names and CSV cells ("0.0001", "5e-05").
std::string format_p(double p);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vlsm
