#include "vlsm/permute_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vlsm/error.hpp"

namespace vlsm {
namespace {

using nlohmann::ordered_json;

ordered_json config_json(const PermutationConfig& c) {
  return ordered_json{{"n_permutations", c.n_permutations},
                      {"p_thresholds", c.p_thresholds},
                      {"alpha", c.alpha},
                      {"mode", to_string(c.mode)},
                      {"connectivity", static_cast<int>(c.connectivity)},
                      {"tail", to_string(c.tail)},
                      {"min_lesion", c.min_lesion},
                      {"master_seed", c.master_seed}};
}

PermutationConfig config_from(const ordered_json& j) {
  PermutationConfig c;
  c.n_permutations = j.at("n_permutations").get<std::size_t>();
  c.p_thresholds = j.at("p_thresholds").get<std::vector<double>>();
  c.alpha = j.at("alpha").get<double>();
  c.mode = null_mode_from_string(j.at("mode").get<std::string>());
  c.connectivity = connectivity_from_int(j.at("connectivity").get<int>());
  c.tail = tail_from_string(j.at("tail").get<std::string>());
  c.min_lesion = j.at("min_lesion").get<int>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  return c;
}

ordered_json summary_json(const SampleSummary& s) {
  return ordered_json{{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"q95", s.q95}, {"max", s.max}};
}

SampleSummary summary_from(const ordered_json& j) {
  SampleSummary s;
  s.count = j.at("count").get<std::size_t>();
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.q95 = j.at("q95").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

ordered_json parse(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

std::string to_json(const PermutationConfig& config) { return config_json(config).dump(2); }

PermutationConfig config_from_json(const std::string& text) {
  const auto j = parse(text, "permutation config");
  return guarded("permutation config", [&] { return config_from(j); });
}

std::string to_json(const NullDistribution& null) {
  ordered_json thresholds = ordered_json::array();
  for (const auto& ts : null.thresholds) {
    ordered_json t{{"p_threshold", ts.p_threshold}, {"cluster_samples", ts.cluster_samples}};
    if (null.config.mode == NullMode::kAllClusters) t["permutation_offsets"] = ts.permutation_offsets;
    const std::vector<double> samples(ts.cluster_samples.begin(), ts.cluster_samples.end());
    t["summary"] = summary_json(summarize(samples));
    thresholds.push_back(std::move(t));
  }
  ordered_json j{{"schema", "vlsm.null/1"},
                 {"mode", to_string(null.config.mode)},
                 {"n_permutations", null.n_permutations()},
                 {"first_permutation", null.first_permutation},
                 {"config", config_json(null.config)},
                 {"max_t_samples", null.max_t_samples},
                 {"thresholds", std::move(thresholds)}};
  return j.dump(2);
}

NullDistribution null_from_json(const std::string& text) {
  const auto j = parse(text, "null distribution");
  return guarded("null distribution", [&] {
    NullDistribution null;
    null.config = config_from(j.at("config"));
    null.first_permutation = j.at("first_permutation").get<std::uint64_t>();
    null.max_t_samples = j.at("max_t_samples").get<std::vector<double>>();
    const std::size_t n = null.max_t_samples.size();
    for (const auto& t : j.at("thresholds")) {
      ThresholdSamples ts;
      ts.p_threshold = t.at("p_threshold").get<double>();
      ts.cluster_samples = t.at("cluster_samples").get<std::vector<std::uint64_t>>();
      if (null.config.mode == NullMode::kAllClusters) {
        ts.permutation_offsets = t.at("permutation_offsets").get<std::vector<std::size_t>>();
      } else {
        ts.permutation_offsets.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) ts.permutation_offsets[i] = i;
      }
      if (ts.permutation_offsets.size() != n + 1 || ts.permutation_offsets.back() != ts.cluster_samples.size()) {
        throw InputError("null distribution: inconsistent permutation grouping at p = " + format_p(ts.p_threshold));
      }
      null.thresholds.push_back(std::move(ts));
    }
    return null;
  });
}

std::string to_json(const ThresholdTable& table) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : table.entries) {
    entries.push_back(ordered_json{{"p_threshold", e.p_threshold},
                                   {"cluster_size_threshold", e.cluster_size_threshold},
                                   {"null_summary", summary_json(e.null_summary)}});
  }
  ordered_json j{{"schema", "vlsm.thresholds/1"},
                 {"mode", to_string(table.config.mode)},
                 {"alpha", table.alpha},
                 {"n_permutations", table.n_permutations},
                 {"config", config_json(table.config)},
                 {"fwer_t_threshold", table.fwer_t_threshold},
                 {"max_t_summary", summary_json(table.max_t_summary)},
                 {"entries", std::move(entries)}};
  return j.dump(2);
}

ThresholdTable table_from_json(const std::string& text) {
  const auto j = parse(text, "threshold table");
  return guarded("threshold table", [&] {
    ThresholdTable table;
    table.config = config_from(j.at("config"));
    table.alpha = j.at("alpha").get<double>();
    table.n_permutations = j.at("n_permutations").get<std::size_t>();
    table.fwer_t_threshold = j.at("fwer_t_threshold").get<double>();
    table.max_t_summary = summary_from(j.at("max_t_summary"));
    for (const auto& e : j.at("entries")) {
      ThresholdEntry entry;
      entry.p_threshold = e.at("p_threshold").get<double>();
      entry.cluster_size_threshold = e.at("cluster_size_threshold").get<std::uint64_t>();
      entry.null_summary = summary_from(e.at("null_summary"));
      table.entries.push_back(entry);
    }
    return table;
  });
}

void write_cluster_csv(const NullDistribution& null, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "permutation_index,p_threshold,cluster_size\n";
  for (std::size_t i = 0; i < null.n_permutations(); ++i) {
    for (const auto& ts : null.thresholds) {
      for (std::uint64_t size : ts.permutation(i)) {
        out << (null.first_permutation + i) << ',' << format_p(ts.p_threshold) << ',' << size << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

void write_threshold_csv(const ThresholdTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "p_threshold,cluster_size_threshold,fwer_t_threshold\n";
  for (const auto& e : table.entries) {
    out << format_p(e.p_threshold) << ',' << e.cluster_size_threshold << ',' << table.fwer_t_threshold << '\n';
  }
  write_text_file(path, out.str());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace vlsm
