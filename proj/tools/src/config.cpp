#include "vlsm/app/config.hpp"

#include <set>

#include "json.hpp"
#include "vlsm/error.hpp"
#include "vlsm/permute_io.hpp"

namespace vlsm::app {
namespace {

using nlohmann::ordered_json;

void reject_unknown(const ordered_json& j, const std::set<std::string>& known, const std::string& section) {
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ConfigError("config: unknown key '" + section + "." + item.key() + "'");
  }
}

template <typename T>
void read_opt(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ModeSelection mode_selection_from_string(const std::string& text) {
  if (text == "max-cluster") return ModeSelection::kMaxCluster;
  if (text == "all-clusters") return ModeSelection::kAllClusters;
  if (text == "both") return ModeSelection::kBoth;
  throw ConfigError("mode must be max-cluster, all-clusters or both, got '" + text + "'");
}

std::string to_string(ModeSelection modes) {
  switch (modes) {
    case ModeSelection::kMaxCluster: return "max-cluster";
    case ModeSelection::kAllClusters: return "all-clusters";
    case ModeSelection::kBoth: return "both";
  }
  return "both";
}

AppConfig AppConfig::from_json(const std::string& text) {
  AppConfig config;
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, {"synth", "analysis"}, "config");
  try {
    if (root.contains("synth")) {
      const auto& s = root.at("synth");
      reject_unknown(s,
                     {"dims", "spacing", "origin", "brain_center", "brain_radii", "roi_lo", "roi_hi", "n_subjects",
                      "lesion_size_range", "growth_bias", "score_noise_sd", "seed"},
                     "synth");
      auto& out = config.synth;
      read_opt(s, "dims", out.dims);
      read_opt(s, "spacing", out.spacing);
      read_opt(s, "origin", out.origin);
      read_opt(s, "brain_center", out.brain_center);
      read_opt(s, "brain_radii", out.brain_radii);
      read_opt(s, "roi_lo", out.roi_lo);
      read_opt(s, "roi_hi", out.roi_hi);
      read_opt(s, "n_subjects", out.n_subjects);
      if (s.contains("lesion_size_range")) {
        const auto range = s.at("lesion_size_range").get<std::array<std::size_t, 2>>();
        out.min_lesion_voxels = range[0];
        out.max_lesion_voxels = range[1];
      }
      read_opt(s, "growth_bias", out.growth_bias);
      read_opt(s, "score_noise_sd", out.score_noise_sd);
      read_opt(s, "seed", out.seed);
    }
    if (root.contains("analysis")) {
      const auto& a = root.at("analysis");
      reject_unknown(a,
                     {"n_permutations", "n_audit_permutations", "p_thresholds", "alpha", "mode", "connectivity", "tail",
                      "min_lesion", "master_seed", "fdr_q"},
                     "analysis");
      auto& out = config.analysis;
      read_opt(a, "n_permutations", out.permutation.n_permutations);
      read_opt(a, "n_audit_permutations", out.n_audit_permutations);
      read_opt(a, "p_thresholds", out.permutation.p_thresholds);
      read_opt(a, "alpha", out.permutation.alpha);
      if (a.contains("mode")) out.modes = mode_selection_from_string(a.at("mode").get<std::string>());
      if (a.contains("connectivity")) out.permutation.connectivity = connectivity_from_int(a.at("connectivity").get<int>());
      if (a.contains("tail")) out.permutation.tail = tail_from_string(a.at("tail").get<std::string>());
      read_opt(a, "min_lesion", out.permutation.min_lesion);
      read_opt(a, "master_seed", out.permutation.master_seed);
      read_opt(a, "fdr_q", out.fdr_q);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  config.analysis.permutation.validate();
  if (!(config.analysis.fdr_q > 0.0 && config.analysis.fdr_q < 1.0)) throw ConfigError("analysis.fdr_q must lie in (0,1)");
  return config;
}

AppConfig AppConfig::from_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const InputError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_json(text);
}

std::string AppConfig::to_json() const {
  const auto& s = synth;
  const auto& a = analysis;
  ordered_json j{
      {"synth",
       {{"dims", s.dims},
        {"spacing", s.spacing},
        {"origin", s.origin},
        {"brain_center", s.brain_center},
        {"brain_radii", s.brain_radii},
        {"roi_lo", s.roi_lo},
        {"roi_hi", s.roi_hi},
        {"n_subjects", s.n_subjects},
        {"lesion_size_range", {s.min_lesion_voxels, s.max_lesion_voxels}},
        {"growth_bias", s.growth_bias},
        {"score_noise_sd", s.score_noise_sd},
        {"seed", s.seed}}},
      {"analysis",
       {{"n_permutations", a.permutation.n_permutations},
        {"n_audit_permutations", a.n_audit_permutations},
        {"p_thresholds", a.permutation.p_thresholds},
        {"alpha", a.permutation.alpha},
        {"mode", to_string(a.modes)},
        {"connectivity", static_cast<int>(a.permutation.connectivity)},
        {"tail", vlsm::to_string(a.permutation.tail)},
        {"min_lesion", a.permutation.min_lesion},
        {"master_seed", a.permutation.master_seed},
        {"fdr_q", a.fdr_q}}}};
  return j.dump(2);
}

SyntheticCohortSpec to_cohort_spec(const SynthSection& s) {
  SyntheticCohortSpec spec;
  try {
    spec.geometry = VolumeGeometry(s.dims, s.spacing, s.origin);
  } catch (const InputError& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
  for (double r : s.brain_radii) {
    if (!(r > 0.0)) throw ConfigError("synth.brain_radii must be > 0");
  }
  spec.brain_mask = make_ellipsoid(spec.geometry, s.brain_center, s.brain_radii);
  spec.roi = make_box(spec.geometry, s.roi_lo, s.roi_hi);
  spec.n_subjects = s.n_subjects;
  spec.min_lesion_voxels = s.min_lesion_voxels;
  spec.max_lesion_voxels = s.max_lesion_voxels;
  spec.growth_bias = s.growth_bias;
  spec.score_noise_sd = s.score_noise_sd;
  spec.seed = s.seed;
  spec.validate();
  return spec;
}

}  // namespace vlsm::app
