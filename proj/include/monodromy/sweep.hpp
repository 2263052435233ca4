#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "monodromy/experiments.hpp"

namespace monodromy {

// Sweep configuration files are JSON objects; every key is optional and
// falls back to the spec defaults. Potentials are given as
// {"potential": "E" | "ord" | "omega", "lambda": L}; lambda values may be the
// string "inf".

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepKind { Efficiency, Threshold, Tracks, Lambda, Bounds };

inline SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "efficiency") return SweepKind::Efficiency;
  if (s == "threshold") return SweepKind::Threshold;
  if (s == "tracks") return SweepKind::Tracks;
  if (s == "lambda") return SweepKind::Lambda;
  if (s == "bounds") return SweepKind::Bounds;
  throw ConfigError("unknown sweep '" + s + "'");
}

inline const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::Efficiency: return "efficiency";
    case SweepKind::Threshold: return "threshold";
    case SweepKind::Tracks: return "tracks";
    case SweepKind::Lambda: return "lambda";
    case SweepKind::Bounds: return "bounds";
  }
  return "?";
}

namespace detail {

inline double lambda_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("lambda must be a number or \"inf\"");
  }
  return v.get<double>();
}

inline nlohmann::json lambda_to_json(double l) {
  if (std::isinf(l)) return "inf";
  return l;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_potential(const nlohmann::json& j, PotentialKind& out) {
  if (!j.contains("potential")) return;
  const double lambda = j.contains("lambda") ? lambda_from_json(j.at("lambda")) : 0.0;
  out = parse_potential(j.at("potential").get<std::string>(), lambda, j.value("normalize_by_max_known", false));
}

inline nlohmann::json potential_json(const PotentialKind& p) {
  nlohmann::json j = {{"potential", p.name()}};
  if (p.kind == PotentialKind::Kind::Weighted) {
    j["lambda"] = lambda_to_json(p.lambda);
    j["normalize_by_max_known"] = p.normalize_by_max_known;
  }
  return j;
}

}  // namespace detail

inline EfficiencySpec efficiency_spec_from_json(const nlohmann::json& j) {
  EfficiencySpec s;
  detail::read(j, "N", s.nodes);
  detail::read(j, "m", s.multiplicity);
  detail::read(j, "alpha", s.alpha);
  detail::read(j, "degrees", s.degrees);
  detail::read(j, "threads", s.threads);
  detail::read(j, "trials", s.trials);
  detail::read(j, "seed", s.seed);
  detail::read_potential(j, s.potential);
  s.validate();
  return s;
}

inline nlohmann::json to_json(const EfficiencySpec& s) {
  nlohmann::json j = {{"N", s.nodes}, {"m", s.multiplicity}, {"alpha", s.alpha}, {"degrees", s.degrees},
                      {"threads", s.threads}, {"trials", s.trials}, {"seed", s.seed}};
  j.update(detail::potential_json(s.potential));
  return j;
}

// A threshold sweep covers every (N, d, m) combination of its lists.
struct ThresholdSweepSpec {
  ThresholdSpec base;
  std::vector<std::uint32_t> nodes{4};
  std::vector<std::uint32_t> degrees{16};
  std::vector<std::uint32_t> multiplicities{1};
};

inline ThresholdSweepSpec threshold_spec_from_json(const nlohmann::json& j) {
  ThresholdSweepSpec s;
  if (j.contains("N")) s.nodes = j.at("N").is_array() ? j.at("N").get<std::vector<std::uint32_t>>()
                                                      : std::vector<std::uint32_t>{j.at("N").get<std::uint32_t>()};
  if (j.contains("d")) s.degrees = j.at("d").is_array() ? j.at("d").get<std::vector<std::uint32_t>>()
                                                        : std::vector<std::uint32_t>{j.at("d").get<std::uint32_t>()};
  if (j.contains("m")) s.multiplicities = j.at("m").is_array() ? j.at("m").get<std::vector<std::uint32_t>>()
                                                               : std::vector<std::uint32_t>{j.at("m").get<std::uint32_t>()};
  detail::read(j, "threads", s.base.threads);
  detail::read(j, "trials", s.base.trials);
  detail::read(j, "tolerance", s.base.tolerance);
  detail::read(j, "low", s.base.low);
  detail::read(j, "high", s.base.high);
  detail::read(j, "target", s.base.target);
  detail::read(j, "seed", s.base.seed);
  detail::read_potential(j, s.base.potential);
  s.base.validate();
  return s;
}

inline nlohmann::json to_json(const ThresholdSweepSpec& s) {
  nlohmann::json j = {{"N", s.nodes},         {"d", s.degrees},         {"m", s.multiplicities},
                      {"threads", s.base.threads}, {"trials", s.base.trials}, {"tolerance", s.base.tolerance},
                      {"low", s.base.low},     {"high", s.base.high},   {"target", s.base.target},
                      {"seed", s.base.seed}};
  j.update(detail::potential_json(s.base.potential));
  return j;
}

inline TracksSpec tracks_spec_from_json(const nlohmann::json& j) {
  TracksSpec s;
  detail::read(j, "N", s.nodes);
  detail::read(j, "d", s.degree);
  detail::read(j, "multiplicities", s.multiplicities);
  detail::read(j, "alphas", s.alphas);
  detail::read(j, "trials", s.trials);
  detail::read(j, "threads", s.threads);
  detail::read(j, "seed", s.seed);
  detail::read_potential(j, s.potential);
  s.validate();
  return s;
}

inline nlohmann::json to_json(const TracksSpec& s) {
  nlohmann::json j = {{"N", s.nodes},     {"d", s.degree},           {"multiplicities", s.multiplicities},
                      {"alphas", s.alphas}, {"trials", s.trials},     {"threads", s.threads},
                      {"seed", s.seed}};
  j.update(detail::potential_json(s.potential));
  return j;
}

inline LambdaSpec lambda_spec_from_json(const nlohmann::json& j) {
  LambdaSpec s;
  detail::read(j, "N", s.nodes);
  detail::read(j, "d", s.degree);
  detail::read(j, "m", s.multiplicity);
  if (j.contains("lambdas")) {
    s.lambdas.clear();
    for (const auto& v : j.at("lambdas")) s.lambdas.push_back(detail::lambda_from_json(v));
  }
  detail::read(j, "include_greedy", s.include_greedy);
  detail::read(j, "include_ordinal", s.include_ordinal);
  detail::read(j, "alphas", s.alphas);
  detail::read(j, "trials", s.trials);
  detail::read(j, "threads", s.threads);
  detail::read(j, "seed", s.seed);
  s.validate();
  return s;
}

inline nlohmann::json to_json(const LambdaSpec& s) {
  nlohmann::json lambdas = nlohmann::json::array();
  for (double l : s.lambdas) lambdas.push_back(detail::lambda_to_json(l));
  return {{"N", s.nodes},       {"d", s.degree},        {"m", s.multiplicity},
          {"lambdas", lambdas}, {"include_greedy", s.include_greedy}, {"include_ordinal", s.include_ordinal},
          {"alphas", s.alphas}, {"trials", s.trials},   {"threads", s.threads},
          {"seed", s.seed}};
}

inline BoundsSpec bounds_spec_from_json(const nlohmann::json& j) {
  BoundsSpec s;
  detail::read(j, "N", s.nodes);
  detail::read(j, "degrees", s.degrees);
  detail::read(j, "multiplicities", s.multiplicities);
  detail::read(j, "alphas", s.alphas);
  detail::read(j, "trials", s.trials);
  detail::read(j, "threads", s.threads);
  detail::read(j, "seed", s.seed);
  detail::read_potential(j, s.potential);
  s.validate();
  return s;
}

inline nlohmann::json to_json(const BoundsSpec& s) {
  nlohmann::json j = {{"N", s.nodes},     {"degrees", s.degrees}, {"multiplicities", s.multiplicities},
                      {"alphas", s.alphas}, {"trials", s.trials},   {"threads", s.threads},
                      {"seed", s.seed}};
  j.update(detail::potential_json(s.potential));
  return j;
}

inline CsvTable threshold_table(const std::vector<ThresholdSpec>& cells, const std::vector<ThresholdResult>& results) {
  CsvTable csv({"N", "d", "m", "threads", "potential", "trials", "tolerance", "target", "alpha_star", "low", "high",
                "probes", "seed"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    csv.add(c.nodes, c.degree, c.multiplicity, c.threads, c.potential.name(), c.trials, c.tolerance, c.target,
            r.alpha_star, r.low, r.high, r.probes.size(), c.seed);
  }
  return csv;
}

inline CsvTable threshold_probes_table(const std::vector<ThresholdSpec>& cells,
                                       const std::vector<ThresholdResult>& results) {
  CsvTable csv({"N", "d", "m", "probe", "alpha", "successes", "trials", "frequency", "seed"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    for (std::size_t k = 0; k < results[i].probes.size(); ++k) {
      const auto& p = results[i].probes[k];
      csv.add(c.nodes, c.degree, c.multiplicity, k, p.alpha, p.sample.successes, p.sample.trials,
              p.sample.frequency(), c.seed);
    }
  }
  return csv;
}

inline std::vector<ThresholdSpec> threshold_cells(const ThresholdSweepSpec& s) {
  std::vector<ThresholdSpec> cells;
  for (auto n : s.nodes)
    for (auto d : s.degrees)
      for (auto m : s.multiplicities) {
        ThresholdSpec c = s.base;
        c.nodes = n;
        c.degree = d;
        c.multiplicity = m;
        cells.push_back(c);
      }
  return cells;
}

struct SweepOutput {
  std::vector<std::filesystem::path> files;
};

/// Runs one sweep from its JSON config and writes `<kind>.csv` (plus a
/// summary or probe table where one exists) and the sidecar `<kind>.json`
/// into `out_dir`.
inline SweepOutput run_sweep(SweepKind kind, const nlohmann::json& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base = to_string(kind);
  SweepOutput out;
  auto save = [&](const CsvTable& t, const std::string& name) {
    const auto path = out_dir / name;
    t.save(path.string());
    out.files.push_back(path);
  };

  nlohmann::json normalized;
  nlohmann::json notes = nlohmann::json::object();
  try {
    switch (kind) {
      case SweepKind::Efficiency: {
        const auto spec = efficiency_spec_from_json(config);
        normalized = to_json(spec);
        const auto table = efficiency_table(spec);
        save(efficiency_runs_table(spec, table), base + ".csv");
        save(efficiency_cells_table(spec, table), base + "_cells.csv");
        notes["trial_seed"] = "derive_seed(seed, \"efficiency\", d << 32 | trial)";
        break;
      }
      case SweepKind::Threshold: {
        const auto spec = threshold_spec_from_json(config);
        normalized = to_json(spec);
        const auto cells = threshold_cells(spec);
        std::vector<ThresholdResult> results;
        for (const auto& c : cells) results.push_back(threshold_estimate(c));
        save(threshold_table(cells, results), base + ".csv");
        save(threshold_probes_table(cells, results), base + "_probes.csv");
        notes["threshold_definition"] = "alpha at which the success frequency crosses target, by bisection";
        notes["trial_seed"] = "derive_seed(seed, \"success-trial\", trial), shared by every probe";
        break;
      }
      case SweepKind::Tracks: {
        const auto spec = tracks_spec_from_json(config);
        normalized = to_json(spec);
        const auto runs = tracks_vs_alpha_sweep(spec);
        save(tracks_runs_table(spec, runs), base + ".csv");
        save(tracks_summary_table(spec, summarize_tracks(spec, runs)), base + "_summary.csv");
        notes["markers"] = "marker_low = 1/(3m), marker_high = log10(d)/m";
        notes["trial_seed"] = "derive_seed(seed, \"tracks\", m << 32 | trial)";
        break;
      }
      case SweepKind::Lambda: {
        const auto spec = lambda_spec_from_json(config);
        normalized = to_json(spec);
        const auto runs = lambda_comparison(spec);
        save(lambda_runs_table(spec, runs), base + ".csv");
        save(lambda_summary_table(spec, summarize_lambda(spec, runs)), base + "_summary.csv");
        notes["trial_seed"] = "derive_seed(seed, \"lambda\", trial)";
        break;
      }
      case SweepKind::Bounds: {
        const auto spec = bounds_spec_from_json(config);
        normalized = to_json(spec);
        save(bounds_table(spec, bounds_sweep(spec)), base + ".csv");
        notes["start_node"] = "uniform per trial";
        notes["trial_seed"] = "derive_seed(row seed, \"success-trial\", trial)";
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid sweep config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid sweep config: ") + e.what());
  }

  nlohmann::json sidecar = {{"sweep", base}, {"config", normalized}, {"notes", notes}, {"outputs", nlohmann::json::array()}};
  for (const auto& f : out.files) sidecar["outputs"].push_back(f.filename().string());
  const auto side = out_dir / (base + ".json");
  std::ofstream s(side, std::ios::binary);
  if (!s) throw OutputError("cannot open for writing: " + side.string());
  s << sidecar.dump(2) << '\n';
  out.files.push_back(side);
  return out;
}

}  // namespace monodromy
