#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "monodromy/core_model.hpp"
#include "monodromy/csv.hpp"
#include "monodromy/fabricator.hpp"
#include "monodromy/potential.hpp"
#include "monodromy/scheduler.hpp"
#include "monodromy/trial_pool.hpp"

namespace monodromy {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw ExperimentError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw ExperimentError("mean of an empty sample");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// "E", "ord" or "omega" (the latter with lambda; lambda may be +infinity).
inline PotentialKind parse_potential(const std::string& name, double lambda = 0.0, bool by_max = false) {
  if (name == "E") return PotentialKind::greedy();
  if (name == "ord") return PotentialKind::ordinal();
  if (name == "omega") return PotentialKind::weighted(lambda, by_max);
  throw std::invalid_argument("unknown potential '" + name + "' (expected E, ord or omega)");
}

inline FabricationConfig fabrication_for(std::uint32_t nodes, std::uint32_t degree, std::uint32_t multiplicity,
                                         double alpha, std::uint64_t seed) {
  FabricationConfig c;
  c.nodes = nodes;
  c.degree = degree;
  c.multiplicity = multiplicity;
  c.alpha = alpha;
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------
// Single simulation runs

struct SimulationRow {
  std::uint64_t run_id = 0;
  std::uint32_t nodes = 0, degree = 0, multiplicity = 0;
  double alpha = 0;
  std::uint32_t threads = 1;
  PotentialKind potential;
  RunMetrics metrics;
};

inline SimulationRow simulation_row(std::uint64_t run_id, const OracleData& oracle, const SimulationConfig& config,
                                    const RunMetrics& metrics) {
  SimulationRow r;
  r.run_id = run_id;
  r.nodes = oracle.graph.node_count();
  r.degree = oracle.graph.degree();
  r.multiplicity = oracle.graph.multiplicity();
  r.alpha = config.model_alpha.value_or(oracle.provenance.alpha);
  r.threads = config.threads;
  r.potential = config.potential;
  r.metrics = metrics;
  return r;
}

inline CsvTable simulation_table(const std::vector<SimulationRow>& rows) {
  CsvTable t({"run_id", "N", "d", "m", "alpha", "threads", "potential", "lambda", "wall_time", "tracks", "successes",
              "failures", "status", "idle_fraction"});
  for (const auto& r : rows) {
    const bool weighted = r.potential.kind == PotentialKind::Kind::Weighted;
    t.add(r.run_id, r.nodes, r.degree, r.multiplicity, r.alpha, r.threads, r.potential.name(),
          weighted ? csv_field(r.potential.lambda) : std::string(), r.metrics.wall_time, r.metrics.tracks,
          r.metrics.successes, r.metrics.failures, std::string(to_string(r.metrics.status)),
          r.metrics.idle_fraction());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Efficiency tables

struct EfficiencySpec {
  std::uint32_t nodes = 5;
  std::uint32_t multiplicity = 1;
  double alpha = 1.0;
  std::vector<std::uint32_t> degrees{100, 1000, 10000};
  std::vector<std::uint32_t> threads{1, 8, 128};
  std::uint32_t trials = 20;
  PotentialKind potential;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trial count must be at least 1");
    if (degrees.empty() || threads.empty()) throw std::invalid_argument("degree and thread lists must be non-empty");
    for (auto p : threads)
      if (p < 1) throw std::invalid_argument("thread counts must be positive");
  }
};

struct EfficiencyRun {
  std::uint32_t degree = 0, threads = 0, trial = 0;
  std::uint64_t seed = 0;
  Ticks sequential_wall = 0, parallel_wall = 0;
  std::uint64_t tracks = 0;
  RunStatus status = RunStatus::Exhausted;
  ParallelMetrics metrics;
};

struct EfficiencyCell {
  std::uint32_t degree = 0, threads = 0, trials = 0;
  double efficiency_pct = 0, speedup = 0, idle_pct = 0;
};

struct EfficiencyTable {
  std::vector<EfficiencyRun> runs;
  std::vector<EfficiencyCell> cells;

  const EfficiencyCell& cell(std::uint32_t degree, std::uint32_t threads) const {
    for (const auto& c : cells)
      if (c.degree == degree && c.threads == threads) return c;
    throw std::out_of_range("no efficiency cell for the requested (d, p)");
  }
};

inline std::uint64_t efficiency_trial_seed(std::uint64_t seed, std::uint32_t degree, std::uint32_t trial) {
  return derive_seed(seed, "efficiency", (static_cast<std::uint64_t>(degree) << 32) | trial);
}

/// Each trial fabricates one oracle and runs it once sequentially and once per
/// thread count, all from node 0 with the same tie-break order.
inline EfficiencyTable efficiency_table(const EfficiencySpec& spec) {
  spec.validate();
  const std::size_t jobs = spec.degrees.size() * spec.trials;
  auto per_job = parallel_map(jobs, [&](std::size_t j) {
    const std::uint32_t degree = spec.degrees[j / spec.trials];
    const auto trial = static_cast<std::uint32_t>(j % spec.trials);
    const std::uint64_t seed = efficiency_trial_seed(spec.seed, degree, trial);
    const OracleData oracle = fabricate(fabrication_for(spec.nodes, degree, spec.multiplicity, spec.alpha, seed));
    SimulationConfig config;
    config.potential = spec.potential;
    const RunMetrics sequential = run(oracle, config).metrics;
    std::vector<EfficiencyRun> out;
    for (std::uint32_t p : spec.threads) {
      config.threads = p;
      const RunMetrics parallel = p == 1 ? sequential : run(oracle, config).metrics;
      EfficiencyRun r{degree, p, trial, seed, sequential.wall_time, parallel.wall_time, parallel.tracks,
                      parallel.status, compute_metrics(parallel, sequential.wall_time)};
      out.push_back(r);
    }
    return out;
  });

  EfficiencyTable table;
  for (auto& batch : per_job)
    for (auto& r : batch) table.runs.push_back(r);
  std::stable_sort(table.runs.begin(), table.runs.end(), [](const EfficiencyRun& a, const EfficiencyRun& b) {
    return std::tie(a.degree, a.threads, a.trial) < std::tie(b.degree, b.threads, b.trial);
  });
  for (std::uint32_t degree : spec.degrees) {
    for (std::uint32_t p : spec.threads) {
      std::vector<double> eff, speedup, idle;
      for (const auto& r : table.runs) {
        if (r.degree != degree || r.threads != p) continue;
        eff.push_back(r.metrics.efficiency_pct);
        speedup.push_back(r.metrics.speedup);
        idle.push_back(100.0 * r.metrics.idle_fraction);
      }
      table.cells.push_back({degree, p, spec.trials, mean(eff), mean(speedup), mean(idle)});
    }
  }
  return table;
}

inline CsvTable efficiency_runs_table(const EfficiencySpec& spec, const EfficiencyTable& t) {
  CsvTable csv({"N", "d", "m", "alpha", "threads", "potential", "trial", "seed", "sequential_wall", "parallel_wall",
                "tracks", "status", "speedup", "efficiency_pct", "idle_pct"});
  for (const auto& r : t.runs)
    csv.add(spec.nodes, r.degree, spec.multiplicity, spec.alpha, r.threads, spec.potential.name(), r.trial, r.seed,
            r.sequential_wall, r.parallel_wall, r.tracks, std::string(to_string(r.status)), r.metrics.speedup,
            r.metrics.efficiency_pct, 100.0 * r.metrics.idle_fraction);
  return csv;
}

inline CsvTable efficiency_cells_table(const EfficiencySpec& spec, const EfficiencyTable& t) {
  CsvTable csv({"N", "d", "m", "alpha", "threads", "potential", "trials", "seed", "efficiency_pct", "speedup",
                "idle_pct"});
  for (const auto& c : t.cells)
    csv.add(spec.nodes, c.degree, spec.multiplicity, spec.alpha, c.threads, spec.potential.name(), c.trials,
            spec.seed, c.efficiency_pct, c.speedup, c.idle_pct);
  return csv;
}

// ---------------------------------------------------------------------------
// Success probabilities and thresholds

struct SuccessSample {
  std::uint32_t successes = 0;
  std::uint32_t trials = 0;
  double frequency() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  double standard_error() const {
    if (!trials) return 0.0;
    const double f = frequency();
    return std::sqrt(f * (1.0 - f) / trials);
  }
  // Standard error at (successes + 1/2) / (trials + 1), which stays positive
  // when every trial succeeds or every trial fails.
  double corrected_standard_error() const {
    if (!trials) return 0.0;
    const double f = (successes + 0.5) / (trials + 1.0);
    return std::sqrt(f * (1.0 - f) / trials);
  }
};

inline std::uint64_t success_trial_seed(std::uint64_t seed, std::uint32_t trial) {
  return derive_seed(seed, "success-trial", trial);
}

/// Fraction of fresh fabricated oracles on which the run saturates a node.
/// Trial t always uses the same oracle seed, so the samples at different alpha
/// share their permutations. With `random_start_node` the start node is drawn
/// uniformly per trial; otherwise runs start at node 0.
inline SuccessSample success_frequency(std::uint32_t nodes, std::uint32_t degree, std::uint32_t multiplicity,
                                       double alpha, std::uint32_t trials, std::uint64_t seed,
                                       const SimulationConfig& config = {}, bool random_start_node = false) {
  auto hits = parallel_map(trials, [&](std::size_t t) -> int {
    const std::uint64_t trial_seed = success_trial_seed(seed, static_cast<std::uint32_t>(t));
    const OracleData oracle = fabricate(fabrication_for(nodes, degree, multiplicity, alpha, trial_seed));
    NodeId start = 0;
    if (random_start_node) {
      Rng rng = make_rng(trial_seed, "start-node");
      start = static_cast<NodeId>(uniform_below(rng, nodes));
    }
    return run(oracle, config, start).metrics.status == RunStatus::Saturated ? 1 : 0;
  });
  SuccessSample s;
  s.trials = trials;
  for (int h : hits) s.successes += static_cast<std::uint32_t>(h);
  return s;
}

struct ThresholdSpec {
  std::uint32_t nodes = 4;
  std::uint32_t degree = 16;
  std::uint32_t multiplicity = 1;
  std::uint32_t threads = 1;
  PotentialKind potential;
  std::uint32_t trials = 40;
  double tolerance = 0.005;
  double low = 0.0;
  double high = 1.0;
  double target = 0.5;  // success probability defining the threshold
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trial count must be at least 1");
    if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
    if (!(0.0 <= low && low < high && high <= 1.0)) throw std::invalid_argument("alpha range must satisfy 0 <= low < high <= 1");
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target probability must lie in (0, 1)");
  }
};

struct ThresholdProbe {
  double alpha = 0;
  SuccessSample sample;
};

struct ThresholdResult {
  double alpha_star = 0;
  double low = 0, high = 0;
  std::vector<ThresholdProbe> probes;
};

/// Bisection on alpha for the success probability `target`. The bracket ends
/// are probed first; success at the low end or failure at the high end is a
/// degenerate bracket and raises ExperimentError.
inline ThresholdResult threshold_estimate(const ThresholdSpec& spec) {
  spec.validate();
  SimulationConfig config;
  config.threads = spec.threads;
  config.potential = spec.potential;
  ThresholdResult result;
  auto probe = [&](double alpha) {
    ThresholdProbe p{alpha, success_frequency(spec.nodes, spec.degree, spec.multiplicity, alpha, spec.trials,
                                              spec.seed, config)};
    result.probes.push_back(p);
    return p.sample.frequency() >= spec.target;
  };
  double low = spec.low, high = spec.high;
  if (probe(low))
    throw ExperimentError("degenerate bracket: success probability already reaches the target at alpha=" +
                          csv_field(low));
  if (!probe(high))
    throw ExperimentError("degenerate bracket: success probability stays below the target at alpha=" +
                          csv_field(high));
  while (high - low > spec.tolerance) {
    const double mid = 0.5 * (low + high);
    (probe(mid) ? high : low) = mid;
  }
  result.low = low;
  result.high = high;
  result.alpha_star = 0.5 * (low + high);
  return result;
}

// ---------------------------------------------------------------------------
// Tracks against alpha

struct WindowMarkers {
  double lower = 0;  // 1 / (3m)
  double upper = 0;  // log10(d) / m
};

inline WindowMarkers window_markers(std::uint32_t degree, std::uint32_t multiplicity) {
  const double m = multiplicity;
  return {1.0 / (3.0 * m), std::log10(static_cast<double>(degree)) / m};
}

struct TracksSpec {
  std::uint32_t nodes = 3;
  std::uint32_t degree = 1000;
  std::vector<std::uint32_t> multiplicities{1, 2, 4};
  std::vector<double> alphas{0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
  std::uint32_t trials = 20;
  std::uint32_t threads = 1;
  PotentialKind potential;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trial count must be at least 1");
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha values must lie in [0, 1]");
  }
};

struct TracksRun {
  std::uint32_t multiplicity = 0;
  double alpha = 0;
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t tracks = 0;
  Ticks wall_time = 0;
  RunStatus status = RunStatus::Exhausted;
};

struct TracksSummary {
  std::uint32_t multiplicity = 0;
  double alpha = 0;
  std::uint32_t runs = 0, saturated = 0;
  double median_tracks = 0, p10_tracks = 0, p90_tracks = 0;
  WindowMarkers markers;
};

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ExperimentError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

inline std::vector<TracksRun> tracks_vs_alpha_sweep(const TracksSpec& spec) {
  spec.validate();
  const std::size_t per_m = spec.alphas.size() * spec.trials;
  SimulationConfig config;
  config.threads = spec.threads;
  config.potential = spec.potential;
  return parallel_map(spec.multiplicities.size() * per_m, [&](std::size_t j) {
    const std::uint32_t m = spec.multiplicities[j / per_m];
    const double alpha = spec.alphas[(j % per_m) / spec.trials];
    const auto trial = static_cast<std::uint32_t>(j % spec.trials);
    const std::uint64_t seed = derive_seed(spec.seed, "tracks", (static_cast<std::uint64_t>(m) << 32) | trial);
    const OracleData oracle = fabricate(fabrication_for(spec.nodes, spec.degree, m, alpha, seed));
    const RunMetrics metrics = run(oracle, config).metrics;
    return TracksRun{m, alpha, trial, seed, metrics.tracks, metrics.wall_time, metrics.status};
  });
}

inline std::vector<TracksSummary> summarize_tracks(const TracksSpec& spec, const std::vector<TracksRun>& runs) {
  std::vector<TracksSummary> out;
  for (std::uint32_t m : spec.multiplicities) {
    for (double alpha : spec.alphas) {
      TracksSummary s;
      s.multiplicity = m;
      s.alpha = alpha;
      s.markers = window_markers(spec.degree, m);
      std::vector<double> tracks;
      for (const auto& r : runs) {
        if (r.multiplicity != m || r.alpha != alpha) continue;
        tracks.push_back(static_cast<double>(r.tracks));
        if (r.status == RunStatus::Saturated) ++s.saturated;
      }
      s.runs = static_cast<std::uint32_t>(tracks.size());
      s.median_tracks = median(tracks);
      s.p10_tracks = quantile(tracks, 0.1);
      s.p90_tracks = quantile(tracks, 0.9);
      out.push_back(s);
    }
  }
  return out;
}

inline CsvTable tracks_runs_table(const TracksSpec& spec, const std::vector<TracksRun>& runs) {
  CsvTable csv({"N", "d", "m", "alpha", "threads", "potential", "trial", "seed", "tracks", "wall_time", "status",
                "marker_low", "marker_high"});
  for (const auto& r : runs) {
    const WindowMarkers w = window_markers(spec.degree, r.multiplicity);
    csv.add(spec.nodes, spec.degree, r.multiplicity, r.alpha, spec.threads, spec.potential.name(), r.trial, r.seed,
            r.tracks, r.wall_time, std::string(to_string(r.status)), w.lower, w.upper);
  }
  return csv;
}

inline CsvTable tracks_summary_table(const TracksSpec& spec, const std::vector<TracksSummary>& rows) {
  CsvTable csv({"N", "d", "m", "alpha", "runs", "saturated", "median_tracks", "p10_tracks", "p90_tracks",
                "marker_low", "marker_high", "seed"});
  for (const auto& s : rows)
    csv.add(spec.nodes, spec.degree, s.multiplicity, s.alpha, s.runs, s.saturated, s.median_tracks, s.p10_tracks,
            s.p90_tracks, s.markers.lower, s.markers.upper, spec.seed);
  return csv;
}

// ---------------------------------------------------------------------------
// Success bounds

/// 1 - (1 - (alpha N m)^d)^N while alpha N m < 1; the bound is vacuous (1)
/// beyond that.
inline double bound_upper(std::uint32_t nodes, std::uint32_t degree, std::uint32_t multiplicity, double alpha) {
  const double x = alpha * nodes * multiplicity;
  if (x >= 1.0) return 1.0;
  const double all_fail = std::pow(1.0 - std::pow(x, static_cast<double>(degree)), static_cast<double>(nodes));
  return std::clamp(1.0 - all_fail, 0.0, 1.0);
}

/// (1 - exp(-alpha m))^(N d).
inline double bound_lower(std::uint32_t nodes, std::uint32_t degree, std::uint32_t multiplicity, double alpha) {
  const double base = 1.0 - std::exp(-alpha * multiplicity);
  return std::clamp(std::pow(base, static_cast<double>(nodes) * degree), 0.0, 1.0);
}

struct BoundPoint {
  double alpha = 0, lower = 0, upper = 0;
};

inline std::vector<BoundPoint> bound_curves(std::uint32_t nodes, std::uint32_t degree, std::uint32_t multiplicity,
                                            const std::vector<double>& alphas) {
  std::vector<BoundPoint> out;
  for (double a : alphas) out.push_back({a, bound_lower(nodes, degree, multiplicity, a), bound_upper(nodes, degree, multiplicity, a)});
  return out;
}

struct BoundsSpec {
  std::uint32_t nodes = 3;
  std::vector<std::uint32_t> degrees{8, 16};
  std::vector<std::uint32_t> multiplicities{2, 4};
  std::vector<double> alphas{0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
  std::uint32_t trials = 500;  // 0 emits the curves only
  std::uint32_t threads = 1;
  PotentialKind potential;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha values must lie in [0, 1]");
  }
};

struct BoundsRow {
  std::uint32_t degree = 0, multiplicity = 0;
  BoundPoint bounds;
  SuccessSample sample;
  std::uint64_t seed = 0;

  // Whether the empirical frequency lies in [lower - 3se, min(1, upper) + 3se],
  // with the continuity-corrected standard error.
  bool within_band() const {
    const double se = sample.corrected_standard_error();
    const double f = sample.frequency();
    return f >= bounds.lower - 3 * se && f <= std::min(1.0, bounds.upper) + 3 * se;
  }
};

/// Bound curves with empirical success frequencies (random start node).
inline std::vector<BoundsRow> bounds_sweep(const BoundsSpec& spec) {
  spec.validate();
  SimulationConfig config;
  config.threads = spec.threads;
  config.potential = spec.potential;
  std::vector<BoundsRow> rows;
  for (std::uint32_t d : spec.degrees) {
    for (std::uint32_t m : spec.multiplicities) {
      for (const BoundPoint& b : bound_curves(spec.nodes, d, m, spec.alphas)) {
        BoundsRow row{d, m, b, {}, derive_seed(spec.seed, "bounds", (static_cast<std::uint64_t>(d) << 32) | m)};
        if (spec.trials > 0)
          row.sample = success_frequency(spec.nodes, d, m, b.alpha, spec.trials, row.seed, config, true);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline CsvTable bounds_table(const BoundsSpec& spec, const std::vector<BoundsRow>& rows) {
  CsvTable csv({"N", "d", "m", "alpha", "lower", "upper", "trials", "successes", "frequency", "std_error",
                "within_band", "seed"});
  for (const auto& r : rows)
    csv.add(spec.nodes, r.degree, r.multiplicity, r.bounds.alpha, r.bounds.lower, r.bounds.upper, r.sample.trials,
            r.sample.successes, r.sample.frequency(), r.sample.standard_error(), r.within_band() ? 1 : 0, r.seed);
  return csv;
}

// ---------------------------------------------------------------------------
// Weighted potentials

struct LambdaSpec {
  std::uint32_t nodes = 5;
  std::uint32_t degree = 1000;
  std::uint32_t multiplicity = 1;
  std::vector<double> lambdas{0, 1, 4, 16, 64, std::numeric_limits<double>::infinity()};
  bool include_greedy = true;
  bool include_ordinal = true;
  std::vector<double> alphas{1.0, 0.8};
  std::uint32_t trials = 30;
  std::uint32_t threads = 4;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trial count must be at least 1");
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha values must lie in [0, 1]");
  }

  std::vector<PotentialKind> potentials() const {
    std::vector<PotentialKind> out;
    if (include_greedy) out.push_back(PotentialKind::greedy());
    if (include_ordinal) out.push_back(PotentialKind::ordinal());
    for (double l : lambdas) out.push_back(PotentialKind::weighted(l));
    return out;
  }
};

struct LambdaRun {
  PotentialKind potential;
  double alpha = 0;
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t tracks = 0;
  Ticks wall_time = 0;
  RunStatus status = RunStatus::Exhausted;
};

struct LambdaSummary {
  PotentialKind potential;
  double alpha = 0;
  std::uint32_t runs = 0, saturated = 0;
  double median_tracks = 0, median_wall_time = 0;
};

/// Every potential runs on the same oracles: trial t at a given alpha uses the
/// same seed for all potentials.
inline std::vector<LambdaRun> lambda_comparison(const LambdaSpec& spec) {
  spec.validate();
  const auto potentials = spec.potentials();
  const std::size_t per_alpha = potentials.size() * spec.trials;
  return parallel_map(spec.alphas.size() * per_alpha, [&](std::size_t j) {
    const double alpha = spec.alphas[j / per_alpha];
    const PotentialKind& potential = potentials[(j % per_alpha) / spec.trials];
    const auto trial = static_cast<std::uint32_t>(j % spec.trials);
    const std::uint64_t seed = derive_seed(spec.seed, "lambda", trial);
    const OracleData oracle = fabricate(fabrication_for(spec.nodes, spec.degree, spec.multiplicity, alpha, seed));
    SimulationConfig config;
    config.threads = spec.threads;
    config.potential = potential;
    const RunMetrics metrics = run(oracle, config).metrics;
    return LambdaRun{potential, alpha, trial, seed, metrics.tracks, metrics.wall_time, metrics.status};
  });
}

inline bool same_potential(const PotentialKind& a, const PotentialKind& b) {
  if (a.kind != b.kind) return false;
  return a.kind != PotentialKind::Kind::Weighted || (a.lambda == b.lambda && a.normalize_by_max_known == b.normalize_by_max_known);
}

inline std::vector<LambdaSummary> summarize_lambda(const LambdaSpec& spec, const std::vector<LambdaRun>& runs) {
  std::vector<LambdaSummary> out;
  for (double alpha : spec.alphas) {
    for (const PotentialKind& p : spec.potentials()) {
      LambdaSummary s{p, alpha};
      std::vector<double> tracks, wall;
      for (const auto& r : runs) {
        if (r.alpha != alpha || !same_potential(r.potential, p)) continue;
        tracks.push_back(static_cast<double>(r.tracks));
        wall.push_back(static_cast<double>(r.wall_time));
        if (r.status == RunStatus::Saturated) ++s.saturated;
      }
      s.runs = static_cast<std::uint32_t>(tracks.size());
      s.median_tracks = median(tracks);
      s.median_wall_time = median(wall);
      out.push_back(s);
    }
  }
  return out;
}

inline std::string lambda_field(const PotentialKind& p) {
  return p.kind == PotentialKind::Kind::Weighted ? csv_field(p.lambda) : std::string();
}

inline CsvTable lambda_runs_table(const LambdaSpec& spec, const std::vector<LambdaRun>& runs) {
  CsvTable csv({"N", "d", "m", "alpha", "threads", "potential", "lambda", "trial", "seed", "tracks", "wall_time",
                "status"});
  for (const auto& r : runs)
    csv.add(spec.nodes, spec.degree, spec.multiplicity, r.alpha, spec.threads, r.potential.name(),
            lambda_field(r.potential), r.trial, r.seed, r.tracks, r.wall_time, std::string(to_string(r.status)));
  return csv;
}

inline CsvTable lambda_summary_table(const LambdaSpec& spec, const std::vector<LambdaSummary>& rows) {
  CsvTable csv({"N", "d", "m", "alpha", "threads", "potential", "lambda", "runs", "saturated", "median_tracks",
                "median_wall_time", "seed"});
  for (const auto& s : rows)
    csv.add(spec.nodes, spec.degree, spec.multiplicity, s.alpha, spec.threads, s.potential.name(),
            lambda_field(s.potential), s.runs, s.saturated, s.median_tracks, s.median_wall_time, spec.seed);
  return csv;
}

}  // namespace monodromy
