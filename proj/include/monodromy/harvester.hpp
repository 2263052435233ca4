#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "monodromy/core_model.hpp"
#include "monodromy/rng.hpp"

namespace monodromy {

// Monic univariate family F_p(x) = x^d + a_{d-1} x^{d-1} + ... + a_0 with
// p = (a_0, ..., a_{d-1}). Coefficients are linear in the parameters, so the
// segment homotopy between two nodes is (1-t) g1 F_p1 + t g2 F_p2.

using Coefficients = std::vector<Complex>;

struct UnivariateFamily {
  std::uint32_t degree = 0;
  std::vector<Coefficients> nodes;  // one parameter vector per node
};

struct TrackSettings {
  double initial_step = 0.05;
  double min_step = 1e-7;
  double max_step = 0.1;
  double shrink = 0.5;
  double grow = 1.25;
  int grow_after = 3;
  double corrector_tolerance = 1e-10;
  int max_newton_iterations = 6;
  double divergence_bound = 1e8;
  double matching_tolerance = 1e-6;
  double refinement_tolerance = 1e-12;
  // Predictor displacement is capped at this multiple of the local root
  // separation estimate |H_x| / |H_xx|.
  double separation_fraction = 0.1;

  void validate() const {
    if (!(min_step > 0 && min_step < initial_step)) throw std::invalid_argument("need 0 < min_step < initial_step");
    if (!(corrector_tolerance > 0 && matching_tolerance > 0 && refinement_tolerance > 0))
      throw std::invalid_argument("tolerances must be positive");
    if (!(shrink > 0 && shrink < 1 && grow >= 1)) throw std::invalid_argument("need 0 < shrink < 1 <= grow");
  }
};

struct PolyValue {
  Complex value;
  Complex first;
  Complex second;
};

// Value and first two derivatives of the monic polynomial (Horner).
inline PolyValue evaluate(const Coefficients& a, Complex x) {
  Complex p = 1.0, dp = 0.0, ddp = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) {
    ddp = ddp * x + 2.0 * dp;
    dp = dp * x + p;
    p = p * x + a[i];
  }
  return {p, dp, ddp};
}

inline double residual_scale(Complex x, std::size_t degree) {
  return 1.0 + std::pow(std::abs(x), static_cast<double>(degree));
}

enum class TrackFailure { None, StepUnderflow, Divergence, Singular, BadStart, UnmatchedEndpoint };

inline const char* to_string(TrackFailure f) {
  switch (f) {
    case TrackFailure::None: return "none";
    case TrackFailure::StepUnderflow: return "step size underflow";
    case TrackFailure::Divergence: return "divergence";
    case TrackFailure::Singular: return "singular Jacobian";
    case TrackFailure::BadStart: return "start is not a solution";
    case TrackFailure::UnmatchedEndpoint: return "endpoint matches no known solution";
  }
  return "unknown";
}

struct TrackOutcome {
  bool success = false;
  Complex endpoint;
  TrackFailure failure = TrackFailure::None;
  std::uint64_t steps = 0;
  std::uint64_t microseconds = 0;
};

namespace detail {

struct Homotopy {
  const Coefficients& from;
  const Coefficients& to;
  Complex g1, g2;

  // H, dH/dx, d2H/dx2, dH/dt at (x, t).
  void eval(Complex x, double t, Complex& h, Complex& hx, Complex& hxx, Complex& ht) const {
    const PolyValue f = evaluate(from, x), g = evaluate(to, x);
    const Complex a = (1.0 - t) * g1, b = t * g2;
    h = a * f.value + b * g.value;
    hx = a * f.first + b * g.first;
    hxx = a * f.second + b * g.second;
    ht = g2 * g.value - g1 * f.value;
  }
};

// Newton on x -> H(x, t). Requires contraction by `ratio` per iteration.
inline bool newton(const Homotopy& hom, double t, Complex& x, double tol, int max_iter, double max_move) {
  double last = std::numeric_limits<double>::infinity();
  Complex y = x;
  for (int k = 0; k < max_iter; ++k) {
    Complex h, hx, hxx, ht;
    hom.eval(y, t, h, hx, hxx, ht);
    if (std::abs(hx) == 0.0) return false;
    const Complex dx = h / hx;
    const double size = std::abs(dx);
    if (k > 0 && size > 0.5 * last) return false;
    if (std::abs(y - dx - x) > max_move) return false;
    y -= dx;
    if (size <= tol * (1.0 + std::abs(y))) {
      x = y;
      return true;
    }
    last = size;
  }
  return false;
}

}  // namespace detail

/// Tracks `start` (a root of F_from) along (1-t) g1 F_from + t g2 F_to from
/// t = 0 to 1 with an Euler predictor and Newton corrector, then polishes the
/// endpoint against F_to.
inline TrackOutcome track_path(const Coefficients& from, const Coefficients& to, Complex g1, Complex g2,
                               Complex start, const TrackSettings& s) {
  const auto clock_start = std::chrono::steady_clock::now();
  TrackOutcome out;
  auto finish = [&](TrackOutcome& o) -> TrackOutcome {
    o.microseconds = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - clock_start).count());
    return o;
  };
  const std::size_t degree = from.size();
  {
    const PolyValue f = evaluate(from, start);
    if (std::abs(f.value) > 1e3 * s.corrector_tolerance * residual_scale(start, degree)) {
      out.failure = TrackFailure::BadStart;
      return finish(out);
    }
  }
  const detail::Homotopy hom{from, to, g1, g2};
  Complex x = start;
  double t = 0.0;
  double h = s.initial_step;
  int streak = 0;
  while (t < 1.0) {
    if (h < s.min_step) {
      out.failure = TrackFailure::StepUnderflow;
      return finish(out);
    }
    Complex hv, hx, hxx, ht;
    hom.eval(x, t, hv, hx, hxx, ht);
    if (std::abs(hx) <= 1e-14 * residual_scale(x, degree)) {
      out.failure = TrackFailure::Singular;
      return finish(out);
    }
    const Complex velocity = -ht / hx;
    const double separation = std::abs(hxx) > 0 ? std::abs(hx) / std::abs(hxx) : std::numeric_limits<double>::infinity();
    const double max_move = s.separation_fraction * separation;
    double step = std::min(h, 1.0 - t);
    const double speed = std::abs(velocity);
    if (speed * step > max_move) {
      step = max_move / speed;
      if (step < s.min_step && 1.0 - t > s.min_step) {
        out.failure = TrackFailure::StepUnderflow;
        return finish(out);
      }
    }
    const double next_t = (1.0 - t - step < 1e-15) ? 1.0 : t + step;
    Complex predicted = x + (next_t - t) * velocity;
    if (!detail::newton(hom, next_t, predicted, s.corrector_tolerance, s.max_newton_iterations, max_move)) {
      h = step * s.shrink;
      streak = 0;
      continue;
    }
    x = predicted;
    t = next_t;
    ++out.steps;
    if (std::abs(x) > s.divergence_bound) {
      out.failure = TrackFailure::Divergence;
      return finish(out);
    }
    if (++streak >= s.grow_after) {
      h = std::min(step * s.grow, s.max_step);
      streak = 0;
    } else {
      h = step;
    }
  }
  // Polish against the target system.
  for (int k = 0; k < 20; ++k) {
    const PolyValue f = evaluate(to, x);
    if (std::abs(f.first) == 0.0) break;
    const Complex dx = f.value / f.first;
    x -= dx;
    if (std::abs(dx) <= s.refinement_tolerance * (1.0 + std::abs(x))) break;
  }
  out.success = true;
  out.endpoint = x;
  return finish(out);
}

class HarvestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatchResult {
  SolutionIndex index = 0;
  bool is_new = false;
};

/// Index of the known solution within `tolerance` (relative to max(1, |y|)) of
/// `x`, registering `x` as a new solution if none is close.
inline MatchResult match_solution(Complex x, std::vector<Complex>& known, double tolerance) {
  std::optional<SolutionIndex> hit;
  for (SolutionIndex i = 0; i < known.size(); ++i) {
    if (std::abs(x - known[i]) <= tolerance * std::max(1.0, std::abs(known[i]))) {
      if (hit) throw HarvestError("ambiguous match: two known solutions lie within the matching tolerance");
      hit = i;
    }
  }
  if (hit) return {*hit, false};
  known.push_back(x);
  return {static_cast<SolutionIndex>(known.size() - 1), true};
}

/// All roots of the monic polynomial by Aberth-Ehrlich iteration followed by a
/// Newton polish.
inline std::vector<Complex> reference_roots(const Coefficients& a, int max_iterations = 500) {
  const std::size_t d = a.size();
  if (d == 0) throw std::invalid_argument("degree must be at least 1");
  if (d == 1) return {-a[0]};
  // Fujiwara-style radius bound for the starting circle.
  double radius = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    radius = std::max(radius, std::pow(std::abs(a[i]), 1.0 / static_cast<double>(d - i)));
  radius = std::max(radius, 1e-3);
  std::vector<Complex> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(d) + 0.4;
    z[k] = std::polar(radius, angle);
  }
  bool converged = false;
  for (int it = 0; it < max_iterations && !converged; ++it) {
    converged = true;
    for (std::size_t k = 0; k < d; ++k) {
      const PolyValue f = evaluate(a, z[k]);
      if (f.value == Complex(0.0)) continue;
      const Complex ratio = f.value / f.first;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex w = ratio / (1.0 - ratio * sum);
      z[k] -= w;
      if (std::abs(w) > 1e-14 * (1.0 + std::abs(z[k]))) converged = false;
    }
  }
  for (Complex& r : z) {
    for (int k = 0; k < 5; ++k) {
      const PolyValue f = evaluate(a, r);
      if (std::abs(f.first) == 0.0) break;
      r -= f.value / f.first;
    }
  }
  for (const Complex& r : z) {
    if (std::abs(evaluate(a, r).value) / residual_scale(r, d) > 1e-10)
      throw HarvestError("reference root finder did not converge");
  }
  return z;
}

struct EdgeGammas {
  Complex gamma1{1.0, 0.0};  // multiplies F at the lower-id endpoint
  Complex gamma2{1.0, 0.0};  // multiplies F at the higher-id endpoint
};

struct HarvestInstance {
  UnivariateFamily family;
  HomotopyGraph graph;
  std::vector<EdgeGammas> gammas;  // per edge
  NodeId seed_node = 0;
  Complex seed_solution;
};

inline Complex complex_normal(Rng& rng) {
  // Box-Muller; E|z|^2 = 1.
  const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
  return std::polar(std::sqrt(-std::log(u1)), 2.0 * std::numbers::pi * u2);
}

inline Complex unit_circle(Rng& rng) { return std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng)); }

/// Random complete-graph instance with one known solution: node 0 is built
/// around a random x0, every other node has random coefficients, and every
/// parallel edge gets its own (g1, g2) on the unit circle.
inline HarvestInstance seed_instance(std::uint32_t degree, std::uint32_t node_count, std::uint32_t multiplicity,
                                     Rng& rng) {
  if (degree < 1) throw std::invalid_argument("degree must be at least 1");
  if (node_count < 2) throw std::invalid_argument("need at least 2 nodes");
  HarvestInstance inst;
  inst.graph = HomotopyGraph::complete(node_count, degree, multiplicity);
  inst.family.degree = degree;
  inst.family.nodes.assign(node_count, Coefficients(degree));

  // |x0| = 1 keeps a_0 comparable in size to the other nodes' coefficients.
  const Complex x0 = unit_circle(rng);
  Coefficients& p0 = inst.family.nodes[0];
  Complex tail_sum = std::pow(x0, static_cast<int>(degree));
  for (std::uint32_t i = 1; i < degree; ++i) {
    p0[i] = complex_normal(rng);
    tail_sum += p0[i] * std::pow(x0, static_cast<int>(i));
  }
  p0[0] = -tail_sum;
  for (NodeId v = 1; v < node_count; ++v)
    for (auto& c : inst.family.nodes[v]) c = complex_normal(rng);

  inst.gammas.resize(inst.graph.edge_count());
  for (auto& g : inst.gammas) {
    g.gamma1 = unit_circle(rng);
    g.gamma2 = unit_circle(rng);
  }
  Complex x = x0;
  const PolyValue f = evaluate(p0, x);
  if (std::abs(f.first) > 0) x -= f.value / f.first;
  inst.seed_node = 0;
  inst.seed_solution = x;
  return inst;
}

/// The cubic x^3 + c over a triangle of c-values around the origin, joined by
/// straight segments (g1 = g2 = 1). The loop encircles the branch point c = 0.
inline HarvestInstance cubic_triangle_instance(double radius = 1.0) {
  HarvestInstance inst;
  inst.graph = HomotopyGraph::complete(3, 3, 1);
  inst.family.degree = 3;
  for (int k = 0; k < 3; ++k) {
    const Complex c = std::polar(radius, 2.0 * std::numbers::pi * k / 3.0 + 0.3);
    inst.family.nodes.push_back({c, 0.0, 0.0});
  }
  inst.gammas.assign(inst.graph.edge_count(), EdgeGammas{});
  inst.seed_node = 0;
  inst.seed_solution = std::pow(-inst.family.nodes[0][0], 1.0 / 3.0);
  return inst;
}

enum class HarvestTiming { MeasuredMicroseconds, PredictorSteps };

struct HarvestReport {
  std::map<TrackFailure, std::size_t> failure_reasons;
  std::size_t tracks = 0;
  std::size_t failed_flags = 0;
};

/// Tracks one directed edge of the instance; the reverse direction follows the
/// same homotopy with t reversed.
inline TrackOutcome track_edge(const HarvestInstance& inst, DirectedEdge de, Complex start, const TrackSettings& s) {
  const Edge& e = inst.graph.edge(de.edge());
  const EdgeGammas& g = inst.gammas[de.edge()];
  const Coefficients& low = inst.family.nodes[e.low];
  const Coefficients& high = inst.family.nodes[e.high];
  return de.reversed() ? track_path(high, low, g.gamma2, g.gamma1, start, s)
                       : track_path(low, high, g.gamma1, g.gamma2, start, s);
}

/// Collects an oracle from real tracking: first populates every node by
/// exploring from the seed solution, then tracks every (start, directed edge)
/// pair. Endpoints are matched to per-node solution indices; each edge's
/// permutation is assembled from consistent successful tracks in both
/// directions and completed arbitrarily, with the flags of missing or
/// inconsistent tracks set to failed.
inline OracleData harvest_instance(const HarvestInstance& inst, const TrackSettings& settings,
                                   HarvestTiming timing = HarvestTiming::MeasuredMicroseconds,
                                   HarvestReport* report = nullptr, std::uint64_t seed = 0) {
  settings.validate();
  const HomotopyGraph& graph = inst.graph;
  const std::uint32_t d = graph.degree();
  const auto directed = static_cast<std::uint32_t>(graph.directed_edge_count());
  HarvestReport local;
  HarvestReport& rep = report ? *report : local;

  std::vector<std::vector<Complex>> known(graph.node_count());
  known[inst.seed_node].push_back(inst.seed_solution);

  struct Result {
    TrackOutcome outcome;
    SolutionIndex target = 0;
  };
  std::vector<std::vector<std::optional<Result>>> results(directed, std::vector<std::optional<Result>>(d));

  auto track = [&](DirectedEdge de, SolutionIndex s) -> const Result& {
    auto& slot = results[de.id()][s];
    if (slot) return *slot;
    const NodeId tail = graph.tail(de), head = graph.head(de);
    Result r;
    r.outcome = track_edge(inst, de, known[tail][s], settings);
    ++rep.tracks;
    if (r.outcome.success) {
      std::vector<Complex> probe = known[head];
      const MatchResult mr = match_solution(r.outcome.endpoint, probe, settings.matching_tolerance);
      if (mr.is_new && known[head].size() >= d) {
        r.outcome.success = false;
        r.outcome.failure = TrackFailure::UnmatchedEndpoint;
      } else {
        if (mr.is_new) known[head].push_back(r.outcome.endpoint);
        r.target = mr.index;
      }
    }
    if (!r.outcome.success) ++rep.failure_reasons[r.outcome.failure];
    slot = r;
    return *slot;
  };

  // Population: breadth-first over discovered solutions.
  std::deque<std::pair<NodeId, SolutionIndex>> work{{inst.seed_node, 0}};
  auto all_full = [&] {
    for (const auto& k : known)
      if (k.size() < d) return false;
    return true;
  };
  while (!work.empty() && !all_full()) {
    auto [v, s] = work.front();
    work.pop_front();
    for (DirectedEdge de : graph.outgoing(v)) {
      const NodeId head = graph.head(de);
      const std::size_t before = known[head].size();
      track(de, s);
      for (std::size_t i = before; i < known[head].size(); ++i) work.emplace_back(head, static_cast<SolutionIndex>(i));
    }
  }
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (known[v].size() < d)
      throw HarvestError("cannot fully populate node " + std::to_string(v) + ": found " +
                         std::to_string(known[v].size()) + " of " + std::to_string(d) + " solutions");
  }
  for (std::uint32_t id = 0; id < directed; ++id)
    for (SolutionIndex s = 0; s < d; ++s) track(DirectedEdge::from_id(id), s);

  OracleData o;
  o.graph = graph;
  o.permutations.assign(graph.edge_count(), std::vector<SolutionIndex>(d));
  o.success_flags.assign(directed, std::vector<std::uint8_t>(d, 0));
  o.durations.assign(directed, std::vector<Ticks>(d, 1));

  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const DirectedEdge fwd{e, false}, bwd{e, true};
    std::vector<std::int64_t> low_to_high(d, kUnmatched), high_to_low(d, kUnmatched);
    std::vector<int> fwd_hits(d, 0), bwd_hits(d, 0);
    for (SolutionIndex s = 0; s < d; ++s) {
      if (results[fwd.id()][s]->outcome.success) ++fwd_hits[results[fwd.id()][s]->target];
      if (results[bwd.id()][s]->outcome.success) ++bwd_hits[results[bwd.id()][s]->target];
    }
    // Forward pairs whose target is hit once, then backward pairs that agree
    // or fill gaps without conflict.
    for (SolutionIndex s = 0; s < d; ++s) {
      const auto& r = *results[fwd.id()][s];
      if (r.outcome.success && fwd_hits[r.target] == 1) {
        low_to_high[s] = r.target;
        high_to_low[r.target] = s;
      }
    }
    for (SolutionIndex t = 0; t < d; ++t) {
      const auto& r = *results[bwd.id()][t];
      if (!r.outcome.success || bwd_hits[r.target] != 1) continue;
      const SolutionIndex s = r.target;
      if (low_to_high[s] == kUnmatched && high_to_low[t] == kUnmatched) {
        low_to_high[s] = t;
        high_to_low[t] = s;
      }
    }
    // Complete arbitrarily: unmatched lows take unused highs in order.
    SolutionIndex next_high = 0;
    for (SolutionIndex s = 0; s < d; ++s) {
      if (low_to_high[s] != kUnmatched) continue;
      while (high_to_low[next_high] != kUnmatched) ++next_high;
      low_to_high[s] = next_high;
      high_to_low[next_high] = s;
    }
    for (SolutionIndex s = 0; s < d; ++s) o.permutations[e][s] = static_cast<SolutionIndex>(low_to_high[s]);
    for (const DirectedEdge de : {fwd, bwd}) {
      for (SolutionIndex s = 0; s < d; ++s) {
        const auto& r = *results[de.id()][s];
        const auto expected = de.reversed() ? high_to_low[s] : low_to_high[s];
        const bool ok = r.outcome.success && static_cast<std::int64_t>(r.target) == expected;
        o.success_flags[de.id()][s] = ok ? 1 : 0;
        if (!ok) ++rep.failed_flags;
        const std::uint64_t t =
            timing == HarvestTiming::MeasuredMicroseconds ? r.outcome.microseconds : r.outcome.steps;
        o.durations[de.id()][s] = std::max<Ticks>(1, t);
      }
    }
  }

  o.duration_unit = timing == HarvestTiming::MeasuredMicroseconds ? "microseconds" : "predictor_steps";
  o.provenance.seed = seed;
  o.provenance.alpha = 1.0 - static_cast<double>(rep.failed_flags) / (static_cast<double>(directed) * d);
  o.provenance.duration_model = {"measured", 0, 0.0};
  o.provenance.source = "harvested";
  o.provenance.notes =
      "alpha is the observed success fraction; permutations are completed arbitrarily where tracks failed and the "
      "corresponding flags are 0";
  o.node_parameters = inst.family.nodes;
  o.solutions = known;
  return o;
}

struct HarvestOptions {
  TrackSettings settings;
  HarvestTiming timing = HarvestTiming::MeasuredMicroseconds;
};

inline OracleData harvest(std::uint32_t degree, std::uint32_t node_count, std::uint32_t multiplicity,
                          std::uint64_t seed, const HarvestOptions& options = {}, HarvestReport* report = nullptr) {
  Rng rng = make_rng(seed, "harvest-instance");
  const HarvestInstance inst = seed_instance(degree, node_count, multiplicity, rng);
  return harvest_instance(inst, options.settings, options.timing, report, seed);
}

}  // namespace monodromy
