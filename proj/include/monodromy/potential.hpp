#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "monodromy/core_model.hpp"

namespace monodromy {

class PotentialError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Probability that a single task along an edge lands on a solution not yet
/// known at its head: (d - |Q_head|) / (d - |C_e|).
inline double new_solution_probability(std::uint32_t d, std::size_t q_head, std::size_t c_e) {
  if (c_e >= d) throw PotentialError("edge saturated: every correspondence along the edge is known");
  if (q_head > d || c_e > q_head) throw PotentialError("requires |C_e| <= |Q_head| <= d");
  return static_cast<double>(d - q_head) / static_cast<double>(d - c_e);
}

/// Expected gain in known solutions at the head when one more task is appended
/// on a directed edge that already carries `inflight` tasks, without failures.
inline double increment_no_failures(std::uint32_t d, double en_v, std::size_t c_e, std::size_t inflight) {
  const double denom = static_cast<double>(d) - static_cast<double>(c_e) - static_cast<double>(inflight);
  if (denom <= 0.0) throw PotentialError("no capacity on directed edge");
  if (en_v > d) throw PotentialError("expected count exceeds d");
  return (static_cast<double>(d) - en_v) / denom;
}

/// Increment with per-task success probability alpha.
///
/// The start of a new task maps uniformly onto the d - |C_e| targets not yet
/// matched along e, independently of the known failures F_ē (their targets are
/// never observed). Each open in-flight task on ē claims a given unknown target
/// with probability alpha / (d - |C_e|), so the head deficit factors as
/// (d - EN_v) = (d - |Q_v|) * prod_ē (1 - alpha * n_ē / (d - |C_e|)) and the
/// exact increment is alpha (d - EN_v) / (d - |C_e| - alpha n_ē).
/// `f_count` enters only the precondition that a fresh start exists.
inline double increment_with_failures(std::uint32_t d, double en_v, std::size_t c_e, std::size_t f_count,
                                      std::size_t inflight, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw PotentialError("alpha must lie in [0, 1]");
  if (static_cast<double>(d) - static_cast<double>(c_e) - static_cast<double>(f_count) -
          static_cast<double>(inflight) <= 0.0)
    throw PotentialError("no candidate correspondence remains on the directed edge");
  if (en_v > d) throw PotentialError("expected count exceeds d");
  const double denom = static_cast<double>(d) - static_cast<double>(c_e) - alpha * static_cast<double>(inflight);
  return alpha * (static_cast<double>(d) - en_v) / denom;
}

/// The binomial-expectation form
///   alpha (d - EN_v) (1 - E[(f + B) / (d - c - n + B)]) / (d - c - f - n),
///   B ~ Bin(n, 1 - alpha),
/// evaluated exactly over B's support. It coincides with
/// increment_with_failures when n = 0 or alpha = 1 and overestimates otherwise
/// because it averages EN_v and B independently.
inline double increment_with_failures_binomial(std::uint32_t d, double en_v, std::size_t c_e, std::size_t f_count,
                                               std::size_t inflight, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw PotentialError("alpha must lie in [0, 1]");
  const double dd = d, c = static_cast<double>(c_e), f = static_cast<double>(f_count),
               n = static_cast<double>(inflight);
  if (dd - c - f - n <= 0.0) throw PotentialError("no candidate correspondence remains on the directed edge");
  double expectation = 0.0;
  double binom = 1.0;  // C(n, b)
  for (std::size_t b = 0; b <= inflight; ++b) {
    if (b > 0) binom = binom * static_cast<double>(inflight - b + 1) / static_cast<double>(b);
    const double pb = binom * std::pow(1.0 - alpha, static_cast<double>(b)) *
                      std::pow(alpha, static_cast<double>(inflight - b));
    if (pb == 0.0) continue;
    expectation += pb * (f + static_cast<double>(b)) / (dd - c - n + static_cast<double>(b));
  }
  return alpha * (dd - en_v) * (1.0 - expectation) / (dd - c - f - n);
}

/// Gain from appending `batch_size` tasks on one directed edge that carries no
/// other in-flight tasks: alpha * batch * (d - EN_v) / (d - |C_e|).
inline double increment_batch(std::uint32_t d, double en_v, std::size_t c_e, std::size_t batch_size, double alpha) {
  if (c_e >= d) throw PotentialError("edge saturated: every correspondence along the edge is known");
  return alpha * static_cast<double>(batch_size) * (static_cast<double>(d) - en_v) /
         static_cast<double>(d - c_e);
}

/// Per-node expected known-solution counts EN_v after all in-flight tasks
/// complete, plus the open in-flight count per directed edge.
class ExpectationLedger {
 public:
  ExpectationLedger() = default;

  /// Folds the open in-flight tasks of every directed edge into |Q_v|.
  static ExpectationLedger recompute(const SolverState& state, const HomotopyGraph& graph, double alpha) {
    ExpectationLedger ledger;
    ledger.alpha_ = alpha;
    ledger.expected_.resize(graph.node_count());
    ledger.inflight_.assign(graph.directed_edge_count(), 0);
    const std::uint32_t d = graph.degree();
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      double en = static_cast<double>(state.known(v).size());
      for (DirectedEdge de : graph.incoming(v)) {
        const std::size_t n = state.open_in_flight(de);
        const std::size_t c = state.correspondence(de.edge()).size();
        const std::size_t f = state.open_failures(de);
        for (std::size_t i = 0; i < n; ++i) en += increment_with_failures(d, en, c, f, i, alpha);
        ledger.inflight_[de.id()] = n;
      }
      ledger.expected_[v] = std::min(en, static_cast<double>(d));
    }
    return ledger;
  }

  double alpha() const { return alpha_; }
  double expected(NodeId v) const { return expected_.at(v); }
  const std::vector<double>& expected() const { return expected_; }
  std::size_t inflight(DirectedEdge de) const { return inflight_.at(de.id()); }
  double total() const {
    double s = 0;
    for (double x : expected_) s += x;
    return s;
  }

  // Gain at the head from appending one task on `de` in `state`.
  double increment(const SolverState& state, const HomotopyGraph& graph, DirectedEdge de) const {
    return increment_with_failures(graph.degree(), expected_[graph.head(de)], state.correspondence(de.edge()).size(),
                                   state.open_failures(de), inflight_[de.id()], alpha_);
  }

  // Incremental update on task submission; returns the increment applied.
  double submit(const SolverState& state, const HomotopyGraph& graph, DirectedEdge de) {
    const double inc = increment(state, graph, de);
    const NodeId v = graph.head(de);
    expected_[v] = std::min(expected_[v] + inc, static_cast<double>(graph.degree()));
    ++inflight_[de.id()];
    return inc;
  }

 private:
  double alpha_ = 1.0;
  std::vector<double> expected_;
  std::vector<std::size_t> inflight_;
};

struct PotentialKind {
  enum class Kind { Greedy, Ordinal, Weighted };

  Kind kind = Kind::Greedy;
  double lambda = 0.0;  // Weighted only; +infinity ranks heads by |Q_v| first
  // Weighted only: normalise |Q_v| by max_v |Q_v| instead of d.
  bool normalize_by_max_known = false;

  static PotentialKind greedy() { return {}; }
  static PotentialKind ordinal() { return {Kind::Ordinal, 0.0, false}; }
  static PotentialKind weighted(double lambda, bool by_max = false) {
    if (std::isnan(lambda) || lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    return {Kind::Weighted, lambda, by_max};
  }

  std::string name() const {
    switch (kind) {
      case Kind::Greedy: return "E";
      case Kind::Ordinal: return "ord";
      case Kind::Weighted: return "omega";
    }
    return "?";
  }
};

// Rank i (1-based) of each node in appearance order: the seed node first,
// the rest by id.
inline std::vector<std::uint32_t> appearance_order(std::uint32_t node_count, NodeId seed_node) {
  std::vector<std::uint32_t> rank(node_count);
  std::uint32_t next = 2;
  for (NodeId v = 0; v < node_count; ++v) rank[v] = (v == seed_node) ? 1 : next++;
  return rank;
}

inline double omega_weight(std::size_t known, double normalizer, double lambda) {
  if (normalizer <= 0.0) return 0.0;
  return std::pow(static_cast<double>(known) / normalizer, lambda);
}

/// Potential of appending a task on `de` (the start solution does not matter).
inline double potential_of(const PotentialKind& kind, DirectedEdge de, const SolverState& state,
                           const ExpectationLedger& ledger, const HomotopyGraph& graph,
                           const std::vector<std::uint32_t>& node_order) {
  const NodeId head = graph.head(de);
  switch (kind.kind) {
    case PotentialKind::Kind::Greedy:
      return ledger.increment(state, graph, de);
    case PotentialKind::Kind::Ordinal:
      return 1.0 / static_cast<double>(node_order.at(head));
    case PotentialKind::Kind::Weighted: {
      const double inc = ledger.increment(state, graph, de);
      const std::size_t known = state.known(head).size();
      if (std::isinf(kind.lambda)) return static_cast<double>(known) + 0.5 * inc;  // increments lie in [0, 1]
      double normalizer = graph.degree();
      if (kind.normalize_by_max_known) {
        std::size_t best = 0;
        for (NodeId v = 0; v < graph.node_count(); ++v) best = std::max(best, state.known(v).size());
        normalizer = static_cast<double>(best);
      }
      return omega_weight(known, normalizer, kind.lambda) * inc;
    }
  }
  return 0.0;
}

}  // namespace monodromy
