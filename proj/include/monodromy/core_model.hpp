#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace monodromy {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using SolutionIndex = std::uint32_t;
using Ticks = std::uint64_t;
using Complex = std::complex<double>;

struct Edge {
  NodeId low = 0;
  NodeId high = 0;
  std::uint32_t multiplicity_index = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An undirected edge together with a traversal direction. Forward runs from
/// the lower-id endpoint to the higher-id endpoint.
class DirectedEdge {
 public:
  constexpr DirectedEdge() = default;
  constexpr DirectedEdge(EdgeId edge, bool reversed) : edge_(edge), reversed_(reversed) {}

  static constexpr DirectedEdge from_id(std::uint32_t id) { return {id / 2, (id % 2) != 0}; }

  constexpr EdgeId edge() const { return edge_; }
  constexpr bool reversed() const { return reversed_; }
  constexpr std::uint32_t id() const { return 2 * edge_ + (reversed_ ? 1U : 0U); }
  constexpr DirectedEdge reverse() const { return {edge_, !reversed_}; }

  friend constexpr bool operator==(DirectedEdge, DirectedEdge) = default;

 private:
  EdgeId edge_ = 0;
  bool reversed_ = false;
};

class HomotopyGraph {
 public:
  HomotopyGraph() = default;

  HomotopyGraph(std::uint32_t node_count, std::uint32_t degree, std::vector<Edge> edges,
                std::uint32_t multiplicity = 0)
      : node_count_(node_count), degree_(degree), multiplicity_(multiplicity), edges_(std::move(edges)) {
    if (node_count_ < 2) throw std::invalid_argument("graph needs at least 2 nodes");
    if (degree_ < 1) throw std::invalid_argument("degree must be positive");
    for (const Edge& e : edges_) {
      if (e.low == e.high) throw std::invalid_argument("graph must be loopless");
      if (e.low > e.high) throw std::invalid_argument("edge endpoints must satisfy low < high");
      if (e.high >= node_count_) throw std::invalid_argument("edge endpoint out of range");
    }
    build_adjacency();
  }

  /// Complete multigraph with `multiplicity` parallel edges per unordered pair,
  /// ordered by (low, high, multiplicity index).
  static HomotopyGraph complete(std::uint32_t node_count, std::uint32_t degree, std::uint32_t multiplicity) {
    if (multiplicity < 1) throw std::invalid_argument("multiplicity must be positive");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(multiplicity) * node_count * (node_count > 0 ? node_count - 1 : 0) / 2);
    for (NodeId i = 0; i < node_count; ++i)
      for (NodeId j = i + 1; j < node_count; ++j)
        for (std::uint32_t k = 0; k < multiplicity; ++k) edges.push_back({i, j, k});
    return HomotopyGraph(node_count, degree, std::move(edges), multiplicity);
  }

  std::uint32_t node_count() const { return node_count_; }
  std::uint32_t degree() const { return degree_; }
  // 0 when the edge list is not a complete-graph configuration.
  std::uint32_t multiplicity() const { return multiplicity_; }
  bool is_complete() const { return multiplicity_ > 0; }

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t directed_edge_count() const { return 2 * edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  NodeId tail(DirectedEdge de) const {
    const Edge& e = edges_[de.edge()];
    return de.reversed() ? e.high : e.low;
  }
  NodeId head(DirectedEdge de) const {
    const Edge& e = edges_[de.edge()];
    return de.reversed() ? e.low : e.high;
  }

  std::span<const DirectedEdge> outgoing(NodeId v) const { return outgoing_.at(v); }
  std::span<const DirectedEdge> incoming(NodeId v) const { return incoming_.at(v); }

  friend bool operator==(const HomotopyGraph& a, const HomotopyGraph& b) {
    return a.node_count_ == b.node_count_ && a.degree_ == b.degree_ && a.multiplicity_ == b.multiplicity_ &&
           a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    outgoing_.assign(node_count_, {});
    incoming_.assign(node_count_, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      for (bool rev : {false, true}) {
        DirectedEdge de{e, rev};
        outgoing_[tail(de)].push_back(de);
        incoming_[head(de)].push_back(de);
      }
    }
  }

  std::uint32_t node_count_ = 0;
  std::uint32_t degree_ = 0;
  std::uint32_t multiplicity_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<DirectedEdge>> outgoing_;
  std::vector<std::vector<DirectedEdge>> incoming_;
};

struct Task {
  SolutionIndex start = 0;
  DirectedEdge edge;
  Ticks scheduled_at = 0;
  Ticks duration = 0;
};

// Subset of {0, ..., d-1}.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::uint32_t universe) : bits_(universe, 0) {}

  bool contains(SolutionIndex i) const { return i < bits_.size() && bits_[i] != 0; }
  bool insert(SolutionIndex i) {
    if (i >= bits_.size()) throw std::out_of_range("solution index out of range");
    if (bits_[i]) return false;
    bits_[i] = 1;
    ++size_;
    return true;
  }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::uint32_t universe() const { return static_cast<std::uint32_t>(bits_.size()); }

  std::vector<SolutionIndex> to_vector() const {
    std::vector<SolutionIndex> out;
    out.reserve(size_);
    for (SolutionIndex i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t size_ = 0;
};

inline constexpr std::int64_t kUnmatched = -1;

/// Known correspondence C_e along one undirected edge, stored as the list of
/// (low-endpoint index, high-endpoint index) pairs in discovery order, plus
/// lookup tables. Insertion does not reject conflicting pairs; that is the
/// validator's job.
class Correspondence {
 public:
  Correspondence() = default;
  explicit Correspondence(std::uint32_t degree) : low_to_high_(degree, kUnmatched), high_to_low_(degree, kUnmatched) {}

  bool contains(SolutionIndex low, SolutionIndex high) const {
    return low < low_to_high_.size() && low_to_high_[low] == static_cast<std::int64_t>(high);
  }
  std::optional<SolutionIndex> match_of_low(SolutionIndex low) const { return lookup(low_to_high_, low); }
  std::optional<SolutionIndex> match_of_high(SolutionIndex high) const { return lookup(high_to_low_, high); }
  // Match of `start` when traversing in the given direction.
  std::optional<SolutionIndex> match_from(SolutionIndex start, bool reversed) const {
    return reversed ? match_of_high(start) : match_of_low(start);
  }

  void insert(SolutionIndex low, SolutionIndex high) {
    if (low >= low_to_high_.size() || high >= high_to_low_.size())
      throw std::out_of_range("correspondence index out of range");
    pairs_.emplace_back(low, high);
    low_to_high_[low] = high;
    high_to_low_[high] = low;
  }

  std::size_t size() const { return pairs_.size(); }
  const std::vector<std::pair<SolutionIndex, SolutionIndex>>& pairs() const { return pairs_; }

 private:
  static std::optional<SolutionIndex> lookup(const std::vector<std::int64_t>& table, SolutionIndex i) {
    if (i >= table.size() || table[i] == kUnmatched) return std::nullopt;
    return static_cast<SolutionIndex>(table[i]);
  }

  std::vector<std::pair<SolutionIndex, SolutionIndex>> pairs_;
  std::vector<std::int64_t> low_to_high_;
  std::vector<std::int64_t> high_to_low_;
};

/// Algorithm state (Q, C, A, F) plus an index of candidate starts per
/// directed edge: s is a candidate on ē when s ∈ Q_tail, s is unmatched in
/// C_e, s ∉ F_ē and no in-flight task on ē starts at s.
class SolverState {
 public:
  SolverState() = default;
  explicit SolverState(const HomotopyGraph& graph)
      : degree_(graph.degree()),
        known_(graph.node_count(), IndexSet(graph.degree())),
        correspondences_(graph.edge_count(), Correspondence(graph.degree())),
        failures_(graph.directed_edge_count(), IndexSet(graph.degree())),
        open_failures_(graph.directed_edge_count(), 0),
        inflight_by_edge_(graph.directed_edge_count()),
        candidates_(graph.directed_edge_count()) {}

  std::uint32_t degree() const { return degree_; }
  std::size_t node_count() const { return known_.size(); }

  const IndexSet& known(NodeId v) const { return known_.at(v); }
  const Correspondence& correspondence(EdgeId e) const { return correspondences_.at(e); }
  const IndexSet& failures(DirectedEdge de) const { return failures_.at(de.id()); }
  const std::vector<Task>& in_flight() const { return in_flight_; }
  const std::vector<SolutionIndex>& in_flight_starts(DirectedEdge de) const { return inflight_by_edge_.at(de.id()); }
  const std::set<SolutionIndex>& candidates(DirectedEdge de) const { return candidates_.at(de.id()); }

  // In-flight tasks on ē whose start is still unmatched in C_e, i.e. whose
  // outcome is not yet implied by known correspondences.
  std::size_t open_in_flight(DirectedEdge de) const {
    const Correspondence& c = correspondences_[de.edge()];
    std::size_t n = 0;
    for (SolutionIndex s : inflight_by_edge_[de.id()])
      if (!c.match_from(s, de.reversed())) ++n;
    return n;
  }

  // |F_ē| minus the failed starts later matched through the opposite direction.
  std::size_t open_failures(DirectedEdge de) const { return open_failures_.at(de.id()); }

  // Returns true if the solution was new.
  bool add_solution(const HomotopyGraph& graph, NodeId v, SolutionIndex s) {
    if (!known_.at(v).insert(s)) return false;
    for (DirectedEdge de : graph.outgoing(v)) {
      if (is_candidate(de, s)) candidates_[de.id()].insert(s);
    }
    return true;
  }

  void add_pair(EdgeId e, SolutionIndex low, SolutionIndex high) {
    correspondences_.at(e).insert(low, high);
    const DirectedEdge forward{e, false}, backward{e, true};
    if (failures_[forward.id()].contains(low)) --open_failures_[forward.id()];
    if (failures_[backward.id()].contains(high)) --open_failures_[backward.id()];
    candidates_[DirectedEdge{e, false}.id()].erase(low);
    candidates_[DirectedEdge{e, true}.id()].erase(high);
  }

  void add_failure(DirectedEdge de, SolutionIndex s) {
    if (failures_.at(de.id()).insert(s) && !correspondences_[de.edge()].match_from(s, de.reversed()))
      ++open_failures_[de.id()];
    candidates_[de.id()].erase(s);
  }

  void start_task(const Task& t) {
    in_flight_.push_back(t);
    inflight_by_edge_.at(t.edge.id()).push_back(t.start);
    candidates_[t.edge.id()].erase(t.start);
  }

  // Removes the in-flight task (start, edge). The start does not become a
  // candidate again: the caller records the outcome in C or F.
  void finish_task(SolutionIndex start, DirectedEdge de) {
    auto it = std::find_if(in_flight_.begin(), in_flight_.end(),
                           [&](const Task& t) { return t.start == start && t.edge == de; });
    if (it == in_flight_.end()) throw std::logic_error("finishing a task that is not in flight");
    in_flight_.erase(it);
    auto& starts = inflight_by_edge_[de.id()];
    starts.erase(std::find(starts.begin(), starts.end(), start));
  }

  bool saturated(NodeId v) const { return known_[v].size() == degree_; }

 private:
  bool is_candidate(DirectedEdge de, SolutionIndex s) const {
    if (correspondences_[de.edge()].match_from(s, de.reversed())) return false;
    if (failures_[de.id()].contains(s)) return false;
    const auto& starts = inflight_by_edge_[de.id()];
    return std::find(starts.begin(), starts.end(), s) == starts.end();
  }

  std::uint32_t degree_ = 0;
  std::vector<IndexSet> known_;
  std::vector<Correspondence> correspondences_;
  std::vector<IndexSet> failures_;
  std::vector<std::size_t> open_failures_;
  std::vector<Task> in_flight_;
  std::vector<std::vector<SolutionIndex>> inflight_by_edge_;
  std::vector<std::set<SolutionIndex>> candidates_;
};

enum class ViolationKind {
  NotPartialBijection,
  TooManySolutions,
  PairEndpointUnknown,
  FailureWithoutKnownStart,
  DuplicateTask,
  TaskRepeatsFailure,
  TaskStartUnknown,
  IndexOutOfRange,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Checks the SolverState invariants. A start may appear both in F_ē and in
/// the projection of C_e, and an in-flight task may start at a solution that
/// was matched by a concurrent task in the opposite direction: both arise in
/// reachable parallel runs and are not reported.
inline std::vector<Violation> validate_state(const SolverState& state, const HomotopyGraph& graph) {
  std::vector<Violation> out;
  const std::uint32_t d = graph.degree();
  auto report = [&](ViolationKind k, std::string msg) { out.push_back({k, std::move(msg)}); };

  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (state.known(v).size() > d) report(ViolationKind::TooManySolutions, "node " + std::to_string(v) + " has more than d solutions");
  }
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto& pairs = state.correspondence(e).pairs();
    if (pairs.size() > d) report(ViolationKind::TooManySolutions, "edge " + std::to_string(e) + " has more than d pairs");
    std::vector<int> low_seen(d, 0), high_seen(d, 0);
    bool bijective = true;
    for (auto [lo, hi] : pairs) {
      if (lo >= d || hi >= d) {
        report(ViolationKind::IndexOutOfRange, "edge " + std::to_string(e) + " pair index out of range");
        continue;
      }
      if (++low_seen[lo] > 1 || ++high_seen[hi] > 1) bijective = false;
      const Edge& edge = graph.edge(e);
      if (!state.known(edge.low).contains(lo) || !state.known(edge.high).contains(hi))
        report(ViolationKind::PairEndpointUnknown,
               "edge " + std::to_string(e) + " pair (" + std::to_string(lo) + "," + std::to_string(hi) + ") has an unknown endpoint");
    }
    if (!bijective) report(ViolationKind::NotPartialBijection, "edge " + std::to_string(e) + " is not a partial bijection");
  }
  for (std::uint32_t id = 0; id < graph.directed_edge_count(); ++id) {
    DirectedEdge de = DirectedEdge::from_id(id);
    const NodeId tail = graph.tail(de);
    for (SolutionIndex s : state.failures(de).to_vector()) {
      if (!state.known(tail).contains(s))
        report(ViolationKind::FailureWithoutKnownStart,
               "failure without known start: solution " + std::to_string(s) + " on directed edge " + std::to_string(id));
    }
  }
  const auto& tasks = state.in_flight();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    if (!state.known(graph.tail(t.edge)).contains(t.start))
      report(ViolationKind::TaskStartUnknown, "in-flight task starts at an unknown solution");
    if (state.failures(t.edge).contains(t.start))
      report(ViolationKind::TaskRepeatsFailure, "in-flight task repeats a known failure");
    for (std::size_t j = i + 1; j < tasks.size(); ++j)
      if (tasks[j].start == t.start && tasks[j].edge == t.edge)
        report(ViolationKind::DuplicateTask, "duplicate in-flight task");
  }
  return out;
}

enum class RunStatus { Saturated, Exhausted, BudgetExceeded };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Saturated: return "success";
    case RunStatus::Exhausted: return "exhausted";
    case RunStatus::BudgetExceeded: return "budget_exceeded";
  }
  return "unknown";
}

struct RunMetrics {
  Ticks wall_time = 0;
  std::uint64_t tracks = 0;  // completed tracks
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  // Successful tracks that rediscovered a pair already found by a concurrent
  // task in the opposite direction. Always 0 with one thread.
  std::uint64_t redundant_successes = 0;
  // Tasks still in flight when a node saturated.
  std::uint64_t abandoned = 0;
  std::vector<Ticks> busy_time;
  std::vector<Ticks> idle_time;
  RunStatus status = RunStatus::Exhausted;
  std::optional<NodeId> saturated_node;
  std::vector<std::uint32_t> final_known;

  double idle_fraction() const {
    if (wall_time == 0 || idle_time.empty()) return 0.0;
    long double idle = 0;
    for (Ticks t : idle_time) idle += static_cast<long double>(t);
    return static_cast<double>(idle / (static_cast<long double>(wall_time) * idle_time.size()));
  }
};

struct DurationModel {
  std::string kind = "negative_binomial_trials";  // or "measured"
  std::uint64_t successes = 10;                    // n
  double success_probability = 0.3;                // p

  friend bool operator==(const DurationModel&, const DurationModel&) = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  double alpha = 1.0;
  DurationModel duration_model;
  std::string source = "fabricated";  // or "harvested"
  std::string notes;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Ground truth consumed by the simulator. permutations[e][i] is the index at
/// edge(e).high reached from index i at edge(e).low. Flags and durations are
/// indexed by directed-edge id, then by start index.
struct OracleData {
  HomotopyGraph graph;
  std::vector<std::vector<SolutionIndex>> permutations;
  std::vector<std::vector<std::uint8_t>> success_flags;
  std::vector<std::vector<Ticks>> durations;
  std::string duration_unit = "ticks";
  Provenance provenance;
  // Harvested data only: per-node coefficient vectors (a_0..a_{d-1}) and
  // solution coordinates keyed by (node, index).
  std::vector<std::vector<Complex>> node_parameters;
  std::vector<std::vector<Complex>> solutions;

  bool succeeds(SolutionIndex s, DirectedEdge de) const { return success_flags[de.id()][s] != 0; }
  Ticks duration(SolutionIndex s, DirectedEdge de) const { return durations[de.id()][s]; }

  friend bool operator==(const OracleData&, const OracleData&) = default;
};

inline std::vector<SolutionIndex> inverse_permutation(const std::vector<SolutionIndex>& p) {
  std::vector<SolutionIndex> inv(p.size());
  for (SolutionIndex i = 0; i < p.size(); ++i) inv[p[i]] = i;
  return inv;
}

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural checks shared by the datafile loader and the simulator.
inline void check_oracle(const OracleData& o) {
  const auto& g = o.graph;
  const std::uint32_t d = g.degree();
  if (o.permutations.size() != g.edge_count()) throw OracleError("permutation count does not match edge count");
  for (std::size_t e = 0; e < o.permutations.size(); ++e) {
    const auto& p = o.permutations[e];
    if (p.size() != d) throw OracleError("malformed permutation: edge " + std::to_string(e) + " has wrong length");
    std::vector<std::uint8_t> seen(d, 0);
    for (SolutionIndex x : p) {
      if (x >= d || seen[x]) throw OracleError("malformed permutation: edge " + std::to_string(e) + " is not a bijection");
      seen[x] = 1;
    }
  }
  if (o.success_flags.size() != g.directed_edge_count())
    throw OracleError("missing direction flags: expected one flag array per directed edge");
  for (const auto& f : o.success_flags)
    if (f.size() != d) throw OracleError("missing direction flags: flag array has wrong length");
  if (o.durations.size() != g.directed_edge_count()) throw OracleError("duration count does not match directed edges");
  for (const auto& ds : o.durations) {
    if (ds.size() != d) throw OracleError("duration array has wrong length");
    for (Ticks t : ds)
      if (t == 0) throw OracleError("durations must be positive");
  }
}

}  // namespace monodromy
