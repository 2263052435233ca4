#pragma once

#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "monodromy/core_model.hpp"
#include "monodromy/fabricator.hpp"
#include "monodromy/potential.hpp"
#include "monodromy/rng.hpp"

namespace monodromy {

struct SimulationConfig {
  std::uint32_t threads = 1;
  PotentialKind potential;
  // Cap on scheduled tracks; defaults to 100 * N * d.
  std::optional<std::uint64_t> track_budget;
  // 0 breaks potential ties by lowest directed-edge id; any other value ranks
  // directed edges by a permutation derived from it.
  std::uint64_t tie_seed = 0;
  // Success probability assumed by the expectation ledger; defaults to the
  // oracle's provenance alpha.
  std::optional<double> model_alpha;
  bool validate_each_step = false;
  bool record_trace = false;

  void validate() const {
    if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
    if (track_budget && *track_budget < 1) throw std::invalid_argument("track budget must be at least 1");
    if (model_alpha && !(*model_alpha >= 0.0 && *model_alpha <= 1.0))
      throw std::invalid_argument("model alpha must lie in [0, 1]");
  }
};

struct TrackRecord {
  Task task;
  std::uint32_t thread = 0;
  Ticks completed_at = 0;
  bool success = false;
  SolutionIndex target = 0;  // meaningful on success only
  bool new_solution = false;
};

struct SimulationResult {
  RunMetrics metrics;
  SolverState state;
  std::vector<TrackRecord> trace;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Highest-potential candidate (s, ē) among directed edges with a fresh start;
/// ties go to the lowest edge rank, then the lowest start index. `edge_rank`
/// lists directed-edge ids in tie-break order (empty: by id).
inline std::optional<Task> select_task(const SolverState& state, const ExpectationLedger& ledger,
                                       const PotentialKind& potential, const HomotopyGraph& graph,
                                       const std::vector<std::uint32_t>& node_order,
                                       std::span<const std::uint32_t> edge_rank = {}) {
  std::optional<Task> best;
  double best_value = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<std::uint32_t>(graph.directed_edge_count());
  for (std::uint32_t i = 0; i < count; ++i) {
    const DirectedEdge de = DirectedEdge::from_id(edge_rank.empty() ? i : edge_rank[i]);
    const auto& starts = state.candidates(de);
    if (starts.empty()) continue;
    const double value = potential_of(potential, de, state, ledger, graph, node_order);
    if (!best || value > best_value) {
      best_value = value;
      best = Task{*starts.begin(), de, 0, 0};
    }
  }
  return best;
}

inline bool has_candidate(const SolverState& state, const HomotopyGraph& graph) {
  for (std::uint32_t id = 0; id < graph.directed_edge_count(); ++id)
    if (!state.candidates(DirectedEdge::from_id(id)).empty()) return true;
  return false;
}

namespace detail {

struct Completion {
  Ticks time;
  std::uint32_t thread;
  Task task;
};

struct LaterCompletion {
  bool operator()(const Completion& a, const Completion& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.thread > b.thread;
  }
};

}  // namespace detail

/// Runs the potential-driven monodromy loop on `threads` simulated threads
/// against the oracle, starting from one known solution. The loop stops when a
/// node is saturated, when no candidate is left and nothing is in flight, or
/// when the track budget is spent and the remaining tasks have drained.
inline SimulationResult run(const OracleData& oracle, const SimulationConfig& config, NodeId seed_node = 0,
                            SolutionIndex seed_solution = 0) {
  config.validate();
  try {
    check_oracle(oracle);
  } catch (const OracleError& e) {
    throw SimulationError(std::string("oracle/graph mismatch: ") + e.what());
  }
  const HomotopyGraph& graph = oracle.graph;
  const std::uint32_t d = graph.degree();
  if (seed_node >= graph.node_count()) throw SimulationError("seed node out of range");
  if (seed_solution >= d) throw SimulationError("invalid seed solution");

  std::vector<std::vector<SolutionIndex>> inverse(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) inverse[e] = inverse_permutation(oracle.permutations[e]);

  std::vector<std::uint32_t> edge_rank;
  if (config.tie_seed != 0) {
    Rng rng = make_rng(config.tie_seed, "tie-break");
    edge_rank = random_permutation(rng, static_cast<std::uint32_t>(graph.directed_edge_count()));
  }
  const auto node_order = appearance_order(graph.node_count(), seed_node);
  const double alpha = config.model_alpha.value_or(oracle.provenance.alpha);
  const std::uint64_t budget =
      config.track_budget.value_or(100ULL * graph.node_count() * static_cast<std::uint64_t>(d));

  SimulationResult result;
  SolverState& state = result.state;
  RunMetrics& m = result.metrics;
  state = SolverState(graph);
  state.add_solution(graph, seed_node, seed_solution);
  ExpectationLedger ledger = ExpectationLedger::recompute(state, graph, alpha);
  m.busy_time.assign(config.threads, 0);

  auto check = [&] {
    if (!config.validate_each_step) return;
    auto violations = validate_state(state, graph);
    if (!violations.empty()) throw SimulationError("state invariant violated: " + violations.front().message);
  };

  std::set<std::uint32_t> free_threads;
  for (std::uint32_t t = 0; t < config.threads; ++t) free_threads.insert(t);
  std::priority_queue<detail::Completion, std::vector<detail::Completion>, detail::LaterCompletion> queue;

  Ticks now = 0;
  std::uint64_t scheduled = 0;
  bool done = state.saturated(seed_node);
  if (done) {
    m.status = RunStatus::Saturated;
    m.saturated_node = seed_node;
  }

  while (!done) {
    while (!free_threads.empty() && scheduled < budget) {
      std::optional<Task> task = select_task(state, ledger, config.potential, graph, node_order, edge_rank);
      if (!task) break;
      const std::uint32_t thread = *free_threads.begin();
      free_threads.erase(free_threads.begin());
      task->scheduled_at = now;
      task->duration = oracle.durations[task->edge.id()][task->start];
      ledger.submit(state, graph, task->edge);
      state.start_task(*task);
      queue.push({now + task->duration, thread, *task});
      ++scheduled;
      check();
    }
    if (queue.empty()) {
      m.status = (scheduled >= budget && has_candidate(state, graph)) ? RunStatus::BudgetExceeded
                                                                       : RunStatus::Exhausted;
      break;
    }

    const detail::Completion ev = queue.top();
    queue.pop();
    now = ev.time;
    m.busy_time[ev.thread] += ev.task.duration;
    free_threads.insert(ev.thread);
    state.finish_task(ev.task.start, ev.task.edge);
    ++m.tracks;

    const DirectedEdge de = ev.task.edge;
    const NodeId head = graph.head(de);
    TrackRecord record{ev.task, ev.thread, now, false, 0, false};
    if (oracle.success_flags[de.id()][ev.task.start] != 0) {
      ++m.successes;
      const SolutionIndex target =
          de.reversed() ? inverse[de.edge()][ev.task.start] : oracle.permutations[de.edge()][ev.task.start];
      record.success = true;
      record.target = target;
      const SolutionIndex low = de.reversed() ? target : ev.task.start;
      const SolutionIndex high = de.reversed() ? ev.task.start : target;
      if (state.correspondence(de.edge()).contains(low, high)) {
        ++m.redundant_successes;
      } else {
        record.new_solution = state.add_solution(graph, head, target);
        state.add_pair(de.edge(), low, high);
      }
    } else {
      ++m.failures;
      state.add_failure(de, ev.task.start);
    }
    if (config.record_trace) result.trace.push_back(record);
    ledger = ExpectationLedger::recompute(state, graph, alpha);
    check();

    if (state.saturated(head)) {
      m.status = RunStatus::Saturated;
      m.saturated_node = head;
      done = true;
    }
  }

  m.wall_time = now;
  while (!queue.empty()) {
    const detail::Completion& ev = queue.top();
    m.busy_time[ev.thread] += now - ev.task.scheduled_at;
    ++m.abandoned;
    queue.pop();
  }
  m.idle_time.resize(config.threads);
  for (std::uint32_t t = 0; t < config.threads; ++t) m.idle_time[t] = now - m.busy_time[t];
  m.final_known.resize(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) m.final_known[v] = static_cast<std::uint32_t>(state.known(v).size());
  return result;
}

struct ParallelMetrics {
  double speedup = 0.0;
  double efficiency_pct = 0.0;
  double idle_fraction = 0.0;
};

/// Speedup T_1 / T_p, efficiency S / p in percent, and the idle share of the
/// parallel run's thread time.
inline ParallelMetrics compute_metrics(const RunMetrics& parallel, Ticks sequential_wall_time) {
  if (parallel.wall_time == 0) throw std::domain_error("parallel wall time is zero");
  const auto p = static_cast<double>(parallel.busy_time.size());
  ParallelMetrics out;
  out.speedup = static_cast<double>(sequential_wall_time) / static_cast<double>(parallel.wall_time);
  out.efficiency_pct = out.speedup / p * 100.0;
  out.idle_fraction = parallel.idle_fraction();
  return out;
}

}  // namespace monodromy
