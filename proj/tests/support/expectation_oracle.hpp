#pragma once

// Brute-force expected known-solution counts for tiny two-node states:
// averages over every permutation consistent with the known correspondences
// and every success/failure pattern of the in-flight tasks.

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <vector>

#include "monodromy/core_model.hpp"
#include "monodromy/rng.hpp"

namespace oracle {

using monodromy::DirectedEdge;
using monodromy::HomotopyGraph;
using monodromy::SolutionIndex;
using monodromy::SolverState;

struct TinyTask {
  SolutionIndex start;
  std::uint32_t directed_id;
};

struct TinyState {
  std::uint32_t d = 0;
  std::uint32_t m = 1;
  std::array<std::vector<SolutionIndex>, 2> known;
  std::vector<std::vector<std::pair<SolutionIndex, SolutionIndex>>> pairs;  // per edge, (node0, node1)
  std::vector<std::vector<SolutionIndex>> failures;                         // per directed id
  std::vector<TinyTask> tasks;

  HomotopyGraph graph() const { return HomotopyGraph::complete(2, d, m); }

  SolverState to_solver_state(const HomotopyGraph& g) const {
    SolverState s(g);
    for (std::uint32_t v = 0; v < 2; ++v)
      for (auto x : known[v]) s.add_solution(g, v, x);
    for (std::uint32_t e = 0; e < m; ++e)
      for (auto [lo, hi] : pairs[e]) s.add_pair(e, lo, hi);
    for (std::uint32_t id = 0; id < 2 * m; ++id)
      for (auto x : failures[id]) s.add_failure(DirectedEdge::from_id(id), x);
    for (const auto& t : tasks) s.start_task({t.start, DirectedEdge::from_id(t.directed_id), 0, 1});
    return s;
  }
};

// All permutations p of {0..d-1} with p[lo] = hi for every known pair.
inline std::vector<std::vector<SolutionIndex>> consistent_permutations(
    std::uint32_t d, const std::vector<std::pair<SolutionIndex, SolutionIndex>>& pairs) {
  std::vector<std::vector<SolutionIndex>> out;
  std::vector<SolutionIndex> p(d);
  std::iota(p.begin(), p.end(), 0U);
  do {
    bool ok = true;
    for (auto [lo, hi] : pairs) ok = ok && p[lo] == hi;
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Exact E[|Q_v|] after every in-flight task completes, for v = 0, 1.
inline std::array<double, 2> exact_expected(const TinyState& st, double alpha) {
  std::vector<std::vector<std::vector<SolutionIndex>>> perms;
  for (std::uint32_t e = 0; e < st.m; ++e) perms.push_back(consistent_permutations(st.d, st.pairs[e]));
  std::array<double, 2> total{0, 0};
  const std::size_t k = st.tasks.size();
  std::vector<std::size_t> choice(st.m, 0);
  double perm_weight = 1.0;
  for (const auto& p : perms) perm_weight /= static_cast<double>(p.size());

  std::function<void(std::uint32_t)> recurse = [&](std::uint32_t e) {
    if (e < st.m) {
      for (choice[e] = 0; choice[e] < perms[e].size(); ++choice[e]) recurse(e + 1);
      return;
    }
    for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
      double w = perm_weight;
      std::array<std::vector<char>, 2> seen;
      for (int v = 0; v < 2; ++v) {
        seen[v].assign(st.d, 0);
        for (auto x : st.known[v]) seen[v][x] = 1;
      }
      for (std::size_t i = 0; i < k; ++i) {
        const bool ok = (mask >> i) & 1U;
        w *= ok ? alpha : 1.0 - alpha;
        if (!ok) continue;
        const auto de = DirectedEdge::from_id(st.tasks[i].directed_id);
        const auto& p = perms[de.edge()][choice[de.edge()]];
        if (de.reversed()) {
          const auto it = std::find(p.begin(), p.end(), st.tasks[i].start);
          seen[0][static_cast<std::size_t>(it - p.begin())] = 1;
        } else {
          seen[1][p[st.tasks[i].start]] = 1;
        }
      }
      if (w == 0.0) continue;
      for (int v = 0; v < 2; ++v) total[v] += w * static_cast<double>(std::count(seen[v].begin(), seen[v].end(), 1));
    }
  };
  recurse(0);
  return total;
}

namespace detail {

inline void subsets_of(const std::vector<SolutionIndex>& base, std::vector<std::vector<SolutionIndex>>& out) {
  const std::size_t n = base.size();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    std::vector<SolutionIndex> s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1U) s.push_back(base[i]);
    out.push_back(s);
  }
}

// Every partial bijection between {0..d-1} and {0..d-1}, as pair lists.
inline void partial_bijections(std::uint32_t d, std::vector<std::vector<std::pair<SolutionIndex, SolutionIndex>>>& out) {
  std::vector<std::pair<SolutionIndex, SolutionIndex>> cur;
  std::vector<char> used(d, 0);
  std::function<void(SolutionIndex)> rec = [&](SolutionIndex lo) {
    if (lo == d) {
      out.push_back(cur);
      return;
    }
    rec(lo + 1);
    for (SolutionIndex hi = 0; hi < d; ++hi) {
      if (used[hi]) continue;
      used[hi] = 1;
      cur.emplace_back(lo, hi);
      rec(lo + 1);
      cur.pop_back();
      used[hi] = 0;
    }
  };
  rec(0);
}

}  // namespace detail

/// Calls `visit` on every valid single-edge (m = 1) two-node state of degree d
/// with at most `max_tasks` in-flight tasks. Known sets contain the matched
/// endpoints, failures are unmatched known starts, and tasks are distinct
/// (start, direction) pairs from known starts that did not fail.
template <class Visit>
void for_each_state(std::uint32_t d, std::size_t max_tasks, Visit visit) {
  std::vector<std::vector<std::pair<SolutionIndex, SolutionIndex>>> bijections;
  detail::partial_bijections(d, bijections);
  for (const auto& pairs : bijections) {
    std::array<std::vector<SolutionIndex>, 2> matched, free_;
    for (int v = 0; v < 2; ++v) {
      std::vector<char> in(d, 0);
      for (auto [lo, hi] : pairs) in[v == 0 ? lo : hi] = 1;
      for (SolutionIndex x = 0; x < d; ++x) (in[x] ? matched[v] : free_[v]).push_back(x);
    }
    std::array<std::vector<std::vector<SolutionIndex>>, 2> extra;
    for (int v = 0; v < 2; ++v) detail::subsets_of(free_[v], extra[v]);
    for (const auto& x0 : extra[0]) {
      for (const auto& x1 : extra[1]) {
        TinyState st;
        st.d = d;
        st.pairs = {pairs};
        st.known[0] = matched[0];
        st.known[0].insert(st.known[0].end(), x0.begin(), x0.end());
        st.known[1] = matched[1];
        st.known[1].insert(st.known[1].end(), x1.begin(), x1.end());
        // Failed starts: any subset of the unmatched known starts per direction.
        std::vector<std::vector<SolutionIndex>> f0, f1;
        detail::subsets_of(x0, f0);
        detail::subsets_of(x1, f1);
        for (const auto& fa : f0) {
          for (const auto& fb : f1) {
            st.failures = {fa, fb};
            std::vector<TinyTask> options;
            for (std::uint32_t dir = 0; dir < 2; ++dir)
              for (auto s : st.known[dir])
                if (std::find(st.failures[dir].begin(), st.failures[dir].end(), s) == st.failures[dir].end())
                  options.push_back({s, dir});
            const std::size_t n = options.size();
            for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
              if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_tasks) continue;
              st.tasks.clear();
              for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1U) st.tasks.push_back(options[i]);
              visit(static_cast<const TinyState&>(st));
            }
          }
        }
      }
    }
  }
}

/// Random valid two-node state with m parallel edges: each edge gets a random
/// partial bijection, known sets cover the matched endpoints plus random extras,
/// failures are random unmatched known starts, and up to `max_tasks` distinct
/// in-flight tasks start at known, non-failed solutions.
inline TinyState random_state(monodromy::Rng& rng, std::uint32_t d, std::uint32_t m, std::size_t max_tasks) {
  using monodromy::uniform_below;
  TinyState st;
  st.d = d;
  st.m = m;
  std::array<std::vector<char>, 2> in;
  in[0].assign(d, 0);
  in[1].assign(d, 0);
  st.pairs.resize(m);
  for (std::uint32_t e = 0; e < m; ++e) {
    std::vector<SolutionIndex> lo(d), hi(d);
    std::iota(lo.begin(), lo.end(), 0U);
    std::iota(hi.begin(), hi.end(), 0U);
    for (std::uint32_t i = d; i > 1; --i) std::swap(lo[i - 1], lo[uniform_below(rng, i)]);
    for (std::uint32_t i = d; i > 1; --i) std::swap(hi[i - 1], hi[uniform_below(rng, i)]);
    const auto c = static_cast<std::uint32_t>(uniform_below(rng, d + 1));
    for (std::uint32_t i = 0; i < c; ++i) {
      st.pairs[e].emplace_back(lo[i], hi[i]);
      in[0][lo[i]] = in[1][hi[i]] = 1;
    }
  }
  for (int v = 0; v < 2; ++v)
    for (SolutionIndex x = 0; x < d; ++x)
      if (in[v][x] || uniform_below(rng, 2)) st.known[v].push_back(x);
  st.failures.assign(2 * m, {});
  std::vector<TinyTask> options;
  for (std::uint32_t id = 0; id < 2 * m; ++id) {
    const auto de = DirectedEdge::from_id(id);
    const int tail = de.reversed() ? 1 : 0;
    for (auto s : st.known[tail]) {
      bool matched = false;
      for (auto [a, b] : st.pairs[de.edge()]) matched = matched || (tail == 0 ? a : b) == s;
      if (!matched && uniform_below(rng, 4) == 0)
        st.failures[id].push_back(s);
      else
        options.push_back({s, id});
    }
  }
  for (std::size_t i = options.size(); i > 1; --i) std::swap(options[i - 1], options[uniform_below(rng, i)]);
  const std::size_t n = std::min<std::size_t>(options.size(), uniform_below(rng, max_tasks + 1));
  st.tasks.assign(options.begin(), options.begin() + static_cast<std::ptrdiff_t>(n));
  return st;
}

}  // namespace oracle
