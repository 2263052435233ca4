#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "monodromy/core_model.hpp"
#include "monodromy/rng.hpp"

namespace monodromy {

struct FabricationConfig {
  std::uint32_t nodes = 3;
  std::uint32_t degree = 10;
  std::uint32_t multiplicity = 1;
  double alpha = 1.0;
  std::uint64_t nb_successes = 10;
  double nb_probability = 0.3;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (nodes < 2) throw std::invalid_argument("fabrication needs at least 2 nodes");
    if (degree < 1) throw std::invalid_argument("degree must be positive");
    if (multiplicity < 1) throw std::invalid_argument("multiplicity must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (nb_successes < 1) throw std::invalid_argument("negative binomial n must be at least 1");
    if (!(nb_probability > 0.0 && nb_probability <= 1.0))
      throw std::invalid_argument("negative binomial p must lie in (0, 1]");
  }
};

inline Ticks sample_duration(Rng& rng, std::uint64_t nb_successes = 10, double nb_probability = 0.3) {
  return negative_binomial_trials(rng, nb_successes, nb_probability);
}

// Uniform permutation of {0, ..., n-1} (Fisher-Yates).
inline std::vector<SolutionIndex> random_permutation(Rng& rng, std::uint32_t n) {
  std::vector<SolutionIndex> p(n);
  std::iota(p.begin(), p.end(), 0U);
  for (std::uint32_t i = n; i > 1; --i) {
    auto j = static_cast<std::uint32_t>(uniform_below(rng, i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

/// Random complete-graph oracle: uniform independent edge permutations,
/// Bernoulli(alpha) success flags per (direction, start) and negative-binomial
/// durations. Each edge and directed edge draws from its own derived stream, so
/// the result depends only on the config.
inline OracleData fabricate(const FabricationConfig& config) {
  config.validate();
  OracleData o;
  o.graph = HomotopyGraph::complete(config.nodes, config.degree, config.multiplicity);
  const std::uint32_t d = config.degree;

  o.permutations.resize(o.graph.edge_count());
  for (EdgeId e = 0; e < o.graph.edge_count(); ++e) {
    Rng rng = make_rng(config.seed, "permutation", e);
    o.permutations[e] = random_permutation(rng, d);
  }
  o.success_flags.assign(o.graph.directed_edge_count(), std::vector<std::uint8_t>(d));
  o.durations.assign(o.graph.directed_edge_count(), std::vector<Ticks>(d));
  for (std::uint32_t id = 0; id < o.graph.directed_edge_count(); ++id) {
    Rng flags = make_rng(config.seed, "success", id);
    Rng times = make_rng(config.seed, "duration", id);
    for (SolutionIndex s = 0; s < d; ++s) {
      o.success_flags[id][s] = bernoulli(flags, config.alpha) ? 1 : 0;
      o.durations[id][s] = sample_duration(times, config.nb_successes, config.nb_probability);
    }
  }
  o.duration_unit = "ticks";
  o.provenance.seed = config.seed;
  o.provenance.alpha = config.alpha;
  o.provenance.duration_model = {"negative_binomial_trials", config.nb_successes, config.nb_probability};
  o.provenance.source = "fabricated";
  return o;
}

}  // namespace monodromy
