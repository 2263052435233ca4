#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "monodromy/fabricator.hpp"

using namespace monodromy;

namespace {

// Upper critical value of chi-square(df) at the 0.001 level (Wilson-Hilferty).
double chi_square_critical_001(double df) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

double chi_square(const std::vector<std::uint64_t>& counts, double expected) {
  double s = 0;
  for (auto c : counts) s += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return s;
}

FabricationConfig config(std::uint32_t n, std::uint32_t d, std::uint32_t m, double alpha, std::uint64_t seed) {
  FabricationConfig c;
  c.nodes = n;
  c.degree = d;
  c.multiplicity = m;
  c.alpha = alpha;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Fabricate, AlphaOneGivesAllSuccessFlags) {
  const OracleData o = fabricate(config(4, 30, 2, 1.0, 5));
  for (const auto& flags : o.success_flags)
    for (auto f : flags) EXPECT_EQ(f, 1);
}

TEST(Fabricate, AlphaZeroGivesNoSuccessFlags) {
  const OracleData o = fabricate(config(3, 30, 1, 0.0, 5));
  for (const auto& flags : o.success_flags)
    for (auto f : flags) EXPECT_EQ(f, 0);
}

TEST(Fabricate, DegreeOneGivesIdentityPermutations) {
  const OracleData o = fabricate(config(5, 1, 3, 0.5, 11));
  for (const auto& p : o.permutations) EXPECT_EQ(p, std::vector<SolutionIndex>{0});
}

TEST(Fabricate, ShapesAndBijections) {
  const OracleData o = fabricate(config(4, 17, 2, 0.6, 3));
  EXPECT_EQ(o.permutations.size(), 12U);
  EXPECT_EQ(o.success_flags.size(), 24U);
  EXPECT_EQ(o.durations.size(), 24U);
  for (const auto& p : o.permutations) {
    std::vector<SolutionIndex> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::vector<SolutionIndex> iota(17);
    std::iota(iota.begin(), iota.end(), 0U);
    EXPECT_EQ(sorted, iota);
  }
  for (const auto& row : o.durations)
    for (auto t : row) EXPECT_GE(t, 10U);
  EXPECT_NO_THROW(check_oracle(o));
  EXPECT_EQ(o.provenance.source, "fabricated");
  EXPECT_EQ(o.duration_unit, "ticks");
}

TEST(Fabricate, DeterministicGivenConfig) {
  EXPECT_EQ(fabricate(config(3, 50, 2, 0.8, 1234)), fabricate(config(3, 50, 2, 0.8, 1234)));
  EXPECT_NE(fabricate(config(3, 50, 2, 0.8, 1234)).permutations, fabricate(config(3, 50, 2, 0.8, 1235)).permutations);
}

TEST(Fabricate, RejectsInvalidConfig) {
  EXPECT_THROW(fabricate(config(3, 5, 1, 1.5, 1)), std::invalid_argument);
  EXPECT_THROW(fabricate(config(1, 5, 1, 0.5, 1)), std::invalid_argument);
  auto c = config(3, 5, 1, 0.5, 1);
  c.nb_probability = 0.0;
  EXPECT_THROW(fabricate(c), std::invalid_argument);
  c.nb_probability = 0.3;
  c.nb_successes = 0;
  EXPECT_THROW(fabricate(c), std::invalid_argument);
}

TEST(SampleDuration, MeanOverAMillionDraws) {
  Rng rng = make_rng(42, "duration-mean");
  double sum = 0;
  std::uint64_t minimum = UINT64_MAX;
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) {
    const auto t = sample_duration(rng);
    sum += static_cast<double>(t);
    minimum = std::min(minimum, t);
  }
  EXPECT_NEAR(sum / draws, 10.0 / 0.3, 0.3);
  EXPECT_GE(minimum, 10U);
}

TEST(SampleDuration, CertainSuccessIsExactlyN) {
  Rng rng = make_rng(1, "duration");
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_duration(rng, 10, 1.0), 10U);
}

TEST(RandomPermutation, FirstImageUniformAtDegreeThousand) {
  const std::uint32_t d = 1000;
  const int draws = 10'000;
  std::vector<std::uint64_t> counts(d, 0);
  for (int i = 0; i < draws; ++i) {
    Rng rng = make_rng(static_cast<std::uint64_t>(i), "permutation", 0);
    ++counts[random_permutation(rng, d)[0]];
  }
  EXPECT_LT(chi_square(counts, static_cast<double>(draws) / d), chi_square_critical_001(d - 1));
}

TEST(RandomPermutation, AllPermutationsUniformAtSmallDegree) {
  for (std::uint32_t d = 2; d <= 4; ++d) {
    std::map<std::vector<SolutionIndex>, std::uint64_t> seen;
    const int draws = 100'000;
    Rng rng = make_rng(7, "small-perm", d);
    for (int i = 0; i < draws; ++i) ++seen[random_permutation(rng, d)];
    std::uint64_t factorial = 1;
    for (std::uint32_t k = 2; k <= d; ++k) factorial *= k;
    ASSERT_EQ(seen.size(), factorial);
    std::vector<std::uint64_t> counts;
    for (const auto& [p, c] : seen) counts.push_back(c);
    EXPECT_LT(chi_square(counts, static_cast<double>(draws) / factorial),
              chi_square_critical_001(static_cast<double>(factorial - 1)));
  }
}

TEST(Fabricate, OppositeDirectionFlagsAreUncorrelated) {
  const int edges = 100'000;
  // 50 000 fabrications of one K_2 with m = 2 give 10^5 edges.
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  int n = 0;
  for (int i = 0; i < edges / 2; ++i) {
    auto c = config(2, 1, 2, 0.5, static_cast<std::uint64_t>(i));
    c.nb_probability = 1.0;
    const OracleData o = fabricate(c);
    for (EdgeId e = 0; e < 2; ++e) {
      const double x = o.success_flags[DirectedEdge{e, false}.id()][0];
      const double y = o.success_flags[DirectedEdge{e, true}.id()][0];
      sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
      ++n;
    }
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double r = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
  EXPECT_LT(std::abs(r), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sx / n, 0.5, 4 * 0.5 / std::sqrt(static_cast<double>(n)));
}
