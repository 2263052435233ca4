#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <map>

#include "monodromy/core_model.hpp"
#include "monodromy/datafile.hpp"
#include "monodromy/fabricator.hpp"

using namespace monodromy;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("monodromy_core_" + name);
}

bool has_kind(const std::vector<Violation>& v, ViolationKind k) {
  for (const auto& x : v)
    if (x.kind == k) return true;
  return false;
}

}  // namespace

TEST(HomotopyGraph, CompleteGraphEdgeCount) {
  for (std::uint32_t n = 2; n <= 7; ++n)
    for (std::uint32_t m = 1; m <= 4; ++m) {
      const auto g = HomotopyGraph::complete(n, 5, m);
      EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(m) * n * (n - 1) / 2);
      EXPECT_EQ(g.multiplicity(), m);
    }
}

TEST(HomotopyGraph, CompleteGraphHasMParallelEdgesPerPair) {
  const auto g = HomotopyGraph::complete(4, 3, 3);
  std::map<std::pair<NodeId, NodeId>, int> count;
  for (const Edge& e : g.edges()) {
    EXPECT_LT(e.low, e.high);
    ++count[{e.low, e.high}];
  }
  EXPECT_EQ(count.size(), 6U);
  for (const auto& [pair, c] : count) EXPECT_EQ(c, 3);
}

TEST(HomotopyGraph, RejectsLoopsAndBadSizes) {
  EXPECT_THROW(HomotopyGraph(3, 2, {{1, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(HomotopyGraph(3, 2, {{2, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(HomotopyGraph(1, 2, {}), std::invalid_argument);
  EXPECT_THROW(HomotopyGraph(2, 0, {{0, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(HomotopyGraph(2, 2, {{0, 2, 0}}), std::invalid_argument);
}

TEST(DirectedEdge, ReverseTwiceIsIdentityAndEndpointsSwap) {
  const auto g = HomotopyGraph::complete(3, 2, 2);
  for (std::uint32_t id = 0; id < g.directed_edge_count(); ++id) {
    const auto de = DirectedEdge::from_id(id);
    EXPECT_EQ(de.reverse().reverse(), de);
    EXPECT_EQ(de.id(), id);
    EXPECT_EQ(g.tail(de), g.head(de.reverse()));
    EXPECT_EQ(g.head(de), g.tail(de.reverse()));
  }
}

TEST(ValidateState, FreshStateWithSeedIsValid) {
  const auto g = HomotopyGraph::complete(3, 4, 1);
  SolverState s(g);
  s.add_solution(g, 0, 0);
  EXPECT_TRUE(validate_state(s, g).empty());
}

TEST(ValidateState, DuplicateLeftIndexIsNotAPartialBijection) {
  const auto g = HomotopyGraph::complete(2, 5, 1);
  SolverState s(g);
  for (SolutionIndex i : {1U}) s.add_solution(g, 0, i);
  for (SolutionIndex i : {3U, 4U}) s.add_solution(g, 1, i);
  s.add_pair(0, 1, 3);
  s.add_pair(0, 1, 4);
  const auto v = validate_state(s, g);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].kind, ViolationKind::NotPartialBijection);
}

TEST(ValidateState, FailureWithoutKnownStart) {
  const auto g = HomotopyGraph::complete(2, 3, 1);
  SolverState s(g);
  s.add_solution(g, 0, 0);
  s.add_failure(DirectedEdge{0, false}, 2);
  const auto v = validate_state(s, g);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].kind, ViolationKind::FailureWithoutKnownStart);
}

TEST(ValidateState, ReportsUnknownPairEndpointAndDuplicateTasks) {
  const auto g = HomotopyGraph::complete(2, 3, 1);
  SolverState s(g);
  s.add_solution(g, 0, 0);
  s.add_pair(0, 0, 2);
  EXPECT_TRUE(has_kind(validate_state(s, g), ViolationKind::PairEndpointUnknown));

  SolverState t(g);
  t.add_solution(g, 0, 1);
  t.start_task({1, DirectedEdge{0, false}, 0, 5});
  t.start_task({1, DirectedEdge{0, false}, 0, 5});
  EXPECT_TRUE(has_kind(validate_state(t, g), ViolationKind::DuplicateTask));
}

TEST(SolverState, CandidatesTrackKnownMatchedFailedAndInFlight) {
  const auto g = HomotopyGraph::complete(2, 4, 1);
  const DirectedEdge fwd{0, false}, bwd{0, true};
  SolverState s(g);
  s.add_solution(g, 0, 0);
  s.add_solution(g, 0, 1);
  s.add_solution(g, 0, 2);
  EXPECT_EQ(s.candidates(fwd), (std::set<SolutionIndex>{0, 1, 2}));
  EXPECT_TRUE(s.candidates(bwd).empty());

  s.start_task({0, fwd, 0, 1});
  EXPECT_EQ(s.candidates(fwd), (std::set<SolutionIndex>{1, 2}));
  EXPECT_EQ(s.open_in_flight(fwd), 1U);
  s.finish_task(0, fwd);
  s.add_solution(g, 1, 3);
  s.add_pair(0, 0, 3);
  s.add_failure(fwd, 1);
  EXPECT_EQ(s.candidates(fwd), (std::set<SolutionIndex>{2}));
  EXPECT_TRUE(s.candidates(bwd).empty());  // 3 is matched
  EXPECT_EQ(s.open_failures(fwd), 1U);

  // A failed start later matched through the opposite direction is no longer open.
  s.add_solution(g, 1, 2);
  EXPECT_EQ(s.candidates(bwd), (std::set<SolutionIndex>{2}));
  s.add_pair(0, 1, 2);
  EXPECT_EQ(s.open_failures(fwd), 0U);
  EXPECT_TRUE(validate_state(s, g).empty());
}

TEST(Datafile, RoundTripFabricatedInstanceIsIdentical) {
  FabricationConfig c;
  c.nodes = 3;
  c.degree = 4;
  c.multiplicity = 2;
  c.alpha = 0.7;
  c.seed = 99;
  const OracleData o = fabricate(c);
  const auto path = temp_file("roundtrip.json");
  save_oracle(o, path.string());
  const OracleData back = load_oracle(path.string());
  EXPECT_EQ(back, o);
  EXPECT_EQ(oracle_to_string(back), oracle_to_string(o));
  std::filesystem::remove(path);
}

TEST(Datafile, RoundTripKeepsExplicitEdgesAndNumericTables) {
  OracleData o;
  o.graph = HomotopyGraph(3, 2, {{0, 1, 0}, {1, 2, 0}});
  o.permutations = {{1, 0}, {0, 1}};
  o.success_flags = {{1, 0}, {1, 1}, {0, 1}, {1, 1}};
  o.durations = {{3, 4}, {5, 6}, {7, 8}, {9, 10}};
  o.duration_unit = "microseconds";
  o.provenance.source = "harvested";
  o.provenance.alpha = 0.75;
  o.node_parameters = {{{1.5, -2.0}, {0.25, 0.0}}, {{0.0, 1.0}, {1.0, 0.0}}, {{-1.0, 0.0}, {2.0, 3.0}}};
  o.solutions = {{{0.1, 0.2}, {0.3, 0.4}}, {{1.0, 0.0}, {-1.0, 0.0}}, {{0.0, 2.0}, {0.0, -2.0}}};
  const OracleData back = oracle_from_string(oracle_to_string(o));
  EXPECT_EQ(back, o);
  EXPECT_FALSE(back.graph.is_complete());
}

TEST(Datafile, MalformedPermutationIsRejected) {
  FabricationConfig c;
  c.nodes = 2;
  c.degree = 4;
  auto j = oracle_to_json(fabricate(c));
  j["permutations"][0] = {0, 0, 1, 2};
  try {
    oracle_from_json(j);
    FAIL() << "expected an error";
  } catch (const DatafileError& e) {
    EXPECT_EQ(e.kind(), DatafileErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("malformed permutation"), std::string::npos);
  }
}

TEST(Datafile, VersionMismatchIsRejected) {
  FabricationConfig c;
  c.nodes = 2;
  c.degree = 2;
  auto j = oracle_to_json(fabricate(c));
  j["version"] = 99;
  try {
    oracle_from_json(j);
    FAIL() << "expected an error";
  } catch (const DatafileError& e) {
    EXPECT_EQ(e.kind(), DatafileErrorKind::Version);
  }
}

TEST(Datafile, MissingDirectionFlagsAreRejected) {
  FabricationConfig c;
  c.nodes = 2;
  c.degree = 3;
  auto j = oracle_to_json(fabricate(c));
  j["success_flags"].erase(1);
  try {
    oracle_from_json(j);
    FAIL() << "expected an error";
  } catch (const DatafileError& e) {
    EXPECT_EQ(e.kind(), DatafileErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("missing direction flags"), std::string::npos);
  }
  j.erase("success_flags");
  EXPECT_THROW(oracle_from_json(j), DatafileError);
}

TEST(Datafile, NonPositiveDurationIsRejected) {
  FabricationConfig c;
  c.nodes = 2;
  c.degree = 3;
  auto j = oracle_to_json(fabricate(c));
  j["durations"][0][1] = 0;
  EXPECT_THROW(oracle_from_json(j), DatafileError);
}

TEST(Datafile, MissingFileAndGarbageAreDistinguished) {
  try {
    load_oracle("/nonexistent/definitely/missing.json");
    FAIL();
  } catch (const DatafileError& e) {
    EXPECT_EQ(e.kind(), DatafileErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("file not found"), std::string::npos);
  }
  try {
    oracle_from_string("{ not json");
    FAIL();
  } catch (const DatafileError& e) {
    EXPECT_EQ(e.kind(), DatafileErrorKind::Parse);
  }
}

TEST(RunMetrics, IdleFraction) {
  RunMetrics m;
  m.wall_time = 100;
  m.idle_time = {0, 50};
  EXPECT_DOUBLE_EQ(m.idle_fraction(), 0.25);
  m.idle_time = {0, 0};
  EXPECT_DOUBLE_EQ(m.idle_fraction(), 0.0);
}
