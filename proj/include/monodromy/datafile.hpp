#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "monodromy/core_model.hpp"

namespace monodromy {

// Versioned JSON datafile shared by fabricated and harvested oracles.
//
//   version        integer, must equal kDatafileVersion
//   graph          {N, d, m} for complete graphs, or {N, d, edges: [[low, high, k], ...]};
//                  optional "parameters": per-node [[re, im], ...] coefficient arrays
//   permutations   array indexed by edge id; each an index array of length d
//   success_flags  array indexed by directed-edge id (2*edge + reversed); 0/1 arrays of length d
//   durations      array indexed by directed-edge id; positive integer arrays of length d
//   duration_unit  "ticks" | "microseconds" | "predictor_steps"
//   provenance     {seed, alpha, duration_model: {kind, n, p}, source, notes}
//   solutions      optional, harvested only: per-node [[re, im], ...] keyed by index

inline constexpr int kDatafileVersion = 1;

enum class DatafileErrorKind { Io, Parse, Version, Validation };

class DatafileError : public std::runtime_error {
 public:
  DatafileError(DatafileErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  DatafileErrorKind kind() const { return kind_; }

 private:
  DatafileErrorKind kind_;
};

namespace detail {

inline nlohmann::json complex_table_to_json(const std::vector<std::vector<Complex>>& table) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : table) {
    nlohmann::json r = nlohmann::json::array();
    for (const Complex& z : row) r.push_back({z.real(), z.imag()});
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<std::vector<Complex>> complex_table_from_json(const nlohmann::json& j) {
  std::vector<std::vector<Complex>> out;
  for (const auto& r : j) {
    std::vector<Complex> row;
    for (const auto& z : r) row.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline nlohmann::json oracle_to_json(const OracleData& o) {
  nlohmann::json graph = {{"N", o.graph.node_count()}, {"d", o.graph.degree()}};
  if (o.graph.is_complete()) {
    graph["m"] = o.graph.multiplicity();
  } else {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : o.graph.edges()) edges.push_back({e.low, e.high, e.multiplicity_index});
    graph["edges"] = std::move(edges);
  }
  if (!o.node_parameters.empty()) graph["parameters"] = detail::complex_table_to_json(o.node_parameters);

  nlohmann::json flags = nlohmann::json::array();
  for (const auto& f : o.success_flags) {
    nlohmann::json bits = nlohmann::json::array();
    for (std::uint8_t b : f) bits.push_back(b ? 1 : 0);
    flags.push_back(std::move(bits));
  }

  nlohmann::json j = {
      {"version", kDatafileVersion},
      {"graph", std::move(graph)},
      {"permutations", o.permutations},
      {"success_flags", std::move(flags)},
      {"durations", o.durations},
      {"duration_unit", o.duration_unit},
      {"provenance",
       {{"seed", o.provenance.seed},
        {"alpha", o.provenance.alpha},
        {"duration_model",
         {{"kind", o.provenance.duration_model.kind},
          {"n", o.provenance.duration_model.successes},
          {"p", o.provenance.duration_model.success_probability}}},
        {"source", o.provenance.source},
        {"notes", o.provenance.notes}}},
  };
  if (!o.solutions.empty()) j["solutions"] = detail::complex_table_to_json(o.solutions);
  return j;
}

inline OracleData oracle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version"))
    throw DatafileError(DatafileErrorKind::Version, "datafile has no version tag");
  if (j.at("version") != kDatafileVersion)
    throw DatafileError(DatafileErrorKind::Version, "unsupported datafile version " + j.at("version").dump() +
                                                        " (expected " + std::to_string(kDatafileVersion) + ")");
  OracleData o;
  try {
    const auto& g = j.at("graph");
    const auto n = g.at("N").get<std::uint32_t>();
    const auto d = g.at("d").get<std::uint32_t>();
    if (g.contains("m")) {
      o.graph = HomotopyGraph::complete(n, d, g.at("m").get<std::uint32_t>());
    } else {
      std::vector<Edge> edges;
      for (const auto& e : g.at("edges"))
        edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>(), e.at(2).get<std::uint32_t>()});
      o.graph = HomotopyGraph(n, d, std::move(edges));
    }
    if (g.contains("parameters")) o.node_parameters = detail::complex_table_from_json(g.at("parameters"));

    o.permutations = j.at("permutations").get<std::vector<std::vector<SolutionIndex>>>();
    if (!j.contains("success_flags"))
      throw DatafileError(DatafileErrorKind::Validation, "missing direction flags: no success_flags key");
    for (const auto& f : j.at("success_flags")) {
      std::vector<std::uint8_t> bits;
      bits.reserve(f.size());
      for (const auto& b : f) bits.push_back(b.get<int>() != 0 ? 1 : 0);
      o.success_flags.push_back(std::move(bits));
    }
    o.durations = j.at("durations").get<std::vector<std::vector<Ticks>>>();
    o.duration_unit = j.at("duration_unit").get<std::string>();

    const auto& p = j.at("provenance");
    o.provenance.seed = p.at("seed").get<std::uint64_t>();
    o.provenance.alpha = p.at("alpha").get<double>();
    const auto& dm = p.at("duration_model");
    o.provenance.duration_model.kind = dm.at("kind").get<std::string>();
    o.provenance.duration_model.successes = dm.at("n").get<std::uint64_t>();
    o.provenance.duration_model.success_probability = dm.at("p").get<double>();
    o.provenance.source = p.at("source").get<std::string>();
    o.provenance.notes = p.value("notes", std::string{});

    if (j.contains("solutions")) o.solutions = detail::complex_table_from_json(j.at("solutions"));
  } catch (const nlohmann::json::exception& e) {
    throw DatafileError(DatafileErrorKind::Validation, std::string("datafile schema error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DatafileError(DatafileErrorKind::Validation, std::string("invalid graph: ") + e.what());
  }
  try {
    check_oracle(o);
  } catch (const OracleError& e) {
    throw DatafileError(DatafileErrorKind::Validation, e.what());
  }
  return o;
}

inline std::string oracle_to_string(const OracleData& o) { return oracle_to_json(o).dump(); }

inline OracleData oracle_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DatafileError(DatafileErrorKind::Parse, std::string("datafile parse error: ") + e.what());
  }
  return oracle_from_json(j);
}

inline void save_oracle(const OracleData& o, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatafileError(DatafileErrorKind::Io, "cannot open for writing: " + path);
  out << oracle_to_string(o) << '\n';
  if (!out) throw DatafileError(DatafileErrorKind::Io, "write failed: " + path);
}

inline OracleData load_oracle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatafileError(DatafileErrorKind::Io, "file not found or unreadable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return oracle_from_string(buf.str());
}

}  // namespace monodromy
