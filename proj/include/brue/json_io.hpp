#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "network.hpp"
#include "stochastic.hpp"

namespace brue {

using json = nlohmann::json;

namespace detail {

inline CostPolynomial cost_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("edge cost must be a coefficient array");
  std::vector<double> coef;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("cost coefficients must be numbers");
    coef.push_back(v.get<double>());
  }
  try {
    return CostPolynomial{std::move(coef)};
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

inline Network network_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("network document must be an object");
  for (const char* key : {"vertices", "edges", "trips"})
    if (!j.contains(key)) throw ParseError(std::string("missing '") + key + "' field");

  std::vector<std::string> vertices;
  for (const auto& v : j.at("vertices")) {
    if (!v.is_string()) throw ParseError("vertex ids must be strings");
    vertices.push_back(v.get<std::string>());
  }

  // Vertex lookup must precede Network construction.
  auto index_of = [&](const json& id, const char* what) {
    if (!id.is_string()) throw ParseError(std::string(what) + " must name a vertex");
    const std::string s = id.get<std::string>();
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == s) return static_cast<int>(i);
    throw ParseError("unknown vertex '" + s + "'");
  };

  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    Edge ed;
    ed.id = e.at("id").get<std::string>();
    ed.tail = index_of(e.at("tail"), "edge tail");
    ed.head = index_of(e.at("head"), "edge head");
    ed.cost = detail::cost_from_json(e.at("cost"));
    edges.push_back(std::move(ed));
  }

  std::vector<Trip> trips;
  for (const auto& t : j.at("trips")) {
    Trip tr;
    tr.origin = index_of(t.at("origin"), "trip origin");
    tr.destination = index_of(t.at("destination"), "trip destination");
    if (!t.at("demand").is_number()) throw ParseError("trip demand must be a number");
    tr.demand = t.at("demand").get<double>();
    trips.push_back(tr);
  }

  try {
    return Network(std::move(vertices), std::move(edges), std::move(trips));
  } catch (const NoPath&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

inline json network_to_json(const Network& net) {
  json j;
  j["vertices"] = net.vertex_ids();
  j["edges"] = json::array();
  for (const Edge& e : net.edges()) {
    j["edges"].push_back({{"id", e.id},
                          {"tail", net.vertex_ids()[static_cast<std::size_t>(e.tail)]},
                          {"head", net.vertex_ids()[static_cast<std::size_t>(e.head)]},
                          {"cost", e.cost.coefficients()}});
  }
  j["trips"] = json::array();
  for (const Trip& t : net.trips()) {
    j["trips"].push_back({{"origin", net.vertex_ids()[static_cast<std::size_t>(t.origin)]},
                          {"destination", net.vertex_ids()[static_cast<std::size_t>(t.destination)]},
                          {"demand", t.demand}});
  }
  return j;
}

inline bool looks_stochastic(const json& j) { return j.is_object() && j.contains("states"); }

// Stochastic networks extend the plain format with a "states" array; edges a
// state leaves out keep their base cost.
inline StochasticNetwork stochastic_from_json(const json& j) {
  Network base = network_from_json(j);
  if (!j.contains("states") || !j.at("states").is_array() || j.at("states").empty())
    throw ParseError("stochastic network needs a nonempty 'states' array");

  std::vector<StateCosts> states;
  std::vector<double> prior;
  for (const auto& s : j.at("states")) {
    StateCosts sc;
    sc.name = s.contains("name") ? s.at("name").get<std::string>()
                                 : "w" + std::to_string(states.size());
    if (!s.contains("prior") || !s.at("prior").is_number())
      throw ParseError("state '" + sc.name + "' needs a numeric 'prior'");
    prior.push_back(s.at("prior").get<double>());
    for (const Edge& e : base.edges()) sc.costs.push_back(e.cost);
    if (s.contains("edge_costs")) {
      for (const auto& [id, c] : s.at("edge_costs").items()) {
        bool found = false;
        for (int e = 0; e < base.edge_count(); ++e)
          if (base.edge(e).id == id) {
            sc.costs[static_cast<std::size_t>(e)] = detail::cost_from_json(c);
            found = true;
            break;
          }
        if (!found) throw ParseError("state '" + sc.name + "' overrides unknown edge '" + id + "'");
      }
    }
    states.push_back(std::move(sc));
  }

  try {
    return StochasticNetwork(std::move(base), std::move(states), std::move(prior));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

inline json stochastic_to_json(const StochasticNetwork& snet) {
  json j = network_to_json(snet.base());
  j["states"] = json::array();
  for (int w = 0; w < snet.state_count(); ++w) {
    const StateCosts& s = snet.states()[static_cast<std::size_t>(w)];
    json js{{"name", s.name}, {"prior", snet.prior()[static_cast<std::size_t>(w)]}};
    json costs = json::object();
    for (int e = 0; e < snet.base().edge_count(); ++e)
      if (!(s.costs[static_cast<std::size_t>(e)] == snet.base().edge(e).cost))
        costs[snet.base().edge(e).id] = s.costs[static_cast<std::size_t>(e)].coefficients();
    if (!costs.empty()) js["edge_costs"] = std::move(costs);
    j["states"].push_back(std::move(js));
  }
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("cannot parse '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

inline Network load_network(const std::string& path) {
  return network_from_json(read_json_file(path));
}

inline StochasticNetwork load_stochastic_network(const std::string& path) {
  return stochastic_from_json(read_json_file(path));
}

}  // namespace brue
