#pragma once

#include <string>

#include <json.hpp>

#include "cbt/conditions.hpp"
#include "cbt/congest.hpp"
#include "cbt/dist.hpp"
#include "cbt/graph.hpp"
#include "cbt/tester.hpp"

namespace cbt {

using Json = nlohmann::ordered_json;

/// Turns "kind:a:b" into {"kind": kind, <positional keys>: a, b}. The keys
/// depend on the kind, e.g. "clique:5" -> {"kind":"clique","q":5} and
/// "bump:100:0.5" -> {"kind":"bump","n":100,"eps":0.5}. Strings starting
/// with '{' are parsed as JSON. Throws ParseError.
Json parse_spec_string(const std::string& text);

/// Distribution specs: uniform, bump, heavy, point, explicit. Missing n and
/// eps fall back to the defaults (0 means "no default").
Distribution distribution_from_json(const Json& spec, std::uint32_t default_n = 0,
                                    double default_eps = 0.0);

/// Graph specs: clique, disjoint_cliques, matching, star, bipartite, cycle,
/// path, random, power (of another spec), or an explicit
/// {"vertex_count", "edges", "owner"?}.
ComparisonGraph graph_from_json(const Json& spec);

/// Topology specs: path, cycle, star, clique, random_connected, or an
/// explicit {"vertex_count", "edges", "ids"?}.
Network network_from_json(const Json& spec);

Json to_json(const Distribution& p);
Json to_json(const ComparisonGraph& g);
Json to_json(const GraphStats& s);
Json to_json(const TestOutcome& o);
Json to_json(const ConditionReport& r);
Json to_json(const Plan& plan);
Json to_json(const CounterexampleResult& r);

/// Rebuilds a plan from its JSON form. Statistics, threshold and
/// certificate are recomputed from the blocks rather than trusted.
Plan plan_from_json(const Json& j);

/// Runs the planner named by {"model", "n", "eps", "k"?, "rates"?, "m_bits"?}.
Plan plan_from_request(const Json& request);

}  // namespace cbt
