#include "cbt/serialize.hpp"

#include <map>
#include <sstream>
#include <vector>

#include "cbt/error.hpp"

namespace cbt {

namespace {

const std::map<std::string, std::vector<std::string>>& positional_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"uniform", {"n"}},
      {"bump", {"n", "eps"}},
      {"heavy", {"n", "eps"}},
      {"point", {"n", "at"}},
      {"clique", {"q"}},
      {"disjoint_cliques", {"q", "count"}},
      {"matching", {"pairs"}},
      {"star", {"leaves"}},
      {"bipartite", {"a", "b"}},
      {"cycle", {"length"}},
      {"path", {"vertices"}},
      {"random", {"vertices", "p", "seed"}},
      {"random_connected", {"k", "extra_p", "seed"}},
  };
  return keys;
}

Json parse_scalar(const std::string& token) {
  try {
    std::size_t used = 0;
    if (token.find_first_of(".eE") == std::string::npos) {
      const auto v = std::stoull(token, &used);
      if (used == token.size()) return v;
    }
    const auto d = std::stod(token, &used);
    if (used == token.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("'" + token + "' is not a number");
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

std::string kind_of(const Json& spec) {
  if (spec.is_string()) return spec.get<std::string>();
  if (!spec.is_object()) throw ParseError("spec must be an object or a string");
  return field<std::string>(spec, "kind");
}

std::vector<Edge> edges_from_json(const Json& j) {
  std::vector<Edge> edges;
  for (const auto& e : field<Json>(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("each edge must be a pair [u, v]");
    edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
  }
  return edges;
}

}  // namespace

Json parse_spec_string(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("spec: ") + e.what());
    }
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.empty() || parts[0].empty()) throw ParseError("empty spec");
  Json j{{"kind", parts[0]}};
  const auto it = positional_keys().find(parts[0]);
  if (it == positional_keys().end()) {
    if (parts.size() > 1) throw ParseError("unknown spec kind '" + parts[0] + "'");
    return j;
  }
  if (parts.size() - 1 > it->second.size())
    throw ParseError("too many arguments for '" + parts[0] + "'");
  for (std::size_t i = 1; i < parts.size(); ++i) j[it->second[i - 1]] = parse_scalar(parts[i]);
  return j;
}

Distribution distribution_from_json(const Json& spec, std::uint32_t default_n, double default_eps) {
  const std::string kind = kind_of(spec);
  const Json obj = spec.is_object() ? spec : Json::object();
  auto n = [&] {
    const auto v = field_or<std::uint32_t>(obj, "n", default_n);
    if (v == 0) throw ParseError("distribution '" + kind + "' needs n");
    return v;
  };
  auto eps = [&] {
    const auto v = field_or<double>(obj, "eps", default_eps);
    if (v == 0.0) throw ParseError("distribution '" + kind + "' needs eps");
    return v;
  };
  if (kind == "uniform") return make_uniform(n());
  if (kind == "bump") return make_bump(n(), eps());
  if (kind == "heavy") return make_heavy(n(), eps());
  if (kind == "point") return make_point_mass(n(), field_or<Symbol>(obj, "at", 1));
  if (kind == "explicit") return Distribution(field<std::vector<double>>(obj, "probs"));
  throw ParseError("unknown distribution kind '" + kind + "'");
}

ComparisonGraph graph_from_json(const Json& spec) {
  if (spec.is_object() && !spec.contains("kind") && spec.contains("edges")) {
    std::optional<std::vector<std::uint32_t>> owner;
    if (spec.contains("owner") && !spec["owner"].is_null())
      owner = spec["owner"].get<std::vector<std::uint32_t>>();
    return ComparisonGraph(field<Vertex>(spec, "vertex_count"), edges_from_json(spec), std::move(owner));
  }
  const std::string kind = kind_of(spec);
  const Json& j = spec;
  if (kind == "clique") return make_clique(field<Vertex>(j, "q"));
  if (kind == "disjoint_cliques")
    return make_disjoint_cliques(field<Vertex>(j, "q"), field<std::uint32_t>(j, "count"));
  if (kind == "matching") return make_matching(field<Vertex>(j, "pairs"));
  if (kind == "star") return make_star(field<Vertex>(j, "leaves"));
  if (kind == "bipartite") return make_bipartite(field<Vertex>(j, "a"), field<Vertex>(j, "b"));
  if (kind == "cycle") return make_cycle(field<Vertex>(j, "length"));
  if (kind == "path") return make_path(field<Vertex>(j, "vertices"));
  if (kind == "random")
    return make_random_graph(field<Vertex>(j, "vertices"), field<double>(j, "p"),
                             field_or<std::uint64_t>(j, "seed", 0));
  if (kind == "power") return graph_power(graph_from_json(field<Json>(j, "of")), field<std::uint32_t>(j, "t"));
  throw ParseError("unknown graph kind '" + kind + "'");
}

Network network_from_json(const Json& spec) {
  if (spec.is_object() && spec.contains("edges") &&
      (!spec.contains("kind") || spec["kind"] == "explicit")) {
    return Network(ComparisonGraph(field<Vertex>(spec, "vertex_count"), edges_from_json(spec)),
                   field_or<std::vector<std::uint64_t>>(spec, "ids", {}));
  }
  const std::string kind = kind_of(spec);
  // Graph-style positional keys are accepted as aliases for k.
  auto k = [&] {
    for (const char* key : {"k", "vertices", "q", "length"})
      if (spec.contains(key)) return field<std::uint32_t>(spec, key);
    if (spec.contains("leaves")) return field<std::uint32_t>(spec, "leaves") + 1;
    throw ParseError("topology '" + kind + "' needs k");
  };
  if (kind == "path") return make_path_network(k());
  if (kind == "cycle") return make_cycle_network(k());
  if (kind == "star") return make_star_network(k());
  if (kind == "clique") return make_clique_network(k());
  if (kind == "random_connected")
    return make_random_network(k(), field_or<double>(spec, "extra_p", 0.05),
                               field_or<std::uint64_t>(spec, "seed", 0));
  throw ParseError("unknown topology kind '" + kind + "'");
}

Json to_json(const Distribution& p) {
  return Json{{"kind", "explicit"}, {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

Json to_json(const ComparisonGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  Json j{{"vertex_count", g.vertex_count()}, {"edges", std::move(edges)}};
  j["owner"] = g.owner() ? Json(*g.owner()) : Json(nullptr);
  return j;
}

Json to_json(const GraphStats& s) {
  return Json{{"vertices", s.vertices}, {"edges", s.edges}, {"two_paths", s.two_paths}};
}

Json to_json(const TestOutcome& o) {
  return Json{{"z", o.z}, {"t", o.t}, {"decision", to_string(o.decision)}};
}

namespace {

Json check_json(const ConditionCheck& c) {
  return Json{{"required", c.required}, {"actual", c.actual}, {"pass", c.pass}};
}

}  // namespace

Json to_json(const ConditionReport& r) {
  return Json{{"tau", r.tau},
              {"cond1", check_json(r.cond1)},
              {"cond2", check_json(r.cond2)},
              {"cond3", check_json(r.cond3)},
              {"overall", r.overall}};
}

Json to_json(const Plan& plan) {
  Json j;
  j["model"] = to_string(plan.model);
  j["family"] = to_string(plan.family);
  j["n"] = plan.n;
  j["eps"] = plan.eps;
  j["tau"] = plan.tau;
  j["tau_interval"] = {plan.tau_interval.lo, plan.tau_interval.hi};
  j["players"] = plan.players;
  j["player_blocks"] = plan.player_blocks;
  j["clique_size"] = plan.clique_size;
  j["clique_count"] = plan.clique_count;
  if (plan.model == Model::asymmetric) {
    j["rates"] = plan.rates;
    j["time"] = plan.time;
  }
  if (plan.model == Model::streaming || plan.model == Model::simultaneous_streaming) {
    j["memory_budget_bits"] = plan.memory_budget_bits;
    j["storable_samples"] = plan.storable_samples;
  }
  j["stats"] = to_json(plan.stats);
  j["threshold"] = plan.threshold;
  j["certificate"] = to_json(plan.certificate);
  j["predicted"] = {{"total_samples", plan.predicted.total_samples},
                    {"max_samples_per_player", plan.predicted.max_samples_per_player},
                    {"time", plan.predicted.time},
                    {"message_bits", plan.predicted.message_bits},
                    {"memory_bits", plan.predicted.memory_bits}};
  j["headline_resource"] = headline_resource(plan);
  return j;
}

Json to_json(const CounterexampleResult& r) {
  Json cycle = Json::array(), augmented = Json::array();
  for (const auto& x : r.cycle_reports) cycle.push_back(to_json(x));
  for (const auto& x : r.augmented_reports) augmented.push_back(to_json(x));
  return Json{{"cycle_stats", to_json(r.cycle.stats())},
              {"augmented_stats", to_json(r.augmented.stats())},
              {"cycle_certified_somewhere", r.cycle_certified_somewhere},
              {"augmented_fails_cond3_everywhere", r.augmented_fails_cond3_everywhere},
              {"augmented_ratio", r.augmented_ratio},
              {"cycle_reports", std::move(cycle)},
              {"augmented_reports", std::move(augmented)}};
}

Plan plan_from_json(const Json& j) {
  Plan plan;
  const auto model = parse_model(field<std::string>(j, "model"));
  if (!model) throw ParseError("unknown model '" + field<std::string>(j, "model") + "'");
  plan.model = *model;
  const auto family = field<std::string>(j, "family");
  bool found = false;
  for (auto f : {GraphFamily::clique, GraphFamily::disjoint_cliques, GraphFamily::per_rate_cliques,
                 GraphFamily::batched_cliques})
    if (to_string(f) == family) {
      plan.family = f;
      found = true;
    }
  if (!found) throw ParseError("unknown graph family '" + family + "'");
  plan.n = field<std::uint32_t>(j, "n");
  plan.eps = field<double>(j, "eps");
  plan.tau = field<double>(j, "tau");
  const auto interval = field<std::vector<double>>(j, "tau_interval");
  if (interval.size() != 2) throw ParseError("tau_interval must have two entries");
  plan.tau_interval = {interval[0], interval[1]};
  plan.players = field<std::uint32_t>(j, "players");
  plan.player_blocks = field<std::vector<std::vector<std::uint64_t>>>(j, "player_blocks");
  plan.clique_size = field<std::uint64_t>(j, "clique_size");
  plan.rates = field_or<std::vector<double>>(j, "rates", {});
  plan.time = field_or<double>(j, "time", 0.0);
  plan.memory_budget_bits = field_or<std::uint64_t>(j, "memory_budget_bits", 0);
  plan.storable_samples = field_or<std::uint64_t>(j, "storable_samples", 0);

  std::vector<std::uint64_t> sizes;
  for (const auto& b : plan.player_blocks) sizes.insert(sizes.end(), b.begin(), b.end());
  plan.stats = clique_family_stats(sizes);
  plan.clique_count = 0;
  for (auto s : sizes) plan.clique_count += s > 0;
  plan.threshold = threshold(plan.stats.edges, plan.tau, plan.n, plan.eps);
  plan.certificate = check_theorem(plan.stats, plan.tau, plan.n, plan.eps);
  if (j.contains("predicted")) {
    const auto& p = j["predicted"];
    plan.predicted.total_samples = field<std::uint64_t>(p, "total_samples");
    plan.predicted.max_samples_per_player = field<std::uint64_t>(p, "max_samples_per_player");
    plan.predicted.time = field<double>(p, "time");
    plan.predicted.message_bits = field<std::uint32_t>(p, "message_bits");
    plan.predicted.memory_bits = field<std::uint64_t>(p, "memory_bits");
  }
  return plan;
}

Plan plan_from_request(const Json& r) {
  const auto name = field<std::string>(r, "model");
  const auto model = parse_model(name);
  if (!model) throw ParseError("unknown model '" + name + "'");
  const auto n = field<std::uint32_t>(r, "n");
  const auto eps = field<double>(r, "eps");
  switch (*model) {
    case Model::centralized: return plan_centralized(n, eps);
    case Model::simultaneous: return plan_simultaneous(n, eps, field<std::uint32_t>(r, "k"));
    case Model::asymmetric: return plan_asymmetric(n, eps, field<std::vector<double>>(r, "rates"));
    case Model::streaming: return plan_streaming(n, eps, field<std::uint64_t>(r, "m_bits"));
    case Model::simultaneous_streaming:
      return plan_simultaneous_streaming(n, eps, field<std::uint32_t>(r, "k"),
                                         field<std::uint64_t>(r, "m_bits"));
  }
  throw ParseError("unknown model");
}

}  // namespace cbt
