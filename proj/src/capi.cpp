#include "cbt/cbt.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "cbt/conditions.hpp"
#include "cbt/error.hpp"
#include "cbt/harness.hpp"
#include "cbt/serialize.hpp"
#include "cbt/tester.hpp"

struct cbt_distribution {
  cbt::Distribution value;
};

struct cbt_graph {
  std::shared_ptr<const cbt::ComparisonGraph> value;
};

namespace {

thread_local std::string last_error;

cbt_status status_of(cbt::ErrorCode code) {
  switch (code) {
    case cbt::ErrorCode::invalid_argument: return CBT_INVALID_ARGUMENT;
    case cbt::ErrorCode::invalid_domain: return CBT_INVALID_DOMAIN;
    case cbt::ErrorCode::capacity: return CBT_CAPACITY;
    case cbt::ErrorCode::model_violation: return CBT_MODEL_VIOLATION;
    case cbt::ErrorCode::invalid_network: return CBT_INVALID_NETWORK;
    case cbt::ErrorCode::protocol_refused: return CBT_PROTOCOL_REFUSED;
    case cbt::ErrorCode::parse: return CBT_PARSE;
  }
  return CBT_INTERNAL;
}

template <class F>
cbt_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return CBT_OK;
  } catch (const cbt::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CBT_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CBT_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) throw cbt::InvalidArgument(std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* cbt_status_name(cbt_status status) {
  switch (status) {
    case CBT_OK: return "ok";
    case CBT_INVALID_ARGUMENT: return "invalid_argument";
    case CBT_INVALID_DOMAIN: return "invalid_domain";
    case CBT_CAPACITY: return "capacity";
    case CBT_MODEL_VIOLATION: return "model_violation";
    case CBT_INVALID_NETWORK: return "invalid_network";
    case CBT_PROTOCOL_REFUSED: return "protocol_refused";
    case CBT_PARSE: return "parse";
    case CBT_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cbt_last_error(void) { return last_error.c_str(); }

void cbt_string_free(char* s) { std::free(s); }

cbt_status cbt_distribution_create(const double* probs, size_t n, cbt_distribution** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(probs, "probs");
    *out = new cbt_distribution{cbt::Distribution(std::vector<double>(probs, probs + n))};
  });
}

cbt_status cbt_distribution_from_spec(const char* spec, cbt_distribution** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new cbt_distribution{cbt::distribution_from_json(cbt::parse_spec_string(spec))};
  });
}

void cbt_distribution_free(cbt_distribution* p) { delete p; }

cbt_status cbt_distribution_size(const cbt_distribution* p, uint32_t* n) {
  return guarded([&] {
    need(p, "distribution");
    need(n, "n");
    *n = p->value.n();
  });
}

cbt_status cbt_distribution_collision_probability(const cbt_distribution* p, double* mu) {
  return guarded([&] {
    need(p, "distribution");
    need(mu, "mu");
    *mu = cbt::collision_probability(p->value);
  });
}

cbt_status cbt_distribution_distance_to_uniform(const cbt_distribution* p, double* d) {
  return guarded([&] {
    need(p, "distribution");
    need(d, "d");
    *d = cbt::distance_to_uniform(p->value);
  });
}

cbt_status cbt_graph_create(uint32_t vertex_count, const uint32_t* edges, size_t edge_count,
                            cbt_graph** out) {
  return guarded([&] {
    need(out, "out");
    if (edge_count > 0) need(edges, "edges");
    std::vector<cbt::Edge> list(edge_count);
    for (size_t i = 0; i < edge_count; ++i) list[i] = {edges[2 * i], edges[2 * i + 1]};
    *out = new cbt_graph{std::make_shared<const cbt::ComparisonGraph>(vertex_count, std::move(list))};
  });
}

cbt_status cbt_graph_from_spec(const char* spec, cbt_graph** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new cbt_graph{
        std::make_shared<const cbt::ComparisonGraph>(cbt::graph_from_json(cbt::parse_spec_string(spec)))};
  });
}

void cbt_graph_free(cbt_graph* g) { delete g; }

cbt_status cbt_graph_stats(const cbt_graph* g, uint64_t* vertices, uint64_t* edges, uint64_t* two_paths) {
  return guarded([&] {
    need(g, "graph");
    const auto& s = g->value->stats();
    if (vertices) *vertices = s.vertices;
    if (edges) *edges = s.edges;
    if (two_paths) *two_paths = s.two_paths;
  });
}

cbt_status cbt_run_tester(const cbt_graph* g, const cbt_distribution* p, double tau, double eps,
                          uint64_t seed, uint64_t trial, uint64_t* z, double* threshold, int* yes) {
  return guarded([&] {
    need(g, "graph");
    need(p, "distribution");
    const cbt::TesterSpec spec(g->value, tau, p->value.n(), eps);
    const auto outcome = cbt::run(spec, p->value, {seed, trial, 0});
    if (z) *z = outcome.z;
    if (threshold) *threshold = outcome.t;
    if (yes) *yes = outcome.decision == cbt::Decision::yes;
  });
}

cbt_status cbt_check_theorem(const cbt_graph* g, double tau, uint32_t n, double eps, char** json_out) {
  return guarded([&] {
    need(g, "graph");
    need(json_out, "json_out");
    *json_out = dup(cbt::to_json(cbt::check_theorem(*g->value, tau, n, eps)).dump(2));
  });
}

cbt_status cbt_plan(const char* request_json, char** json_out) {
  return guarded([&] {
    need(request_json, "request");
    need(json_out, "json_out");
    cbt::Json request;
    try {
      request = cbt::Json::parse(request_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw cbt::ParseError(e.what());
    }
    *json_out = dup(cbt::to_json(cbt::plan_from_request(request)).dump(2));
  });
}

cbt_status cbt_run_scenario(const char* scenario_json, uint64_t seed, unsigned threads, int timing,
                            char** csv_out, char** jsonl_out) {
  return guarded([&] {
    need(scenario_json, "scenario");
    cbt::Json j;
    try {
      j = cbt::Json::parse(scenario_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw cbt::ParseError(e.what());
    }
    auto scenario = cbt::scenario_from_json(j);
    if (scenario.id.empty()) scenario.id = "scenario";
    const cbt::RunOptions options{threads, timing != 0};
    const auto result = cbt::run_scenario(scenario, seed, options);
    if (csv_out) *csv_out = dup(cbt::csv_header(options.timing) + cbt::csv_row(result.summary, options.timing));
    if (jsonl_out) *jsonl_out = dup(cbt::records_jsonl(result));
  });
}

cbt_status cbt_run_suite_file(const char* path, uint64_t seed, unsigned threads, int timing, char** csv_out) {
  return guarded([&] {
    need(path, "path");
    need(csv_out, "csv_out");
    *csv_out = dup(cbt::run_suite(path, seed, {threads, timing != 0}));
  });
}

cbt_status cbt_moment_audit(const char* graph_spec, const char* dist_spec, uint64_t trials, uint64_t seed,
                            char** json_out) {
  return guarded([&] {
    need(graph_spec, "graph spec");
    need(dist_spec, "distribution spec");
    need(json_out, "json_out");
    const auto g = cbt::graph_from_json(cbt::parse_spec_string(graph_spec));
    const auto p = cbt::distribution_from_json(cbt::parse_spec_string(dist_spec));
    *json_out = dup(cbt::to_json(cbt::moment_audit(g, p, trials, seed)).dump(2));
  });
}

cbt_status cbt_counterexample(uint32_t n, double eps, double b, char** json_out) {
  return guarded([&] {
    need(json_out, "json_out");
    const auto grid = cbt::default_tau_grid();
    *json_out = dup(cbt::to_json(cbt::appendix_counterexample(n, eps, b, grid)).dump(2));
  });
}

}  // extern "C"
