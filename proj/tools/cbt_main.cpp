// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbt/cbt.h"

namespace {

int exit_code(cbt_status s) {
  if (s == CBT_OK) return 0;
  if (s == CBT_CAPACITY) return 2;
  return 1;
}

int report(cbt_status s) {
  if (s != CBT_OK) std::cerr << "error (" << cbt_status_name(s) << "): " << cbt_last_error() << "\n";
  return exit_code(s);
}

int emit(cbt_status s, char* text) {
  if (s == CBT_OK && text) {
    std::cout << text << "\n";
    cbt_string_free(text);
  }
  return report(s);
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-based uniformity testers: planning, simulation and audits"};
  app.require_subcommand(1);

  std::string model;
  std::uint32_t n = 0;
  double eps = 0.0;
  std::uint32_t k = 0;
  std::vector<double> rates;
  std::uint64_t m_bits = 0;
  auto* plan = app.add_subcommand("plan", "Plan a certified tester and print it as JSON");
  plan->add_option("--model", model, "centralized | simultaneous | asymmetric | streaming | simultaneous_streaming")
      ->required();
  plan->add_option("--n", n, "Domain size")->required();
  plan->add_option("--eps", eps, "Proximity parameter in (0, 1]")->required();
  plan->add_option("--k", k, "Number of players");
  plan->add_option("--rates", rates, "Per-player sampling rates")->delimiter(',');
  plan->add_option("--m-bits", m_bits, "Memory budget in bits");

  std::string scenario_path, records_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool timing = false;
  auto* run = app.add_subcommand("run", "Run one scenario file; CSV summary on stdout");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed")->required();
  run->add_option("--records", records_path, "Write per-trial JSON lines here");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_flag("--timing", timing, "Add a wall-clock column");

  std::string suite_path, out_path;
  auto* suite = app.add_subcommand("suite", "Run a suite (one JSON scenario per line); CSV on stdout");
  suite->add_option("--file", suite_path, "Suite file")->required()->check(CLI::ExistingFile);
  suite->add_option("--seed", seed, "Master seed")->required();
  suite->add_option("--out", out_path, "Write the CSV here instead of stdout");
  suite->add_option("--threads", threads, "Worker threads (0 = all cores)");
  suite->add_flag("--timing", timing, "Add a wall-clock column");

  std::string graph_spec, dist_spec;
  std::uint64_t trials = 0;
  auto* audit = app.add_subcommand("audit", "Compare Monte Carlo moments of Z with the closed forms");
  audit->add_option("--graph", graph_spec, "Graph spec, e.g. clique:5 or star:10")->required();
  audit->add_option("--dist", dist_spec, "Distribution spec, e.g. uniform:10 or bump:10:0.5")->required();
  audit->add_option("--trials", trials, "Monte Carlo trials")->required();
  audit->add_option("--seed", seed, "Seed")->required();

  double b = 0.0;
  auto* counter = app.add_subcommand("counterexample", "Cycle that certifies and a supergraph that does not");
  counter->add_option("--n", n, "Domain size")->required();
  counter->add_option("--eps", eps, "Proximity parameter")->required();
  counter->add_option("--b", b, "Cycle length factor: |V| = ceil(b n / eps^4)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  if (*plan) {
    std::ostringstream request;
    request.precision(17);
    request << "{\"model\":\"" << json_escape(model) << "\",\"n\":" << n << ",\"eps\":" << eps;
    if (k) request << ",\"k\":" << k;
    if (!rates.empty()) {
      request << ",\"rates\":[";
      for (std::size_t i = 0; i < rates.size(); ++i) request << (i ? "," : "") << rates[i];
      request << "]";
    }
    if (m_bits) request << ",\"m_bits\":" << m_bits;
    request << "}";
    char* out = nullptr;
    const auto s = cbt_plan(request.str().c_str(), &out);
    return emit(s, out);
  }
  if (*run) {
    std::string text;
    if (!read_file(scenario_path, text)) {
      std::cerr << "error: cannot read " << scenario_path << "\n";
      return 1;
    }
    char* csv = nullptr;
    char* jsonl = nullptr;
    const auto s = cbt_run_scenario(text.c_str(), seed, threads, timing, &csv, &jsonl);
    if (s != CBT_OK) return report(s);
    std::cout << csv;
    if (!records_path.empty()) {
      std::ofstream(records_path) << jsonl;
    }
    cbt_string_free(csv);
    cbt_string_free(jsonl);
    return 0;
  }
  if (*suite) {
    char* csv = nullptr;
    const auto s = cbt_run_suite_file(suite_path.c_str(), seed, threads, timing, &csv);
    if (s != CBT_OK) return report(s);
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream(out_path) << csv;
    }
    cbt_string_free(csv);
    return 0;
  }
  if (*audit) {
    char* out = nullptr;
    const auto s = cbt_moment_audit(graph_spec.c_str(), dist_spec.c_str(), trials, seed, &out);
    return emit(s, out);
  }
  if (*counter) {
    char* out = nullptr;
    const auto s = cbt_counterexample(n, eps, b, &out);
    return emit(s, out);
  }
  return 1;
}
