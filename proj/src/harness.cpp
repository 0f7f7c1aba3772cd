#include "cbt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "cbt/congest.hpp"
#include "cbt/error.hpp"

namespace cbt {

namespace {

constexpr std::pair<ScenarioModel, std::string_view> kModelNames[] = {
    {ScenarioModel::centralized, "centralized"},
    {ScenarioModel::simultaneous, "simultaneous"},
    {ScenarioModel::asymmetric, "asymmetric"},
    {ScenarioModel::streaming, "streaming"},
    {ScenarioModel::simultaneous_streaming, "simultaneous_streaming"},
    {ScenarioModel::congest_local, "congest_local"},
    {ScenarioModel::congest_pipelined, "congest_pipelined"},
    {ScenarioModel::congest_combined, "congest_combined"},
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

bool is_congest(ScenarioModel m) {
  return m == ScenarioModel::congest_local || m == ScenarioModel::congest_pipelined ||
         m == ScenarioModel::congest_combined;
}

}  // namespace

std::string_view to_string(ScenarioModel m) noexcept {
  for (const auto& [model, name] : kModelNames)
    if (model == m) return name;
  return "unknown";
}

std::optional<ScenarioModel> parse_scenario_model(std::string_view s) noexcept {
  for (const auto& [model, name] : kModelNames)
    if (name == s) return model;
  return std::nullopt;
}

namespace {

template <class T>
T unsigned_field(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<T>::max())
    throw ParseError(std::string("scenario: '") + key + "' must be a non-negative integer");
  return v.get<T>();
}

}  // namespace

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  Scenario s;
  try {
    s.id = j.value("id", std::string());
    const auto model = j.at("model").get<std::string>();
    const auto parsed = parse_scenario_model(model);
    if (!parsed) throw ParseError("unknown model '" + model + "'");
    s.model = *parsed;
    s.n = unsigned_field<std::uint32_t>(j, "n");
    s.eps = j.at("eps").get<double>();
    if (j.contains("k")) s.k = unsigned_field<std::uint32_t>(j, "k");
    if (j.contains("rates")) s.rates = j["rates"].get<std::vector<double>>();
    if (j.contains("m_bits")) s.m_bits = unsigned_field<std::uint64_t>(j, "m_bits");
    if (j.contains("topology")) {
      s.topology = j["topology"].is_string() ? parse_spec_string(j["topology"].get<std::string>())
                                             : j["topology"];
    }
    if (j.contains("oblivious")) {
      const auto& o = j["oblivious"];
      s.oblivious = ObliviousConfig{unsigned_field<std::uint32_t>(o, "max_players"),
                                    unsigned_field<std::uint64_t>(o, "max_samples")};
    }
    if (j.contains("distribution")) {
      const auto& d = j["distribution"];
      s.distribution = d.is_string() ? parse_spec_string(d.get<std::string>()) : d;
    }
    if (j.contains("trials")) s.trials = unsigned_field<std::uint64_t>(j, "trials");
    if (j.contains("seed")) s.seed = unsigned_field<std::uint64_t>(j, "seed");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (s.trials < 1) throw ParseError("scenario: trials must be >= 1");
  if (is_congest(s.model) && s.topology.is_null()) throw ParseError("scenario: CONGEST models need a topology");
  if (s.oblivious && s.model != ScenarioModel::simultaneous)
    throw ParseError("scenario: oblivious mode applies to the simultaneous model only");
  return s;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

namespace {

Plan plan_for(const Scenario& s) {
  Json request{{"model", std::string(to_string(s.model))}, {"n", s.n}, {"eps", s.eps}};
  if (s.k) request["k"] = *s.k;
  if (!s.rates.empty()) request["rates"] = s.rates;
  if (s.m_bits) request["m_bits"] = *s.m_bits;
  return plan_from_request(request);
}

using TrialFn = std::function<TrialRecord(std::uint64_t)>;

std::vector<TrialRecord> run_trials(std::uint64_t trials, const TrialFn& fn, unsigned threads) {
  std::vector<TrialRecord> records(trials);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const auto t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        records[t] = fn(t);
        records[t].trial = t;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

TrialRecord record_from(const SimulationResult& r) {
  TrialRecord t;
  t.decision = r.decision;
  t.z = r.z_reported;
  t.threshold = r.threshold;
  t.samples = r.ledger.total_samples();
  t.max_player_samples = r.ledger.max_samples();
  t.message_bits = r.ledger.max_message_bits();
  t.memory_bits = r.ledger.max_memory_bits();
  t.early_terminated = r.early_terminated;
  return t;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, std::uint64_t master_seed, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = s.seed.value_or(master_seed);
  const Distribution p = distribution_from_json(s.distribution, s.n, s.eps);
  if (p.n() != s.n)
    throw InvalidArgument("distribution domain " + std::to_string(p.n()) + " does not match n = " +
                          std::to_string(s.n));

  ScenarioResult result;
  SummaryRow& row = result.summary;
  row.id = s.id;
  row.model = std::string(to_string(s.model));
  row.n = s.n;
  row.eps = s.eps;
  TrialFn fn;

  std::optional<Plan> plan;
  std::optional<Network> net;
  std::optional<BfsResult> bfs;
  std::optional<DetectionResult> detection;
  if (!is_congest(s.model)) {
    plan = plan_for(s);
    SimulationOptions sim;
    sim.oblivious = s.oblivious;
    const Plan echo = s.oblivious ? oblivious_plan(*plan) : *plan;
    result.plan = to_json(echo);
    row.players = echo.players;
    row.q = echo.clique_size;
    row.ell = echo.clique_count;
    row.tau = echo.tau;
    row.threshold = echo.threshold;
    fn = [&, sim](std::uint64_t t) { return record_from(simulate(*plan, p, StreamId{seed, t, 0}, sim)); };
  } else {
    net.emplace(network_from_json(s.topology));
    row.players = net->k();
    if (s.model == ScenarioModel::congest_local) {
      bfs = build_bfs_tree(*net, s.n);
      detection = detect_topology(*net, bfs->tree, s.n, s.eps, default_tau_grid());
      if (!detection->certified)
        throw ProtocolRefused("topology does not certify; the local protocol does not apply");
      row.q = net->k();
      row.ell = 1;
      row.tau = *detection->tau_star;
      row.threshold = threshold(detection->edges, row.tau, s.n, s.eps);
      const std::uint32_t setup = bfs->report.rounds + detection->report.rounds;
      fn = [&, setup](std::uint64_t t) {
        const auto r = local_collision_protocol(*net, bfs->tree, s.n, s.eps, detection->tau_star, p,
                                                StreamId{seed, t, 0});
        TrialRecord rec;
        rec.decision = r.decision;
        rec.z = r.z;
        rec.threshold = r.threshold;
        rec.samples = net->k();
        rec.max_player_samples = 1;
        rec.rounds = setup + r.report.rounds;
        return rec;
      };
    } else if (s.model == ScenarioModel::congest_pipelined) {
      const auto probe = pipelined_bundle_protocol(*net, s.n, s.eps, p, StreamId{seed, 0, 0});
      row.q = probe.bundle_size;
      row.ell = probe.bundles;
      row.tau = probe.tau;
      row.threshold = probe.protocol.threshold;
      fn = [&](std::uint64_t t) {
        const auto r = pipelined_bundle_protocol(*net, s.n, s.eps, p, StreamId{seed, t, 0});
        TrialRecord rec;
        rec.decision = r.protocol.decision;
        rec.z = r.protocol.z;
        rec.threshold = r.protocol.threshold;
        rec.samples = std::uint64_t{r.bundle_size} * r.bundles;
        rec.max_player_samples = 1;
        rec.rounds = r.protocol.report.rounds;
        return rec;
      };
    } else {
      const auto probe = combined_protocol(*net, s.n, s.eps, p, StreamId{seed, 0, 0});
      if (probe.local) {
        row.q = net->k();
        row.ell = 1;
        row.tau = *probe.detection.tau_star;
        row.threshold = probe.local->threshold;
      } else {
        row.q = probe.pipeline->bundle_size;
        row.ell = probe.pipeline->bundles;
        row.tau = probe.pipeline->tau;
        row.threshold = probe.pipeline->protocol.threshold;
      }
      fn = [&](std::uint64_t t) {
        const auto r = combined_protocol(*net, s.n, s.eps, p, StreamId{seed, t, 0});
        TrialRecord rec;
        rec.decision = r.decision;
        rec.z = r.local ? r.local->z : r.pipeline->protocol.z;
        rec.threshold = r.local ? r.local->threshold : r.pipeline->protocol.threshold;
        rec.samples = net->k();
        rec.max_player_samples = 1;
        rec.rounds = r.rounds;
        rec.path = std::string(to_string(r.path));
        return rec;
      };
    }
  }

  result.records = run_trials(s.trials, fn, options.threads);

  row.trials = s.trials;
  double samples = 0.0, bits = 0.0, rounds = 0.0;
  for (const auto& r : result.records) {
    row.yes += r.decision == Decision::yes;
    samples += static_cast<double>(r.samples);
    bits += static_cast<double>(r.message_bits);
    rounds += r.rounds;
    row.max_samples = std::max(row.max_samples, r.samples);
    row.max_message_bits = std::max(row.max_message_bits, r.message_bits);
    row.max_memory_bits = std::max(row.max_memory_bits, r.memory_bits);
    row.max_rounds = std::max(row.max_rounds, r.rounds);
    row.early_terminations += r.early_terminated;
  }
  const double n = static_cast<double>(s.trials);
  row.yes_rate = static_cast<double>(row.yes) / n;
  std::tie(row.ci_low, row.ci_high) = wilson_interval(row.yes, s.trials);
  row.mean_samples = samples / n;
  row.mean_message_bits = bits / n;
  row.mean_rounds = rounds / n;
  if (options.timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string csv_header(bool timing) {
  std::string h =
      "id,model,n,eps,players,q,ell,tau,threshold,trials,yes,yes_rate,ci_low,ci_high,mean_samples,"
      "max_samples,mean_message_bits,max_message_bits,max_memory_bits,mean_rounds,max_rounds,"
      "early_terminations";
  if (timing) h += ",wall_ms";
  return h + "\n";
}

std::string csv_row(const SummaryRow& r, bool timing) {
  std::ostringstream out;
  out << r.id << ',' << r.model << ',' << r.n << ',' << fmt(r.eps) << ',' << r.players << ',' << r.q
      << ',' << r.ell << ',' << fmt(r.tau) << ',' << fmt(r.threshold) << ',' << r.trials << ','
      << r.yes << ',' << fmt(r.yes_rate) << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ','
      << fmt(r.mean_samples) << ',' << r.max_samples << ',' << fmt(r.mean_message_bits) << ','
      << r.max_message_bits << ',' << r.max_memory_bits << ',' << fmt(r.mean_rounds) << ','
      << r.max_rounds << ',' << r.early_terminations;
  if (timing) out << ',' << fmt(r.wall_ms.value_or(0.0));
  out << '\n';
  return out.str();
}

Json to_json(const TrialRecord& r) {
  Json j{{"trial", r.trial},
         {"decision", to_string(r.decision)},
         {"z", r.z},
         {"threshold", r.threshold},
         {"samples", r.samples},
         {"max_player_samples", r.max_player_samples},
         {"message_bits", r.message_bits},
         {"memory_bits", r.memory_bits},
         {"rounds", r.rounds},
         {"early_terminated", r.early_terminated}};
  if (!r.path.empty()) j["path"] = r.path;
  return j;
}

std::string records_jsonl(const ScenarioResult& result) {
  std::string out;
  for (const auto& r : result.records) {
    Json j = to_json(r);
    j["scenario"] = result.summary.id;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Scenario> parse_suite(const std::string& text) {
  std::vector<Scenario> out;
  std::istringstream in(text);
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      Json j;
      try {
        j = Json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
      }
      Scenario s = scenario_from_json(j);
      if (s.id.empty()) s.id = "line" + std::to_string(number);
      out.push_back(std::move(s));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string run_suite_text(const std::string& text, std::uint64_t master_seed, const RunOptions& options) {
  const auto scenarios = parse_suite(text);
  std::string csv = csv_header(options.timing);
  for (const auto& s : scenarios) csv += csv_row(run_scenario(s, master_seed, options).summary, options.timing);
  return csv;
}

std::string run_suite(const std::string& path, std::uint64_t master_seed, const RunOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open suite file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return run_suite_text(buf.str(), master_seed, options);
}

MomentAudit moment_audit(const ComparisonGraph& g, const Distribution& p, std::uint64_t trials,
                         std::uint64_t seed) {
  if (trials < 2) throw InvalidArgument("moment audit needs at least two trials");
  MomentAudit a;
  a.stats = g.stats();
  a.mu = collision_probability(p);
  a.gamma = three_way_collision_probability(p);
  a.expected_mean = expected_collisions(g, p);
  a.expected_variance = variance_collisions(g, p);
  a.trials = trials;

  std::vector<double> z(trials);
  for (std::uint64_t t = 0; t < trials; ++t)
    z[t] = static_cast<double>(count_collisions(g, sample_labeling(p, g.vertex_count(), {seed, t, 0})));
  const double n = static_cast<double>(trials);
  double sum = 0.0;
  for (double x : z) sum += x;
  a.sample_mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : z) {
    const double d = (x - a.sample_mean) * (x - a.sample_mean);
    m2 += d;
    m4 += d * d;
  }
  a.sample_variance = m2 / (n - 1.0);
  m4 /= n;

  auto score = [](double diff, double se) {
    if (se > 0.0) return diff / se;
    return std::abs(diff) < 1e-12 ? 0.0 : std::copysign(INFINITY, diff);
  };
  a.mean_z = score(a.sample_mean - a.expected_mean, std::sqrt(a.expected_variance / n));
  const double var_se = std::sqrt(std::max(0.0, m4 - a.sample_variance * a.sample_variance) / n);
  a.variance_z = score(a.sample_variance - a.expected_variance, var_se);
  a.variance_relative_error =
      a.expected_variance > 0.0 ? std::abs(a.sample_variance - a.expected_variance) / a.expected_variance
                                : std::abs(a.sample_variance);
  a.flagged = std::abs(a.mean_z) > 4.0 || std::abs(a.variance_z) > 4.0;
  return a;
}

Json to_json(const MomentAudit& a) {
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(x > 0 ? "inf" : "-inf"); };
  return Json{{"stats", to_json(a.stats)},
              {"mu", a.mu},
              {"gamma", a.gamma},
              {"expected_mean", a.expected_mean},
              {"expected_variance", a.expected_variance},
              {"trials", a.trials},
              {"sample_mean", a.sample_mean},
              {"sample_variance", a.sample_variance},
              {"mean_z", num(a.mean_z)},
              {"variance_z", num(a.variance_z)},
              {"variance_relative_error", a.variance_relative_error},
              {"flagged", a.flagged}};
}

}  // namespace cbt
