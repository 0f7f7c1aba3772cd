#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbt/models.hpp"
#include "cbt/serialize.hpp"

namespace cbt {

enum class ScenarioModel {
  centralized,
  simultaneous,
  asymmetric,
  streaming,
  simultaneous_streaming,
  congest_local,
  congest_pipelined,
  congest_combined,
};

std::string_view to_string(ScenarioModel m) noexcept;
std::optional<ScenarioModel> parse_scenario_model(std::string_view s) noexcept;

struct Scenario {
  std::string id;
  ScenarioModel model = ScenarioModel::centralized;
  std::uint32_t n = 0;
  double eps = 0.0;
  std::optional<std::uint32_t> k;
  std::vector<double> rates;
  std::optional<std::uint64_t> m_bits;
  /// CONGEST models only.
  Json topology;
  /// Simultaneous model only: players round their counts up to powers of two.
  std::optional<ObliviousConfig> oblivious;
  Json distribution = "uniform";
  std::uint64_t trials = 1;
  /// Overrides the seed given on the command line.
  std::optional<std::uint64_t> seed;
};

/// Reads {"id"?, "model", "n", "eps", "k"?, "rates"?, "m_bits"?, "topology"?,
/// "oblivious"?, "distribution"?, "trials"?, "seed"?}. Throws ParseError.
Scenario scenario_from_json(const Json& j);

struct TrialRecord {
  std::uint64_t trial = 0;
  Decision decision = Decision::yes;
  std::uint64_t z = 0;
  double threshold = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t max_player_samples = 0;
  std::uint64_t message_bits = 0;
  std::uint64_t memory_bits = 0;
  std::uint32_t rounds = 0;
  bool early_terminated = false;
  std::string path;  // congest_combined only
};

struct SummaryRow {
  std::string id;
  std::string model;
  std::uint32_t n = 0;
  double eps = 0.0;
  std::uint32_t players = 1;
  std::uint64_t q = 0;
  std::uint64_t ell = 0;
  double tau = 0.0;
  double threshold = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t yes = 0;
  double yes_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_samples = 0.0;
  std::uint64_t max_samples = 0;
  double mean_message_bits = 0.0;
  std::uint64_t max_message_bits = 0;
  std::uint64_t max_memory_bits = 0;
  double mean_rounds = 0.0;
  std::uint32_t max_rounds = 0;
  std::uint64_t early_terminations = 0;
  std::optional<double> wall_ms;
};

struct RunOptions {
  /// 0 means one per hardware thread.
  unsigned threads = 0;
  /// Adds a wall-clock column; off by default so output is byte-stable.
  bool timing = false;
};

struct ScenarioResult {
  SummaryRow summary;
  std::vector<TrialRecord> records;
  /// The plan for the five planner models; null for CONGEST scenarios.
  Json plan;
};

/// Wilson score interval at 95% for `successes` out of `trials`.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Plans, runs every trial on stream (seed, trial, *) and folds the records
/// in trial order. The result does not depend on the thread count.
ScenarioResult run_scenario(const Scenario& s, std::uint64_t master_seed, const RunOptions& options = {});

std::string csv_header(bool timing);
std::string csv_row(const SummaryRow& row, bool timing);
Json to_json(const TrialRecord& r);
std::string records_jsonl(const ScenarioResult& result);

/// One scenario per line (JSON Lines); blank lines and lines starting with
/// '#' are skipped. Parse and validation errors name the line.
std::vector<Scenario> parse_suite(const std::string& text);

/// CSV with one row per scenario, header first.
std::string run_suite_text(const std::string& text, std::uint64_t master_seed,
                           const RunOptions& options = {});
std::string run_suite(const std::string& path, std::uint64_t master_seed, const RunOptions& options = {});

struct MomentAudit {
  GraphStats stats;
  double mu = 0.0;
  double gamma = 0.0;
  double expected_mean = 0.0;
  double expected_variance = 0.0;
  std::uint64_t trials = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  /// (sample mean - E[Z]) / sqrt(Var[Z] / trials).
  double mean_z = 0.0;
  /// (sample variance - Var[Z]) / its estimated standard error.
  double variance_z = 0.0;
  double variance_relative_error = 0.0;
  bool flagged = false;
};

/// Monte Carlo mean and variance of Z against the closed forms. Flags
/// |z| > 4 on either moment.
MomentAudit moment_audit(const ComparisonGraph& g, const Distribution& p, std::uint64_t trials,
                         std::uint64_t seed);
Json to_json(const MomentAudit& a);

}  // namespace cbt
