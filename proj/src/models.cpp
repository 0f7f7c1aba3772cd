#include "cbt/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "cbt/error.hpp"

namespace cbt {

MessageCodec::MessageCodec(double threshold)
    : threshold_(threshold),
      sentinel_(static_cast<std::uint64_t>(std::ceil(threshold))),
      width_(message_bits_for(threshold)) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold))
    throw InvalidArgument("message threshold must be finite and >= 0");
}

Message MessageCodec::encode(std::uint64_t z) const {
  Message m;
  m.encoded_bits = width_;
  if (static_cast<double>(z) < threshold_) m.count = z;
  return m;
}

std::uint64_t MessageCodec::to_code(const Message& m) const {
  return m.count ? *m.count : sentinel_;
}

Message MessageCodec::from_code(std::uint64_t code) const {
  if (code > sentinel_) throw ModelViolation("codepoint " + std::to_string(code) + " out of range");
  Message m;
  m.encoded_bits = width_;
  if (code < sentinel_) m.count = code;
  return m;
}

Decision referee_decide(const std::vector<Message>& messages, double threshold) {
  std::uint64_t z = 0;
  for (const auto& m : messages) {
    if (m.is_sentinel()) return Decision::no;
    z += *m.count;
  }
  return decide(z, threshold);
}

std::uint64_t ResourceLedger::total_samples() const {
  std::uint64_t s = 0;
  for (const auto& p : players) s += p.samples;
  return s;
}

std::uint64_t ResourceLedger::max_samples() const {
  std::uint64_t s = 0;
  for (const auto& p : players) s = std::max(s, p.samples);
  return s;
}

std::uint64_t ResourceLedger::max_message_bits() const {
  std::uint64_t s = 0;
  for (const auto& p : players) s = std::max(s, p.message_bits);
  return s;
}

std::uint64_t ResourceLedger::max_memory_bits() const {
  std::uint64_t s = 0;
  for (const auto& p : players) s = std::max(s, p.peak_memory_bits);
  return s;
}

namespace {

std::uint64_t block_total(const std::vector<std::uint64_t>& blocks) {
  return std::accumulate(blocks.begin(), blocks.end(), std::uint64_t{0});
}

void require_model(const Plan& plan, std::initializer_list<Model> allowed, const char* op) {
  for (auto m : allowed)
    if (plan.model == m) return;
  throw InvalidArgument(std::string(op) + " cannot run a " + std::string(to_string(plan.model)) +
                        " plan");
}

void require_domain(const Plan& plan, const Distribution& p) {
  if (p.n() != plan.n)
    throw InvalidArgument("distribution domain " + std::to_string(p.n()) + " does not match plan n = " +
                          std::to_string(plan.n));
  if (plan.player_blocks.size() != plan.players)
    throw InvalidArgument("plan lists blocks for " + std::to_string(plan.player_blocks.size()) +
                          " players but declares " + std::to_string(plan.players));
}

void raise_violations(const ResourceLedger& ledger) {
  if (ledger.violations.empty()) return;
  std::string all;
  for (const auto& v : ledger.violations) all += (all.empty() ? "" : "; ") + v;
  throw ModelViolation(all);
}

/// One player holding only her own samples. Collisions are counted inside
/// each of her blocks, so no comparison can reach another player's data.
std::uint64_t player_collisions(const std::vector<std::uint64_t>& blocks, Engine& engine,
                                const Distribution& p) {
  std::uint64_t z = 0;
  std::vector<Symbol> block;
  for (auto size : blocks) {
    block.resize(size);
    for (auto& s : block) s = p.draw(engine);
    z += clique_collisions(block);
  }
  return z;
}

struct StreamOutcome {
  std::uint64_t counter = 0;
  std::uint64_t samples = 0;
  std::uint64_t peak_memory_bits = 0;
  bool early = false;
};

/// One pass over a player's batches with a counter that saturates at
/// ceil(T). Each batch is stored, compared internally, and discarded.
StreamOutcome stream_batches(const std::vector<std::uint64_t>& batches, Engine& engine,
                             const Distribution& p, double t, std::uint32_t symbol_bits) {
  const auto cap = static_cast<std::uint64_t>(std::ceil(t));
  const std::uint64_t counter_bits = counter_bits_for(t);
  StreamOutcome out;
  out.peak_memory_bits = counter_bits;
  if (cap == 0) {
    out.early = true;
    return out;
  }
  std::unordered_map<Symbol, std::uint64_t> stored;
  for (auto size : batches) {
    stored.clear();
    for (std::uint64_t i = 0; i < size; ++i) {
      const Symbol s = p.draw(engine);
      ++out.samples;
      out.counter = std::min(cap, out.counter + stored[s]++);
      out.peak_memory_bits = std::max(out.peak_memory_bits, (i + 1) * symbol_bits + counter_bits);
      if (out.counter >= cap) {
        out.early = true;
        return out;
      }
    }
  }
  return out;
}

}  // namespace

SampleLabeling model_labeling(const Plan& plan, const Distribution& p, const StreamId& trial) {
  require_domain(plan, p);
  SampleLabeling out{{}, trial};
  for (std::uint32_t k = 0; k < plan.players; ++k) {
    const auto part = sample_labeling(p, block_total(plan.player_blocks[k]), player_stream(trial, k));
    out.values.insert(out.values.end(), part.values.begin(), part.values.end());
  }
  return out;
}

Plan oblivious_plan(const Plan& plan) {
  Plan out = plan;
  std::vector<std::uint64_t> sizes;
  for (auto& blocks : out.player_blocks)
    for (auto& q : blocks) {
      if (q >= 2) q = std::bit_ceil(q);
      sizes.push_back(q);
    }
  out.stats = clique_family_stats(sizes);
  out.threshold = threshold(out.stats.edges, out.tau, out.n, out.eps);
  out.certificate = check_theorem(out.stats, out.tau, out.n, out.eps);
  out.predicted.total_samples = out.stats.vertices;
  out.predicted.max_samples_per_player = 0;
  for (const auto& blocks : out.player_blocks)
    out.predicted.max_samples_per_player =
        std::max(out.predicted.max_samples_per_player, block_total(blocks));
  return out;
}

namespace {

SimulationResult simulate_oblivious(const Plan& plan, const Distribution& p, const StreamId& trial,
                                    const ObliviousConfig& cfg) {
  if (cfg.max_players < plan.players)
    throw InvalidArgument("oblivious mode: player bound " + std::to_string(cfg.max_players) +
                          " is below the actual k = " + std::to_string(plan.players));
  const Plan rounded = oblivious_plan(plan);
  const std::uint32_t exponent_range = ceil_log2(cfg.max_samples);
  if (exponent_range == 0) throw InvalidArgument("oblivious mode needs max_samples >= 2");
  const std::uint32_t exponent_bits = ceil_log2(exponent_range);
  const auto sat_edges = static_cast<std::uint64_t>(cfg.max_players) *
                         (cfg.max_samples * (cfg.max_samples - 1) / 2);
  const MessageCodec codec(threshold(sat_edges, plan.tau, plan.n, plan.eps));

  SimulationResult r;
  r.ledger.players.resize(plan.players);
  std::uint64_t edges = 0;
  for (std::uint32_t k = 0; k < plan.players; ++k) {
    const auto& blocks = rounded.player_blocks[k];
    const std::uint64_t samples = block_total(blocks);
    if (samples > cfg.max_samples || blocks.size() != 1 || samples < 2)
      throw InvalidArgument("oblivious mode needs one clique of 2..max_samples samples per player");
    auto engine = make_engine(player_stream(trial, k));
    Message m = codec.encode(player_collisions(blocks, engine, p));
    m.sample_count_exponent = static_cast<std::uint32_t>(std::countr_zero(samples));
    m.encoded_bits += exponent_bits;
    r.ledger.players[k] = {samples, m.encoded_bits, 0};
    r.messages.push_back(m);
  }
  // The referee learns |E| from the exponents alone.
  for (const auto& m : r.messages) {
    const std::uint64_t q = std::uint64_t{1} << *m.sample_count_exponent;
    edges += q * (q - 1) / 2;
  }
  r.threshold = threshold(edges, plan.tau, plan.n, plan.eps);
  r.decision = referee_decide(r.messages, r.threshold);
  for (const auto& m : r.messages) r.z_reported += m.count.value_or(0);
  for (std::uint32_t k = 0; k < plan.players; ++k)
    if (r.ledger.players[k].message_bits > codec.width() + exponent_bits)
      r.ledger.violations.push_back("player " + std::to_string(k) + " message too wide");
  raise_violations(r.ledger);
  return r;
}

SimulationResult simulate_partitioned(const Plan& plan, const Distribution& p, const StreamId& trial) {
  const MessageCodec codec(plan.threshold);
  SimulationResult r;
  r.threshold = plan.threshold;
  r.ledger.players.resize(plan.players);
  r.ledger.time = plan.time;
  for (std::uint32_t k = 0; k < plan.players; ++k) {
    auto engine = make_engine(player_stream(trial, k));
    const auto& blocks = plan.player_blocks[k];
    const Message m = codec.encode(player_collisions(blocks, engine, p));
    r.ledger.players[k] = {block_total(blocks), m.encoded_bits, 0};
    r.messages.push_back(m);
    if (m.encoded_bits != plan.predicted.message_bits)
      r.ledger.violations.push_back("player " + std::to_string(k) + " sent " +
                                    std::to_string(m.encoded_bits) + " bits, planned " +
                                    std::to_string(plan.predicted.message_bits));
  }
  r.decision = referee_decide(r.messages, r.threshold);
  for (const auto& m : r.messages) r.z_reported += m.count.value_or(0);
  return r;
}

}  // namespace

SimulationResult simulate_simultaneous(const Plan& plan, const Distribution& p, const StreamId& trial,
                                       const SimulationOptions& options) {
  require_model(plan, {Model::simultaneous, Model::asymmetric}, "simulate_simultaneous");
  require_domain(plan, p);
  if (options.oblivious) return simulate_oblivious(plan, p, trial, *options.oblivious);
  auto r = simulate_partitioned(plan, p, trial);
  raise_violations(r.ledger);
  return r;
}

SimulationResult simulate_asymmetric(const Plan& plan, const Distribution& p, const StreamId& trial) {
  require_model(plan, {Model::asymmetric}, "simulate_asymmetric");
  require_domain(plan, p);
  if (plan.rates.size() != plan.players) throw InvalidArgument("asymmetric plan needs one rate per player");
  auto r = simulate_partitioned(plan, p, trial);
  for (std::uint32_t k = 0; k < plan.players; ++k) {
    const auto due = static_cast<std::uint64_t>(std::floor(plan.rates[k] * plan.time));
    if (r.ledger.players[k].samples != due)
      r.ledger.violations.push_back("player " + std::to_string(k) + " drew " +
                                    std::to_string(r.ledger.players[k].samples) +
                                    " samples, floor(R t) = " + std::to_string(due));
  }
  raise_violations(r.ledger);
  return r;
}

SimulationResult simulate_streaming(const Plan& plan, const Distribution& p, const StreamId& trial) {
  require_model(plan, {Model::streaming}, "simulate_streaming");
  require_domain(plan, p);
  SimulationResult r;
  r.threshold = plan.threshold;
  auto engine = make_engine(player_stream(trial, 0));
  const auto s = stream_batches(plan.player_blocks[0], engine, p, plan.threshold, bits_per_symbol(plan.n));
  r.ledger.players = {{s.samples, 0, s.peak_memory_bits}};
  r.early_terminated = s.early;
  r.z_reported = s.counter;
  r.decision = s.early ? Decision::no : decide(s.counter, plan.threshold);
  if (s.peak_memory_bits > plan.memory_budget_bits)
    r.ledger.violations.push_back("peak memory " + std::to_string(s.peak_memory_bits) +
                                  " bits exceeds m = " + std::to_string(plan.memory_budget_bits));
  raise_violations(r.ledger);
  return r;
}

SimulationResult simulate_simultaneous_streaming(const Plan& plan, const Distribution& p,
                                                 const StreamId& trial) {
  require_model(plan, {Model::simultaneous_streaming}, "simulate_simultaneous_streaming");
  require_domain(plan, p);
  const MessageCodec codec(plan.threshold);
  SimulationResult r;
  r.threshold = plan.threshold;
  r.ledger.players.resize(plan.players);
  for (std::uint32_t k = 0; k < plan.players; ++k) {
    auto engine = make_engine(player_stream(trial, k));
    const auto s =
        stream_batches(plan.player_blocks[k], engine, p, plan.threshold, bits_per_symbol(plan.n));
    Message m = s.early ? codec.from_code(codec.sentinel_code()) : codec.encode(s.counter);
    r.early_terminated = r.early_terminated || s.early;
    r.ledger.players[k] = {s.samples, m.encoded_bits, s.peak_memory_bits};
    r.messages.push_back(m);
    const std::string who = "player " + std::to_string(k);
    if (s.peak_memory_bits > plan.memory_budget_bits)
      r.ledger.violations.push_back(who + " peak memory " + std::to_string(s.peak_memory_bits) +
                                    " bits exceeds m = " + std::to_string(plan.memory_budget_bits));
    if (m.encoded_bits != plan.predicted.message_bits)
      r.ledger.violations.push_back(who + " message width differs from plan");
  }
  r.decision = referee_decide(r.messages, r.threshold);
  for (const auto& m : r.messages) r.z_reported += m.count.value_or(0);
  raise_violations(r.ledger);
  return r;
}

SimulationResult simulate(const Plan& plan, const Distribution& p, const StreamId& trial,
                          const SimulationOptions& options) {
  switch (plan.model) {
    case Model::centralized: {
      // Same draws as tester.run on instantiate(plan), without building the
      // edge list.
      require_domain(plan, p);
      auto engine = make_engine(trial.with_lane(0));
      SimulationResult r;
      r.threshold = plan.threshold;
      r.z_reported = player_collisions(plan.player_blocks[0], engine, p);
      r.decision = decide(r.z_reported, r.threshold);
      r.ledger.players = {{block_total(plan.player_blocks[0]), 0, 0}};
      return r;
    }
    case Model::simultaneous: return simulate_simultaneous(plan, p, trial, options);
    case Model::asymmetric: return simulate_asymmetric(plan, p, trial);
    case Model::streaming: return simulate_streaming(plan, p, trial);
    case Model::simultaneous_streaming: return simulate_simultaneous_streaming(plan, p, trial);
  }
  throw InvalidArgument("unknown model");
}

}  // namespace cbt
