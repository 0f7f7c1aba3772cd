#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbt/conditions.hpp"
#include "cbt/dist.hpp"
#include "cbt/rng.hpp"
#include "cbt/tester.hpp"

namespace cbt {

// --- Messages ------------------------------------------------------------------

/// Fixed-width player message. A count below T is sent literally; anything
/// at or above T is replaced by the sentinel, which makes the referee reject.
struct Message {
  /// nullopt is the overflow sentinel.
  std::optional<std::uint64_t> count;
  std::uint32_t encoded_bits = 0;
  /// Oblivious mode only: log2 of the rounded-up sample count.
  std::optional<std::uint32_t> sample_count_exponent;

  bool is_sentinel() const noexcept { return !count.has_value(); }
};

/// Codec for one threshold. Codepoints 0..ceil(T)-1 are literal counts and
/// ceil(T) is the sentinel, so the field is ceil(log2(ceil(T)+2)) bits wide.
class MessageCodec {
 public:
  explicit MessageCodec(double threshold);

  double threshold() const noexcept { return threshold_; }
  std::uint64_t sentinel_code() const noexcept { return sentinel_; }
  std::uint32_t width() const noexcept { return width_; }

  Message encode(std::uint64_t z) const;
  std::uint64_t to_code(const Message& m) const;
  /// Throws ModelViolation for codepoints beyond the sentinel.
  Message from_code(std::uint64_t code) const;

 private:
  double threshold_;
  std::uint64_t sentinel_;
  std::uint32_t width_;
};

/// Referee rule: any sentinel rejects; otherwise YES iff sum < T.
Decision referee_decide(const std::vector<Message>& messages, double threshold);

// --- Resource accounting -----------------------------------------------------

struct PlayerUsage {
  std::uint64_t samples = 0;
  std::uint64_t message_bits = 0;
  std::uint64_t peak_memory_bits = 0;
};

struct ResourceLedger {
  std::vector<PlayerUsage> players;
  double time = 0.0;
  std::vector<std::string> violations;

  std::uint64_t total_samples() const;
  std::uint64_t max_samples() const;
  std::uint64_t max_message_bits() const;
  std::uint64_t max_memory_bits() const;
};

/// What the referee and players agree on before any sample is drawn. In the
/// oblivious mode the referee does not know the exact number of players; it
/// only knows an upper bound, which fixes the message width.
struct ObliviousConfig {
  std::uint32_t max_players = 0;
  /// Largest per-player sample count the exponent field has to encode.
  std::uint64_t max_samples = 0;
};

struct SimulationOptions {
  std::optional<ObliviousConfig> oblivious;
};

struct SimulationResult {
  Decision decision = Decision::yes;
  ResourceLedger ledger;
  std::vector<Message> messages;
  /// Streaming only: the counter reached ceil(T) before the stream ended.
  bool early_terminated = false;
  /// Sum of literal counts the referee saw (sentinels excluded).
  std::uint64_t z_reported = 0;
  /// Threshold the referee compared against.
  double threshold = 0.0;
};

/// Stream used by player p inside a trial: lane p of the trial stream.
inline StreamId player_stream(const StreamId& trial, std::uint32_t player) {
  return trial.with_lane(player);
}

/// The labeling of instantiate(plan) that the model simulators draw: player
/// p's vertices take the first draws of player_stream(trial, p), in block
/// order. For one player this is sample_labeling(P, |V|, trial) exactly.
SampleLabeling model_labeling(const Plan& plan, const Distribution& p, const StreamId& trial);

SimulationResult simulate_simultaneous(const Plan& plan, const Distribution& p,
                                       const StreamId& trial, const SimulationOptions& options = {});
SimulationResult simulate_asymmetric(const Plan& plan, const Distribution& p, const StreamId& trial);
SimulationResult simulate_streaming(const Plan& plan, const Distribution& p, const StreamId& trial);
SimulationResult simulate_simultaneous_streaming(const Plan& plan, const Distribution& p,
                                                 const StreamId& trial);

/// Dispatches on plan.model. The centralized model runs the monolithic tester.
SimulationResult simulate(const Plan& plan, const Distribution& p, const StreamId& trial,
                          const SimulationOptions& options = {});

/// Per-player clique sizes after rounding each up to a power of two.
Plan oblivious_plan(const Plan& plan);

}  // namespace cbt
