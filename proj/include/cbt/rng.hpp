#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace cbt {

/// Identifies one independent random sub-stream.
///
/// Every random draw in the library is taken from an engine built from a
/// StreamId. The master seed is the only user-facing knob; `trial` is the
/// trial index inside a scenario and `lane` is the player (or batch owner)
/// index inside a trial. Lane 0 of a trial is the stream the monolithic
/// tester uses, so a one-player protocol replays it exactly.
///
/// Derivation: the six 32-bit halves (master, trial, lane) feed a
/// std::seed_seq, which seeds a std::mt19937_64. Both are fully specified by
/// the standard, so a stream is reproducible from its id alone.
struct StreamId {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
  std::uint64_t lane = 0;

  StreamId with_lane(std::uint64_t l) const { return {master, trial, l}; }

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

using Engine = std::mt19937_64;

inline Engine make_engine(const StreamId& id) {
  std::seed_seq seq{static_cast<std::uint32_t>(id.master),
                    static_cast<std::uint32_t>(id.master >> 32),
                    static_cast<std::uint32_t>(id.trial),
                    static_cast<std::uint32_t>(id.trial >> 32),
                    static_cast<std::uint32_t>(id.lane),
                    static_cast<std::uint32_t>(id.lane >> 32)};
  return Engine(seq);
}

inline std::string to_string(const StreamId& id) {
  return std::to_string(id.master) + "/" + std::to_string(id.trial) + "/" +
         std::to_string(id.lane);
}

}  // namespace cbt
