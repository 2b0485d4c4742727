#pragma once

#include <cstdint>
#include <random>

namespace bosonsim {

/// Engine used everywhere. Samplers take it by reference; callers own one per worker.
using Rng = std::mt19937_64;

/// Independent stream for one work item (frame, chain block) of a seeded run.
/// The stream depends only on (seed, stream_id), never on which worker runs it.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x626f736fu};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace bosonsim
