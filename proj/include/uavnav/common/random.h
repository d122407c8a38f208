#pragma once

#include <cstdint>
#include <random>

namespace uavnav {

using Rng = std::mt19937_64;

// Independent sub-stream seeds from one master seed. Streams are named by a
// small integer tag so every consumer (scenario, policy noise, batch draws,
// weight init) gets a decorrelated generator.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

namespace seed_stream {
inline constexpr std::uint64_t kScenario = 1;
inline constexpr std::uint64_t kPolicy = 2;
inline constexpr std::uint64_t kBatch = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kUpdateNoise = 5;
inline constexpr std::uint64_t kEvaluation = 6;
}  // namespace seed_stream

}  // namespace uavnav
