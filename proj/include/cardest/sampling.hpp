#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "cardest/core.hpp"

namespace cardest {

enum class SamplingScheme { bernoulli, fixed_count };

std::string to_string(SamplingScheme scheme);
SamplingScheme parse_sampling_scheme(const std::string& name);

struct SamplerConfig {
    double q = 0.01;
    std::uint64_t seed = 1;
    SamplingScheme scheme = SamplingScheme::bernoulli;
};

/// Random source for batch `batch_index`: a std::mt19937_64 seeded from
/// splitmix64(seed, batch_index). The engine's output sequence is fixed by the
/// C++ standard, so samples are identical on every conforming platform.
std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t batch_index);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Bernoulli: each packet kept iff its uniform draw is below q. Two calls on the
/// same batch and seed with q1 < q2 therefore yield nested samples.
/// Fixed-count: exactly round(q*N) packets by selection sampling.
/// Order is preserved in both schemes.
Sample sample_batch(const Batch& batch, const SamplerConfig& cfg);

}  // namespace cardest
