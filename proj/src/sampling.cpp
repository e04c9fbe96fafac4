#include "cardest/sampling.hpp"

#include <cmath>

namespace cardest {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string to_string(SamplingScheme scheme) {
    return scheme == SamplingScheme::bernoulli ? "bernoulli" : "fixed-count";
}

SamplingScheme parse_sampling_scheme(const std::string& name) {
    if (name == "bernoulli") return SamplingScheme::bernoulli;
    if (name == "fixed-count" || name == "fixed_count") return SamplingScheme::fixed_count;
    throw ConfigError("unknown sampling scheme '" + name + "'");
}

std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t batch_index) {
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix64(state);
    state ^= batch_index * 0xd1b54a32d192ed03ULL;
    const std::uint64_t b = splitmix64(state);
    return std::mt19937_64(a ^ (b + 0x632be59bd9b4e019ULL));
}

Sample sample_batch(const Batch& batch, const SamplerConfig& cfg) {
    if (!(cfg.q > 0.0 && cfg.q <= 1.0)) throw DomainError("sampling rate must lie in (0, 1]");
    Sample s;
    s.q = cfg.q;
    const std::size_t total = batch.size();
    if (cfg.q == 1.0) {
        s.packets = batch.packets;
        return s;
    }
    auto rng = batch_rng(cfg.seed, batch.index);
    if (cfg.scheme == SamplingScheme::bernoulli) {
        s.packets.reserve(static_cast<std::size_t>(cfg.q * static_cast<double>(total) * 1.1) + 8);
        for (const auto& pkt : batch.packets) {
            if (unit_uniform(rng) < cfg.q) s.packets.push_back(pkt);
        }
        return s;
    }
    // Knuth's Algorithm S: keep record t with probability (want - chosen)/(total - t).
    const auto want = static_cast<std::size_t>(std::llround(cfg.q * static_cast<double>(total)));
    s.packets.reserve(want);
    std::size_t chosen = 0;
    for (std::size_t t = 0; t < total && chosen < want; ++t) {
        const double u = unit_uniform(rng);
        if (static_cast<double>(total - t) * u < static_cast<double>(want - chosen)) {
            s.packets.push_back(batch.packets[t]);
            ++chosen;
        }
    }
    return s;
}

}  // namespace cardest
