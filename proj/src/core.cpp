#include "cardest/core.hpp"

#include <cmath>
#include <sstream>

namespace cardest {

namespace {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::size_t hash_value(const FlowKey& key) noexcept {
    const std::uint64_t addrs = (std::uint64_t{key.src_ip} << 32) | key.dst_ip;
    const std::uint64_t rest =
        (std::uint64_t{key.src_port} << 24) | (std::uint64_t{key.dst_port} << 8) | key.proto;
    return static_cast<std::size_t>(mix64(addrs ^ mix64(rest)));
}

void validate(const PacketRecord& pkt) {
    if (!(pkt.ts >= 0.0) || !std::isfinite(pkt.ts)) {
        throw ValidationError("timestamp must be finite and non-negative");
    }
    if (pkt.pkt_len == 0) {
        throw ValidationError("packet length must be positive");
    }
    if (pkt.key.proto != kProtoTcp && pkt.tcp_flags != 0) {
        throw ValidationError("tcp_flags set on a non-TCP packet");
    }
}

std::string to_string(BatchMode mode) { return mode == BatchMode::count ? "count" : "time"; }

BatchMode parse_batch_mode(const std::string& name) {
    if (name == "count") return BatchMode::count;
    if (name == "time") return BatchMode::time;
    throw ConfigError("unknown batch mode '" + name + "' (expected count or time)");
}

void RateConfig::validate() const {
    if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
        throw ConfigError("sampling_rate must lie in (0, 1]");
    }
    if (!in_unit_interval(training_rate)) {
        throw ConfigError("training_rate must lie in [0, 1]");
    }
    if (batch_mode == BatchMode::count && batch_size == 0) {
        throw ConfigError("batch_size must be positive in count mode");
    }
    if (batch_mode == BatchMode::time && !(estimation_rate > 0.0 && std::isfinite(estimation_rate))) {
        throw ConfigError("estimation_rate must be positive in time mode");
    }
}

double effective_sampling_rate(double sampling_rate, double training_rate) {
    if (!in_unit_interval(sampling_rate) || !in_unit_interval(training_rate)) {
        throw DomainError("rates must lie in [0, 1]");
    }
    if (sampling_rate == 0.0) {
        throw DomainError("sampling_rate must be positive");
    }
    if (sampling_rate == 1.0 || training_rate == 1.0) return 1.0;
    return sampling_rate + training_rate - sampling_rate * training_rate;
}

double training_rate_for(double target_effective_rate, double sampling_rate) {
    if (!(sampling_rate > 0.0 && sampling_rate <= 1.0) || !in_unit_interval(target_effective_rate)) {
        throw DomainError("rates must lie in [0, 1] with a positive sampling rate");
    }
    if (sampling_rate > target_effective_rate) {
        std::ostringstream msg;
        msg << "sampling_rate " << sampling_rate << " exceeds effective rate " << target_effective_rate;
        throw ConfigError(msg.str());
    }
    if (sampling_rate == 1.0) return 0.0;
    return (target_effective_rate - sampling_rate) / (1.0 - sampling_rate);
}

std::string format_ipv4(std::uint32_t addr) {
    return std::to_string(addr >> 24) + '.' + std::to_string((addr >> 16) & 0xff) + '.' +
           std::to_string((addr >> 8) & 0xff) + '.' + std::to_string(addr & 0xff);
}

}  // namespace cardest
