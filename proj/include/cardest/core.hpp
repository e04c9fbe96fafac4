#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cardest/error.hpp"

namespace cardest {

inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;
inline constexpr std::uint8_t kTcpSyn = 0x02;
inline constexpr std::uint8_t kTcpAck = 0x10;

/// IPv4 5-tuple. Addresses are host-order integers (10.0.0.1 == 0x0A000001).
struct FlowKey {
    std::uint32_t src_ip = 0;
    std::uint32_t dst_ip = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t proto = 0;

    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

std::size_t hash_value(const FlowKey& key) noexcept;

struct PacketRecord {
    double ts = 0.0;  ///< seconds since stream start
    FlowKey key;
    std::uint32_t pkt_len = 1;
    std::uint8_t tcp_flags = 0;  ///< only meaningful for TCP; 0 otherwise

    bool is_syn() const noexcept { return key.proto == kProtoTcp && (tcp_flags & kTcpSyn) != 0; }

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

/// Throws ValidationError unless pkt_len >= 1, ts >= 0 and flags are clear for non-TCP.
void validate(const PacketRecord& pkt);

/// A contiguous stream segment. In time mode `window` holds [t_start, t_end).
struct Batch {
    struct Window {
        double t_start = 0.0;
        double t_end = 0.0;
    };

    std::size_t index = 0;
    std::vector<PacketRecord> packets;
    std::optional<Window> window;

    std::size_t size() const noexcept { return packets.size(); }
    bool empty() const noexcept { return packets.empty(); }
};

/// Packets drawn from one batch at rate `q`, in batch order.
struct Sample {
    std::vector<PacketRecord> packets;
    double q = 1.0;

    std::size_t size() const noexcept { return packets.size(); }
};

enum class BatchMode { count, time };

std::string to_string(BatchMode mode);
BatchMode parse_batch_mode(const std::string& name);

struct RateConfig {
    BatchMode batch_mode = BatchMode::count;
    std::size_t batch_size = 100000;   ///< packets per batch, count mode
    double estimation_rate = 1.0;      ///< estimations per second, time mode
    double sampling_rate = 0.01;
    double training_rate = 0.01;       ///< fraction of batches processed in full

    /// Throws ConfigError when a field is out of range for the active mode.
    void validate() const;
};

/// Fraction of all packets touched when sampling at `sampling_rate` and fully
/// processing a `training_rate` fraction of batches.
double effective_sampling_rate(double sampling_rate, double training_rate);

/// Inverse of effective_sampling_rate in its second argument. Throws ConfigError
/// when no training rate in [0,1] reaches `target` (sampling_rate > target).
double training_rate_for(double target_effective_rate, double sampling_rate);

std::string format_ipv4(std::uint32_t addr);

}  // namespace cardest

template <>
struct std::hash<cardest::FlowKey> {
    std::size_t operator()(const cardest::FlowKey& key) const noexcept { return cardest::hash_value(key); }
};
