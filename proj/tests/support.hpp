#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cardest/core.hpp"

namespace testutil {

// Packet of flow `id`; distinct ids give distinct 5-tuples.
inline cardest::PacketRecord packet(std::uint32_t id, double ts = 0.0, std::uint32_t len = 100, bool syn = false,
                                    std::uint8_t proto = cardest::kProtoTcp) {
    cardest::PacketRecord p;
    p.ts = ts;
    p.key.src_ip = 0x0a000000u + id;
    p.key.dst_ip = 0xc0a80001u;
    p.key.src_port = static_cast<std::uint16_t>(1024 + id % 50000);
    p.key.dst_port = 80;
    p.key.proto = proto;
    p.pkt_len = len;
    p.tcp_flags = proto == cardest::kProtoTcp ? (syn ? cardest::kTcpSyn : cardest::kTcpAck) : 0;
    return p;
}

inline cardest::Batch batch_of(const std::vector<std::uint32_t>& flows, std::size_t index = 0) {
    cardest::Batch b;
    b.index = index;
    for (std::size_t i = 0; i < flows.size(); ++i) b.packets.push_back(packet(flows[i], 0.001 * static_cast<double>(i)));
    return b;
}

inline cardest::Batch random_batch(std::mt19937_64& rng, std::size_t packets, std::uint32_t flows, std::size_t index = 0) {
    std::uniform_int_distribution<std::uint32_t> pick(0, flows - 1);
    std::vector<std::uint32_t> ids(packets);
    for (auto& id : ids) id = pick(rng);
    return batch_of(ids, index);
}

}  // namespace testutil

namespace testutil {

// Batches whose cardinality is linear in their singleton count: batch i holds
// x_i one-packet flows and D_i - x_i two-packet flows with
// D_i = round(slope * x_i + intercept + noise).
struct PlantedLine {
    double slope;
    double intercept;
    double x_lo;
    double x_hi;
    double noise_sd;
};

inline std::vector<cardest::Batch> planted_batches(std::mt19937_64& rng, const PlantedLine& line, std::size_t count,
                                                   std::size_t first_index = 0) {
    std::uniform_int_distribution<int> xdist(static_cast<int>(line.x_lo), static_cast<int>(line.x_hi));
    std::normal_distribution<double> noise(0.0, line.noise_sd);
    std::vector<cardest::Batch> out;
    std::uint32_t next_flow = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto x = static_cast<std::uint32_t>(xdist(rng));
        const double d = std::round(line.slope * x + line.intercept + noise(rng));
        const auto total = static_cast<std::uint32_t>(std::max<double>(d, x));
        std::vector<std::uint32_t> ids;
        for (std::uint32_t f = 0; f < total; ++f) {
            ids.push_back(next_flow + f);
            if (f >= x) ids.push_back(next_flow + f);
        }
        next_flow += total;
        std::shuffle(ids.begin(), ids.end(), rng);
        out.push_back(batch_of(ids, first_index + k));
    }
    return out;
}

}  // namespace testutil
