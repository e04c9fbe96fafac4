#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardest/core.hpp"
#include "cardest/kvconfig.hpp"

namespace cardest {

/// How packets of a phase are spread over its pool of flows.
///  - zipf:      flow of rank r is picked with probability proportional to r^-alpha
///  - geometric: rank r picked with probability proportional to (1-p)^(r-1)
///  - fixed:     flows take turns in rank order, each sending `burst` packets back to back
enum class FlowLaw { zipf, geometric, fixed };

enum class LengthLaw { fixed, uniform };

struct PhaseSpec {
    std::optional<double> duration;          ///< seconds
    std::optional<std::uint64_t> packets;    ///< exact packet count (alternative to duration)
    double packet_rate = 10000.0;            ///< packets/second of regular traffic
    FlowLaw law = FlowLaw::zipf;
    double alpha = 1.0;
    double p = 0.5;
    std::uint32_t burst = 1;
    std::uint64_t pool = 10000;
    std::uint64_t flow_offset = 0;           ///< first flow id of the pool; phases sharing it share flows
    double flow_lifetime = 0.0;              ///< seconds before a rank is taken over by a new flow; 0 = never
    bool syn_flood = false;
    double syn_flood_rate = 0.0;             ///< packets/second of single-packet SYN flows
    LengthLaw length_law = LengthLaw::uniform;
    std::uint32_t pkt_len_min = 40;
    std::uint32_t pkt_len_max = 1500;

    void validate() const;
};

struct SynthSpec {
    std::string name = "custom";
    std::uint64_t seed = 1;
    std::size_t batch_size = 10000;  ///< count-mode batch size of the ground-truth sidecar
    double tcp_fraction = 0.85;      ///< share of regular flows that are TCP
    std::vector<PhaseSpec> phases;

    void validate() const;
};

struct SynthTrace {
    std::vector<PacketRecord> packets;
    std::vector<std::uint64_t> sidecar;       ///< exact D per count-mode batch of spec.batch_size
    std::vector<double> phase_starts;         ///< seconds
    std::vector<std::size_t> phase_first_packet;
};

SynthTrace generate_trace(const SynthSpec& spec);

SynthSpec parse_synth_spec(const KeyValueDoc& doc);
SynthSpec load_synth_spec(const std::string& path);

/// Named presets: "caida-like" (stationary heavy tail), "darpa-like" (six
/// attack stages), "ddos-like" (recurring SYN-flood episodes).
SynthSpec synth_preset(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> synth_preset_names();

/// Serializes a spec back to the key-value format accepted by parse_synth_spec.
std::string format_synth_spec(const SynthSpec& spec);

void write_sidecar(std::ostream& out, std::span<const std::uint64_t> sidecar);
std::vector<std::uint64_t> read_sidecar(std::istream& in);

}  // namespace cardest
