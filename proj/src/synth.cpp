#include "cardest/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "cardest/sampling.hpp"

namespace cardest {

namespace {

constexpr std::uint64_t kFloodIdBase = std::uint64_t{1} << 48;
constexpr std::uint32_t kVictimIp = 0xC633640A;  // 198.51.100.10
constexpr std::uint32_t kFloodPktLen = 40;
constexpr std::uint16_t kServerPorts[] = {80, 443, 53, 22, 25, 8080, 123, 3306};

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

FlowKey regular_key(std::uint64_t id, std::uint64_t salt, double tcp_fraction) {
    const std::uint64_t h = mix64(id ^ mix64(salt));
    FlowKey k;
    k.src_ip = 0x0A000000u | static_cast<std::uint32_t>(id & 0xFFFFFF);
    k.src_port = static_cast<std::uint16_t>(1024 + (id >> 24) % 60000);
    k.dst_ip = 0xC0A80000u | static_cast<std::uint32_t>(h & 0xFFFF);
    k.dst_port = kServerPorts[(h >> 16) % std::size(kServerPorts)];
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    k.proto = u < tcp_fraction ? kProtoTcp : kProtoUdp;
    return k;
}

FlowKey flood_key(std::uint64_t counter) {
    FlowKey k;
    k.src_ip = 0xAC100000u | static_cast<std::uint32_t>(counter & 0xFFFFF);
    k.src_port = static_cast<std::uint16_t>(1024 + (counter >> 20) % 60000);
    k.dst_ip = kVictimIp;
    k.dst_port = 80;
    k.proto = kProtoTcp;
    return k;
}

std::vector<double> rank_cdf(const PhaseSpec& ph) {
    std::vector<double> cdf(ph.pool);
    double acc = 0.0;
    for (std::uint64_t r = 0; r < ph.pool; ++r) {
        const double rank = static_cast<double>(r + 1);
        acc += ph.law == FlowLaw::zipf ? std::pow(rank, -ph.alpha) : std::pow(1.0 - ph.p, rank - 1.0);
        cdf[r] = acc;
    }
    return cdf;
}

struct PhaseOutput {
    std::vector<PacketRecord>& packets;
    std::vector<std::uint64_t>& ids;
};

class PhaseGenerator {
public:
    PhaseGenerator(const SynthSpec& spec, const PhaseSpec& ph, std::size_t phase_index, double t0)
        : spec_(spec), ph_(ph), rng_(batch_rng(spec.seed ^ 0x5eedf00dULL, phase_index)), t_(t0), t0_(t0) {
        if (ph_.law != FlowLaw::fixed) cdf_ = rank_cdf(ph_);
    }

    double run(PhaseOutput out, std::unordered_set<std::uint64_t>& seen, std::uint64_t& flood_counter) {
        const double flood_rate = ph_.syn_flood ? ph_.syn_flood_rate : 0.0;
        const double total_rate = ph_.packet_rate + flood_rate;
        const double end = ph_.duration ? t0_ + *ph_.duration : 0.0;
        std::uint64_t emitted = 0;
        while (true) {
            if (ph_.packets && emitted == *ph_.packets) break;
            const double gap = -std::log1p(-unit_uniform(rng_)) / total_rate;
            if (ph_.duration && t_ + gap >= end) break;
            t_ += gap;
            ++emitted;

            PacketRecord pkt;
            pkt.ts = t_;
            std::uint64_t id = 0;
            if (flood_rate > 0.0 && unit_uniform(rng_) * total_rate < flood_rate) {
                id = kFloodIdBase + flood_counter;
                pkt.key = flood_key(flood_counter++);
                pkt.tcp_flags = kTcpSyn;
                pkt.pkt_len = kFloodPktLen;
            } else {
                id = next_regular_id();
                pkt.key = regular_key(id, spec_.seed, spec_.tcp_fraction);
                if (pkt.key.proto == kProtoTcp) pkt.tcp_flags = seen.insert(id).second ? kTcpSyn : kTcpAck;
                pkt.pkt_len = packet_length();
            }
            out.packets.push_back(pkt);
            out.ids.push_back(id);
        }
        return ph_.duration ? end : t_;
    }

private:
    std::uint64_t next_regular_id() {
        std::uint64_t rank = 0;
        if (ph_.law == FlowLaw::fixed) {
            rank = fixed_rank_;
            if (++fixed_sent_ == ph_.burst) {
                fixed_sent_ = 0;
                fixed_rank_ = (fixed_rank_ + 1) % ph_.pool;
            }
        } else {
            const double u = unit_uniform(rng_) * cdf_.back();
            rank = static_cast<std::uint64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
            rank = std::min<std::uint64_t>(rank, ph_.pool - 1);
        }
        std::uint64_t epoch = 0;
        if (ph_.flow_lifetime > 0.0) {
            const double shift = static_cast<double>(mix64(rank + ph_.flow_offset) >> 11) * 0x1.0p-53;
            epoch = static_cast<std::uint64_t>(std::floor(t_ / ph_.flow_lifetime + shift));
        }
        return ph_.flow_offset + rank + ph_.pool * epoch;
    }

    std::uint32_t packet_length() {
        if (ph_.length_law == LengthLaw::fixed) return ph_.pkt_len_min;
        const auto span = std::uint64_t{ph_.pkt_len_max} - ph_.pkt_len_min + 1;
        return ph_.pkt_len_min + static_cast<std::uint32_t>(rng_() % span);
    }

    const SynthSpec& spec_;
    const PhaseSpec& ph_;
    std::mt19937_64 rng_;
    std::vector<double> cdf_;
    double t_;
    double t0_;
    std::uint64_t fixed_rank_ = 0;
    std::uint32_t fixed_sent_ = 0;
};

FlowLaw parse_law(const std::string& s) {
    if (s == "zipf") return FlowLaw::zipf;
    if (s == "geometric") return FlowLaw::geometric;
    if (s == "fixed") return FlowLaw::fixed;
    throw ConfigError("unknown flow law '" + s + "'");
}

std::string law_name(FlowLaw law) {
    switch (law) {
        case FlowLaw::zipf: return "zipf";
        case FlowLaw::geometric: return "geometric";
        case FlowLaw::fixed: return "fixed";
    }
    return "?";
}

template <class T>
T non_negative_int(const KeyValueDoc& doc, const std::string& key, T fallback) {
    const auto v = doc.get_int(key);
    if (!v) return fallback;
    if (*v < 0) throw ConfigError("'" + key + "' must be non-negative");
    return static_cast<T>(*v);
}

}  // namespace

void PhaseSpec::validate() const {
    if (duration.has_value() == packets.has_value()) {
        throw ConfigError("a phase needs exactly one of duration or packets");
    }
    if (duration && !(*duration > 0.0)) throw ConfigError("phase duration must be positive");
    if (packets && *packets == 0) throw ConfigError("phase packet count must be positive");
    if (!(packet_rate > 0.0)) throw ConfigError("packet_rate must be positive");
    if (pool == 0) throw ConfigError("flow pool must not be empty");
    if (law == FlowLaw::zipf && !(alpha > 0.0)) throw ConfigError("zipf alpha must be positive");
    if (law == FlowLaw::geometric && !(p > 0.0 && p <= 1.0)) throw ConfigError("geometric p must lie in (0, 1]");
    if (law == FlowLaw::fixed && burst == 0) throw ConfigError("fixed burst must be positive");
    if (syn_flood && !(syn_flood_rate > 0.0)) throw ConfigError("syn_flood needs a positive syn_flood_rate");
    if (!(flow_lifetime >= 0.0)) throw ConfigError("flow_lifetime must be non-negative");
    if (pkt_len_min == 0 || pkt_len_max < pkt_len_min) throw ConfigError("invalid packet length range");
}

void SynthSpec::validate() const {
    if (phases.empty()) throw ConfigError("synthetic spec needs at least one phase");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(tcp_fraction >= 0.0 && tcp_fraction <= 1.0)) throw ConfigError("tcp_fraction must lie in [0, 1]");
    for (const auto& ph : phases) ph.validate();
}

SynthTrace generate_trace(const SynthSpec& spec) {
    spec.validate();
    SynthTrace trace;
    std::vector<std::uint64_t> ids;
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t flood_counter = 0;
    double t = 0.0;
    for (std::size_t i = 0; i < spec.phases.size(); ++i) {
        trace.phase_starts.push_back(t);
        trace.phase_first_packet.push_back(trace.packets.size());
        PhaseGenerator gen(spec, spec.phases[i], i, t);
        t = gen.run({trace.packets, ids}, seen, flood_counter);
    }

    // Ground truth from generator flow ids, independent of the FlowKey hashing path.
    std::vector<std::uint64_t> scratch;
    for (std::size_t start = 0; start < ids.size(); start += spec.batch_size) {
        const auto stop = std::min(ids.size(), start + spec.batch_size);
        scratch.assign(ids.begin() + static_cast<std::ptrdiff_t>(start), ids.begin() + static_cast<std::ptrdiff_t>(stop));
        std::sort(scratch.begin(), scratch.end());
        trace.sidecar.push_back(
            static_cast<std::uint64_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin()));
    }
    return trace;
}

SynthSpec parse_synth_spec(const KeyValueDoc& doc) {
    doc.require_known({"name", "seed", "batch_size", "tcp_fraction"});
    SynthSpec spec;
    if (auto v = doc.get_string("name")) spec.name = *v;
    spec.seed = non_negative_int<std::uint64_t>(doc, "seed", spec.seed);
    spec.batch_size = non_negative_int<std::size_t>(doc, "batch_size", spec.batch_size);
    if (auto v = doc.get_double("tcp_fraction")) spec.tcp_fraction = *v;

    for (const auto& t : doc.tables("phase")) {
        t.require_known({"duration", "packets", "packet_rate", "law", "alpha", "p", "burst", "pool", "flow_offset",
                         "flow_lifetime", "syn_flood", "syn_flood_rate", "pkt_len", "pkt_len_min", "pkt_len_max"});
        PhaseSpec ph;
        if (auto v = t.get_double("duration")) ph.duration = *v;
        if (t.has("packets")) ph.packets = non_negative_int<std::uint64_t>(t, "packets", 0);
        if (auto v = t.get_double("packet_rate")) ph.packet_rate = *v;
        if (auto v = t.get_string("law")) ph.law = parse_law(*v);
        if (auto v = t.get_double("alpha")) ph.alpha = *v;
        if (auto v = t.get_double("p")) ph.p = *v;
        ph.burst = non_negative_int<std::uint32_t>(t, "burst", ph.burst);
        ph.pool = non_negative_int<std::uint64_t>(t, "pool", ph.pool);
        ph.flow_offset = non_negative_int<std::uint64_t>(t, "flow_offset", ph.flow_offset);
        if (auto v = t.get_double("flow_lifetime")) ph.flow_lifetime = *v;
        if (auto v = t.get_bool("syn_flood")) ph.syn_flood = *v;
        if (auto v = t.get_double("syn_flood_rate")) ph.syn_flood_rate = *v;
        if (auto v = t.get_string("pkt_len")) {
            if (*v == "uniform") {
                ph.length_law = LengthLaw::uniform;
            } else {
                ph.length_law = LengthLaw::fixed;
                ph.pkt_len_min = ph.pkt_len_max = non_negative_int<std::uint32_t>(t, "pkt_len", 0);
            }
        }
        ph.pkt_len_min = non_negative_int<std::uint32_t>(t, "pkt_len_min", ph.pkt_len_min);
        ph.pkt_len_max = non_negative_int<std::uint32_t>(t, "pkt_len_max", ph.pkt_len_max);
        spec.phases.push_back(ph);
    }
    spec.validate();
    return spec;
}

SynthSpec load_synth_spec(const std::string& path) { return parse_synth_spec(KeyValueDoc::load(path)); }

std::string format_synth_spec(const SynthSpec& spec) {
    auto num = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    std::ostringstream out;
    out << "name = \"" << spec.name << "\"\n";
    out << "seed = " << spec.seed << "\n";
    out << "batch_size = " << spec.batch_size << "\n";
    out << "tcp_fraction = " << num(spec.tcp_fraction) << "\n";
    for (const auto& ph : spec.phases) {
        out << "\n[[phase]]\n";
        if (ph.duration) out << "duration = " << num(*ph.duration) << "\n";
        if (ph.packets) out << "packets = " << *ph.packets << "\n";
        out << "packet_rate = " << num(ph.packet_rate) << "\n";
        out << "law = \"" << law_name(ph.law) << "\"\n";
        if (ph.law == FlowLaw::zipf) out << "alpha = " << num(ph.alpha) << "\n";
        if (ph.law == FlowLaw::geometric) out << "p = " << num(ph.p) << "\n";
        if (ph.law == FlowLaw::fixed) out << "burst = " << ph.burst << "\n";
        out << "pool = " << ph.pool << "\n";
        out << "flow_offset = " << ph.flow_offset << "\n";
        out << "flow_lifetime = " << num(ph.flow_lifetime) << "\n";
        out << "syn_flood = " << (ph.syn_flood ? "true" : "false") << "\n";
        if (ph.syn_flood) out << "syn_flood_rate = " << num(ph.syn_flood_rate) << "\n";
        if (ph.length_law == LengthLaw::fixed) {
            out << "pkt_len = " << ph.pkt_len_min << "\n";
        } else {
            out << "pkt_len = \"uniform\"\npkt_len_min = " << ph.pkt_len_min << "\npkt_len_max = " << ph.pkt_len_max << "\n";
        }
    }
    return out.str();
}

void write_sidecar(std::ostream& out, std::span<const std::uint64_t> sidecar) {
    out << "batch_index,D\n";
    for (std::size_t i = 0; i < sidecar.size(); ++i) out << i << ',' << sidecar[i] << '\n';
}

std::vector<std::uint64_t> read_sidecar(std::istream& in) {
    std::vector<std::uint64_t> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || (row == 1 && line.rfind("batch_index", 0) == 0)) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(row, "expected batch_index,D");
        out.push_back(std::stoull(line.substr(comma + 1)));
    }
    return out;
}

}  // namespace cardest

namespace cardest {

namespace {

PhaseSpec zipf_phase(double duration, double rate, double alpha, std::uint64_t pool, double lifetime) {
    PhaseSpec ph;
    ph.duration = duration;
    ph.packet_rate = rate;
    ph.law = FlowLaw::zipf;
    ph.alpha = alpha;
    ph.pool = pool;
    ph.flow_lifetime = lifetime;
    return ph;
}

PhaseSpec with_flood(PhaseSpec ph, double rate) {
    ph.syn_flood = true;
    ph.syn_flood_rate = rate;
    return ph;
}

}  // namespace

SynthSpec synth_preset(const std::string& name, std::uint64_t seed) {
    SynthSpec spec;
    spec.name = name;
    spec.seed = seed;
    if (name == "caida-like") {
        // Stationary backbone mix; a 20k-packet batch has ~88% of flows under
        // 4 packets and ~50% of packets in flows over 20 packets.
        spec.batch_size = 20000;
        spec.phases = {zipf_phase(60.0, 100000.0, 1.0, 20000, 5.0)};
    } else if (name == "darpa-like") {
        // Six stages starting at t = 0, 113, 163, 194, 223, 236 seconds.
        spec.batch_size = 2000;
        spec.phases = {
            zipf_phase(113.0, 2000.0, 1.1, 4000, 20.0),
            with_flood(zipf_phase(50.0, 2000.0, 1.1, 4000, 20.0), 600.0),
            with_flood(zipf_phase(31.0, 3000.0, 0.9, 12000, 10.0), 2500.0),
            with_flood(zipf_phase(29.0, 2500.0, 1.0, 8000, 10.0), 1200.0),
            zipf_phase(13.0, 1500.0, 1.3, 3000, 20.0),
            zipf_phase(62.0, 2000.0, 1.2, 6000, 30.0),
        };
    } else if (name == "ddos-like") {
        // Background traffic interrupted by SYN floods of varying strength;
        // every episode carries about one million packets.
        spec.batch_size = 10000;
        const double background = 40000.0;
        const double flood[] = {0.0, 240000.0, 40000.0, 0.0, 120000.0, 20000.0,
                                320000.0, 0.0, 80000.0, 0.0, 160000.0, 40000.0};
        for (double f : flood) {
            auto ph = zipf_phase(1.0e6 / (background + f), background, 1.0, 20000, 5.0);
            spec.phases.push_back(f > 0.0 ? with_flood(ph, f) : ph);
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    spec.validate();
    return spec;
}

std::vector<std::string> synth_preset_names() { return {"caida-like", "darpa-like", "ddos-like"}; }

}  // namespace cardest
