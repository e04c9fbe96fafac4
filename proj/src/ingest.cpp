#include "cardest/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace cardest {

namespace {

template <class Int>
bool parse_uint(std::string_view text, Int& out, std::uint64_t max_value) {
    std::uint64_t v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty() || v > max_value) return false;
    out = static_cast<Int>(v);
    return true;
}

std::array<std::string_view, 8> split_fields(std::string_view line, std::size_t row) {
    std::array<std::string_view, 8> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string_view::npos ? line.size() : comma;
        if (count == fields.size()) {
            throw ParseError(row, "expected 8 fields, found more");
        }
        fields[count++] = line.substr(start, end - start);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (count != fields.size()) {
        throw ParseError(row, "expected 8 fields, found " + std::to_string(count));
    }
    return fields;
}

// --- pcap -----------------------------------------------------------------

constexpr std::uint32_t kPcapMagicUsec = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicNsec = 0xa1b23c4d;
constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::size_t kEthHeader = 14;

std::uint32_t bswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00) | ((v << 8) & 0xff0000) | (v << 24);
}

std::uint32_t load_le32(const unsigned char* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

std::uint16_t load_be16(const unsigned char* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t load_be32(const unsigned char* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
           std::uint32_t{p[3]};
}

struct PcapLayout {
    bool swapped = false;
    bool nanos = false;
};

std::optional<PcapLayout> pcap_layout(std::uint32_t magic_le) {
    if (magic_le == kPcapMagicUsec) return PcapLayout{false, false};
    if (magic_le == kPcapMagicNsec) return PcapLayout{false, true};
    if (bswap32(magic_le) == kPcapMagicUsec) return PcapLayout{true, false};
    if (bswap32(magic_le) == kPcapMagicNsec) return PcapLayout{true, true};
    return std::nullopt;
}

// Decodes an Ethernet frame into a record (timestamp left unset). Returns
// nullopt for frames the estimator does not count.
std::optional<PacketRecord> decode_frame(const unsigned char* frame, std::size_t caplen, std::uint32_t origlen) {
    if (caplen < kEthHeader + 20) return std::nullopt;
    if (load_be16(frame + 12) != 0x0800) return std::nullopt;
    const unsigned char* ip = frame + kEthHeader;
    if ((ip[0] >> 4) != 4) return std::nullopt;
    const std::size_t ihl = std::size_t{ip[0] & 0x0fu} * 4;
    if (ihl < 20) return std::nullopt;
    const std::uint8_t proto = ip[9];
    if (proto != kProtoTcp && proto != kProtoUdp) return std::nullopt;
    if ((load_be16(ip + 6) & 0x1fff) != 0) return std::nullopt;  // non-first fragment, no ports
    if (caplen < kEthHeader + ihl + 4) return std::nullopt;

    PacketRecord pkt;
    pkt.key.src_ip = load_be32(ip + 12);
    pkt.key.dst_ip = load_be32(ip + 16);
    pkt.key.proto = proto;
    const unsigned char* l4 = ip + ihl;
    pkt.key.src_port = load_be16(l4);
    pkt.key.dst_port = load_be16(l4 + 2);
    std::uint32_t total = load_be16(ip + 2);
    if (total == 0) total = origlen > kEthHeader ? origlen - static_cast<std::uint32_t>(kEthHeader) : 0;
    if (total == 0) return std::nullopt;
    pkt.pkt_len = total;
    if (proto == kProtoTcp && caplen >= kEthHeader + ihl + 14) pkt.tcp_flags = l4[13];
    return pkt;
}

}  // namespace

std::uint32_t parse_ipv4(std::string_view text) {
    std::uint32_t addr = 0;
    std::size_t start = 0;
    for (int octet = 0; octet < 4; ++octet) {
        const auto dot = text.find('.', start);
        const bool last = octet == 3;
        if (last != (dot == std::string_view::npos)) {
            throw ValidationError("malformed IPv4 address '" + std::string(text) + "'");
        }
        const auto part = text.substr(start, last ? std::string_view::npos : dot - start);
        std::uint32_t v = 0;
        if (part.size() > 3 || !parse_uint(part, v, 255)) {
            throw ValidationError("malformed IPv4 address '" + std::string(text) + "'");
        }
        addr = (addr << 8) | v;
        start = dot + 1;
    }
    return addr;
}

PacketRecord parse_packet_record(std::string_view line, std::size_t row) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto f = split_fields(line, row);
    PacketRecord pkt;

    {
        const auto* last = f[0].data() + f[0].size();
        auto [ptr, ec] = std::from_chars(f[0].data(), last, pkt.ts);
        if (ec != std::errc{} || ptr != last || f[0].empty()) throw ParseError(row, "bad ts_sec '" + std::string(f[0]) + "'");
    }
    try {
        pkt.key.src_ip = parse_ipv4(f[1]);
        pkt.key.dst_ip = parse_ipv4(f[2]);
    } catch (const ValidationError& e) {
        throw ParseError(row, e.what());
    }
    if (!parse_uint(f[3], pkt.key.src_port, 65535)) throw ParseError(row, "bad src_port");
    if (!parse_uint(f[4], pkt.key.dst_port, 65535)) throw ParseError(row, "bad dst_port");
    if (!parse_uint(f[5], pkt.key.proto, 255)) throw ParseError(row, "bad proto");
    // pkt_len is parsed as a 64-bit value first so "0" reaches validation, not the parser.
    std::uint64_t len = 0;
    if (!parse_uint(f[6], len, 0xffffffffULL)) throw ParseError(row, "bad pkt_len");
    pkt.pkt_len = static_cast<std::uint32_t>(len);
    if (!parse_uint(f[7], pkt.tcp_flags, 255)) throw ParseError(row, "bad tcp_flags");
    if (pkt.key.proto != kProtoTcp) pkt.tcp_flags = 0;

    try {
        validate(pkt);
    } catch (const ValidationError& e) {
        throw ValidationError("row " + std::to_string(row) + ": " + e.what());
    }
    return pkt;
}

std::string format_packet_record(const PacketRecord& pkt) {
    std::array<char, 32> ts{};
    auto [end, ec] = std::to_chars(ts.data(), ts.data() + ts.size(), pkt.ts);
    std::string out(ts.data(), end);
    out += ',';
    out += format_ipv4(pkt.key.src_ip);
    out += ',';
    out += format_ipv4(pkt.key.dst_ip);
    out += ',' + std::to_string(pkt.key.src_port) + ',' + std::to_string(pkt.key.dst_port) + ',' +
           std::to_string(pkt.key.proto) + ',' + std::to_string(pkt.pkt_len) + ',' + std::to_string(pkt.tcp_flags);
    return out;
}

std::vector<PacketRecord> read_csv_trace(std::istream& in) {
    std::vector<PacketRecord> packets;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row == 1 && line.rfind("ts_sec", 0) == 0) {
            if (line != kTraceCsvHeader) throw ParseError(row, "unexpected header");
            continue;
        }
        packets.push_back(parse_packet_record(line, row));
        if (packets.size() > 1 && packets.back().ts < packets[packets.size() - 2].ts) {
            throw ValidationError("row " + std::to_string(row) + ": timestamps must be non-decreasing");
        }
    }
    return packets;
}

void write_csv_trace(std::ostream& out, std::span<const PacketRecord> packets) {
    out << kTraceCsvHeader << '\n';
    for (const auto& pkt : packets) out << format_packet_record(pkt) << '\n';
}

std::vector<PacketRecord> read_pcap(std::istream& in, PcapStats* stats) {
    const std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (buf.size() < 24) throw FormatError("truncated pcap global header");
    const auto layout = pcap_layout(load_le32(buf.data()));
    if (!layout) throw FormatError("not a classic pcap file");
    auto field = [&](std::size_t off) {
        const auto v = load_le32(buf.data() + off);
        return layout->swapped ? bswap32(v) : v;
    };
    const std::uint32_t link = field(20);
    if (link != kLinkEthernet) throw FormatError("unsupported pcap link type " + std::to_string(link));

    PcapStats local;
    std::vector<PacketRecord> out;
    std::optional<double> base;
    const double frac_scale = layout->nanos ? 1e-9 : 1e-6;
    std::size_t off = 24;
    while (off < buf.size()) {
        if (buf.size() - off < 16) throw FormatError("truncated pcap record header");
        const std::uint32_t sec = field(off);
        const std::uint32_t frac = field(off + 4);
        const std::uint32_t caplen = field(off + 8);
        const std::uint32_t origlen = field(off + 12);
        off += 16;
        if (buf.size() - off < caplen) throw FormatError("truncated pcap record data");
        ++local.frames;
        auto pkt = decode_frame(buf.data() + off, caplen, origlen);
        off += caplen;
        if (!pkt) {
            ++local.skipped;
            continue;
        }
        const double ts = static_cast<double>(sec) + static_cast<double>(frac) * frac_scale;
        if (!base) base = ts;
        pkt->ts = std::max(0.0, ts - *base);
        out.push_back(*pkt);
    }
    if (stats) *stats = local;
    return out;
}

TraceData read_trace(const TraceSource& source) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (source.location != "-") {
        file.open(source.location, std::ios::binary);
        if (!file) throw ConfigError("cannot open trace '" + source.location + "'");
        in = &file;
    }
    TraceData data;
    auto format = source.format;
    if (!format) {
        std::array<char, 4> magic{};
        in->read(magic.data(), magic.size());
        const auto got = in->gcount();
        in->clear();
        if (file.is_open()) {
            file.seekg(0);
        } else {
            for (auto i = got; i > 0; --i) in->putback(magic[static_cast<std::size_t>(i - 1)]);
        }
        std::uint32_t m = 0;
        if (got == 4) m = load_le32(reinterpret_cast<const unsigned char*>(magic.data()));
        format = pcap_layout(m) ? TraceFormat::pcap : TraceFormat::native_csv;
    }
    data.format = *format;
    if (*format == TraceFormat::pcap) {
        data.packets = read_pcap(*in, &data.pcap);
    } else {
        data.packets = read_csv_trace(*in);
    }
    return data;
}

std::size_t window_index(double ts, double estimation_rate) {
    return static_cast<std::size_t>(std::floor(ts * estimation_rate));
}

Batcher::Batcher(const RateConfig& config) : config_(config) {
    config_.validate();
    current_ = make_batch(0);
}

Batch Batcher::make_batch(std::size_t index) const {
    Batch b;
    b.index = index;
    if (config_.batch_mode == BatchMode::time) {
        b.window = Batch::Window{static_cast<double>(index) / config_.estimation_rate,
                                 static_cast<double>(index + 1) / config_.estimation_rate};
    } else {
        b.packets.reserve(config_.batch_size);
    }
    return b;
}

std::vector<Batch> Batcher::push(const PacketRecord& pkt) {
    if (started_ && pkt.ts < last_ts_) throw ValidationError("timestamps must be non-decreasing");
    started_ = true;
    last_ts_ = pkt.ts;

    std::vector<Batch> done;
    if (config_.batch_mode == BatchMode::count) {
        current_.packets.push_back(pkt);
        if (current_.size() == config_.batch_size) {
            const auto next = current_.index + 1;
            done.push_back(std::move(current_));
            current_ = make_batch(next);
        }
        return done;
    }
    const auto k = window_index(pkt.ts, config_.estimation_rate);
    while (current_.index < k) {
        const auto next = current_.index + 1;
        done.push_back(std::move(current_));
        current_ = make_batch(next);
    }
    current_.packets.push_back(pkt);
    return done;
}

std::optional<Batch> Batcher::finish() {
    if (current_.empty()) return std::nullopt;
    const auto next = current_.index + 1;
    Batch out = std::move(current_);
    current_ = make_batch(next);
    return out;
}

std::vector<Batch> batchify(std::span<const PacketRecord> stream, const RateConfig& config) {
    Batcher batcher(config);
    std::vector<Batch> out;
    for (const auto& pkt : stream) {
        for (auto& b : batcher.push(pkt)) out.push_back(std::move(b));
    }
    if (auto last = batcher.finish()) out.push_back(std::move(*last));
    return out;
}

}  // namespace cardest
