#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/core.hpp"

namespace cardest {

inline constexpr std::string_view kTraceCsvHeader = "ts_sec,src_ip,dst_ip,src_port,dst_port,proto,pkt_len,tcp_flags";

enum class TraceFormat { native_csv, pcap };

/// A trace location. "-" means standard input. Without an explicit format the
/// first four bytes decide: a pcap magic selects pcap, anything else native CSV.
struct TraceSource {
    std::string location;
    std::optional<TraceFormat> format;
};

std::uint32_t parse_ipv4(std::string_view text);

/// Parses one native CSV row (no header). `row` is reported in errors.
PacketRecord parse_packet_record(std::string_view line, std::size_t row = 1);
std::string format_packet_record(const PacketRecord& pkt);

std::vector<PacketRecord> read_csv_trace(std::istream& in);
void write_csv_trace(std::ostream& out, std::span<const PacketRecord> packets);

struct PcapStats {
    std::size_t frames = 0;
    std::size_t skipped = 0;  ///< non-IPv4, non-TCP/UDP, fragments and short captures
};

/// Classic libpcap reader (either byte order, micro- or nanosecond magic),
/// Ethernet link type only. Timestamps are rebased to the first frame.
std::vector<PacketRecord> read_pcap(std::istream& in, PcapStats* stats = nullptr);

struct TraceData {
    std::vector<PacketRecord> packets;
    TraceFormat format = TraceFormat::native_csv;
    PcapStats pcap;
};

TraceData read_trace(const TraceSource& source);

/// Incremental batcher. Feed packets in stream order; completed batches are
/// returned as soon as they close. Time mode emits empty batches for idle
/// windows so the estimation cadence stays fixed.
class Batcher {
public:
    explicit Batcher(const RateConfig& config);

    std::vector<Batch> push(const PacketRecord& pkt);
    /// Flushes the final (possibly partial) batch. Returns nothing when no
    /// packet was ever pushed into the open batch.
    std::optional<Batch> finish();

    std::size_t next_index() const noexcept { return current_.index; }

private:
    Batch make_batch(std::size_t index) const;

    RateConfig config_;
    Batch current_;
    double last_ts_ = 0.0;
    bool started_ = false;
};

std::vector<Batch> batchify(std::span<const PacketRecord> stream, const RateConfig& config);

/// Time-mode window index of a timestamp: floor(ts * estimation_rate).
std::size_t window_index(double ts, double estimation_rate);

}  // namespace cardest
