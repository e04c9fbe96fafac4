#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "cardest/features.hpp"
#include "support.hpp"

using namespace cardest;

namespace {

Sample sample_of(const std::vector<std::uint32_t>& flows) {
    Sample s;
    s.packets = testutil::batch_of(flows).packets;
    return s;
}

// Sort the keys and count run lengths.
std::map<std::size_t, std::uint64_t> run_length_oracle(const std::vector<PacketRecord>& pkts) {
    std::vector<FlowKey> keys;
    for (const auto& p : pkts) keys.push_back(p.key);
    std::sort(keys.begin(), keys.end());
    std::map<std::size_t, std::uint64_t> out;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        ++out[j - i];
        i = j;
    }
    return out;
}

}  // namespace

TEST_CASE("histogram by hand") {
    const auto h = build_histogram(sample_of({1, 1, 2}));
    CHECK(h.f(1) == 1);
    CHECK(h.f(2) == 1);
    CHECK(h.f(3) == 0);
    CHECK(h.distinct() == 2);
    CHECK(h.sample_size() == 3);

    const auto e = build_histogram(Sample{});
    CHECK(e.distinct() == 0);
    CHECK(e.sample_size() == 0);
    CHECK(e.nonzero().empty());
}

TEST_CASE("histogram matches sort and run-length oracle") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 1000; ++t) {
        const auto b = testutil::random_batch(rng, rng() % 400, 1 + static_cast<std::uint32_t>(rng() % 150));
        const auto h = build_histogram(b.packets);
        const auto oracle = run_length_oracle(b.packets);
        CHECK(h.nonzero() == oracle);
        std::uint64_t d = 0;
        std::uint64_t n = 0;
        for (const auto& [j, c] : h.nonzero()) {
            d += c;
            n += j * c;
        }
        CHECK(d == h.distinct());
        CHECK(n == h.sample_size());
        CHECK(h == FrequencyHistogram::from_counts(oracle));
    }
}

TEST_CASE("feature vectors") {
    SUBCASE("average packet length") {
        Sample s;
        s.packets = {testutil::packet(1, 0, 100), testutil::packet(2, 0, 300)};
        const auto x = extract_features(s, build_histogram(s), FeatureSet{Feature::avg_pkt_len});
        CHECK(x.values.size() == 2);
        CHECK(x.values[0] == 200.0);
        CHECK(x.values[1] == 1.0);
    }
    SUBCASE("syn count") {
        Sample s;
        s.packets = {testutil::packet(1, 0, 60, true), testutil::packet(2, 0, 60, true), testutil::packet(3),
                     testutil::packet(4), testutil::packet(5, 0, 60, false, kProtoUdp)};
        const auto x = extract_features(s, build_histogram(s), FeatureSet{Feature::syn_count});
        CHECK(x.values[0] == 2.0);
        CHECK(x.values[1] == 1.0);
    }
    SUBCASE("frequency counts") {
        const auto s = sample_of({1, 1, 2});
        const auto x = extract_features(s, build_histogram(s), FeatureSet{Feature::f1, Feature::f2, Feature::f3});
        CHECK(x.values.size() == 4);
        CHECK(x.values[0] == 1.0);
        CHECK(x.values[1] == 1.0);
        CHECK(x.values[2] == 0.0);
        CHECK(x.values[3] == 1.0);
        CHECK(x.names == std::vector<std::string>{"f1", "f2", "f3", "bias"});
    }
    SUBCASE("empty sample") {
        const Sample s;
        const auto x = extract_features(s, build_histogram(s), FeatureSet::all());
        CHECK(x.values.size() == 6);
        CHECK(x.values.head(5).isZero());
        CHECK(x.values[5] == 1.0);
        CHECK(zero_features(FeatureSet::all()).values == x.values);
    }
}

TEST_CASE("feature set ordering and validation") {
    const auto fs = FeatureSet::parse("syn_count,f1,avg_pkt_len");
    CHECK(fs.names() == std::vector<std::string>{"f1", "avg_pkt_len", "syn_count", "bias"});
    CHECK(fs.dimension() == 4);
    CHECK(fs.label() == "f1+avg_pkt_len+syn_count");
    CHECK(FeatureSet::all().dimension() == 6);
    CHECK_THROWS_AS(FeatureSet::parse("f1,f9"), ConfigError);
    CHECK_THROWS_AS(FeatureSet::parse("f1,f1"), ConfigError);
    CHECK_THROWS_AS(FeatureSet::parse(""), ConfigError);
}

TEST_CASE("average length lies within the sample range") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 200; ++t) {
        Sample s;
        std::uint32_t lo = 100000;
        std::uint32_t hi = 0;
        const auto n = 1 + rng() % 100;
        for (std::size_t i = 0; i < n; ++i) {
            const auto len = 40 + static_cast<std::uint32_t>(rng() % 1461);
            lo = std::min(lo, len);
            hi = std::max(hi, len);
            s.packets.push_back(testutil::packet(static_cast<std::uint32_t>(rng() % 10), 0, len));
        }
        const auto x = extract_features(s, build_histogram(s), FeatureSet::all());
        CHECK(x.values[3] >= lo);
        CHECK(x.values[3] <= hi);
        const auto again = extract_features(s, build_histogram(s), FeatureSet::all());
        CHECK(again.values == x.values);
    }
}
