#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "cardest/stat_estimators.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cardest;

using oracle::Counts;
using oracle::distinct;
using oracle::random_counts;
using oracle::sample_size;

namespace {

FrequencyHistogram hist(const Counts& c) { return FrequencyHistogram::from_counts(c); }

}  // namespace

TEST_CASE("GEE values") {
    CHECK(estimate_gee(hist({{1, 3}, {2, 2}}), 1.0).value == 5.0);
    CHECK(estimate_gee(hist({{1, 4}, {2, 1}}), 0.25).value == 9.0);
    CHECK(estimate_gee(hist({{2, 3}}), 0.01).value == 3.0);
    CHECK_THROWS_AS(estimate_gee(hist({{1, 1}}), 0.0), DomainError);
}

TEST_CASE("GEE clamps to the batch size") {
    const auto e = estimate_gee(hist({{1, 50}}), 0.01, 100);
    CHECK(e.raw == doctest::Approx(500.0));
    CHECK(e.value == 100.0);
    CHECK(e.clamped);
}

TEST_CASE("AE shortcuts") {
    std::mt19937_64 rng(2);
    const auto c = random_counts(rng);
    CHECK(estimate_ae(hist(c), 1.0, 100000).value == static_cast<double>(distinct(c)));
    const auto e = estimate_ae(hist({{3, 4}, {7, 2}}), 0.1, 1000);
    CHECK(e.value == 6.0);
    const auto f = estimate_ae(hist({{2, 5}, {4, 1}}), 0.1, 1000);
    CHECK(f.value == 6.0);
}

TEST_CASE("AE agrees with an independent root finder") {
    std::mt19937_64 rng(99);
    int solved = 0;
    for (int t = 0; t < 400; ++t) {
        auto c = random_counts(rng);
        c[1] += 1 + rng() % 40;
        const double q = 0.005 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
        const double d = static_cast<double>(distinct(c));
        const double big_n = std::ceil(static_cast<double>(sample_size(c)) / q) + 10;
        const auto e = estimate_ae(hist(c), q, static_cast<std::uint64_t>(big_n));
        const oracle::AeOracle ae(c);
        const long double f12 = ae.f1 + ae.f2;
        const auto m = ae.solve(f12, f12 + (big_n - d));
        if (!m) {
            CHECK(e.fell_back);
            continue;
        }
        ++solved;
        CHECK_FALSE(e.fell_back);
        const double expect = std::min(big_n, d + static_cast<double>(*m - f12));
        CHECK(std::abs(e.value - expect) <= 1e-6 * big_n);
        CHECK(std::abs(ae_residual(hist(c), static_cast<double>(*m - f12))) < 1e-6 * big_n);
    }
    CHECK(solved > 300);
}

TEST_CASE("UJ2A first-order value by hand") {
    // d=3, f1=2, n=4, q=0.5: uJ1 = 3 / (1 - 0.5 * 0.5) = 4 and the skew term vanishes
    const auto e = estimate_uj2a(hist({{1, 2}, {2, 1}}), 0.5, 4, 8);
    CHECK(e.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(estimate_uj2a(hist({{1, 2}, {3, 1}}), 1.0, 5, 5).value == 3.0);
    CHECK_THROWS_AS(estimate_uj2a(hist({}), 0.5, 0, 10), DegenerateError);
}

TEST_CASE("UJ2A matches an extended-precision evaluation") {
    std::mt19937_64 rng(1234);
    for (int t = 0; t < 500; ++t) {
        auto c = random_counts(rng, 80);
        c[1] += rng() % 30;
        const double q = 0.01 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
        const double big_n = std::ceil(static_cast<double>(sample_size(c)) / q) + static_cast<double>(rng() % 500);
        const auto e = estimate_uj2a(hist(c), q, sample_size(c), static_cast<std::uint64_t>(big_n));
        bool any_low = false;
        for (const auto& [j, f] : c) any_low = any_low || (f > 0 && j <= kUj2aStabilizationCutoff);
        if (!any_low) continue;
        const double d = static_cast<double>(distinct(c));
        const double expect = std::clamp(static_cast<double>(oracle::uj2a(c, q, big_n, kUj2aStabilizationCutoff)), d, big_n);
        CHECK(e.value == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("all estimators return d at q = 1") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 1000; ++t) {
        const auto c = random_counts(rng, 100);
        const auto h = hist(c);
        const auto d = static_cast<double>(distinct(c));
        for (auto id : {StatEstimator::gee, StatEstimator::ae, StatEstimator::uj2a}) {
            CHECK(estimate(id, h, 1.0, sample_size(c)).value == d);
        }
    }
}

TEST_CASE("estimates stay within [d, N]") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 1000; ++t) {
        const auto c = random_counts(rng, 100);
        const auto h = hist(c);
        const double q = 0.001 + 0.99 * static_cast<double>(rng() % 1000) / 1000.0;
        const auto big_n = sample_size(c) + rng() % 20000;
        for (auto id : {StatEstimator::gee, StatEstimator::ae, StatEstimator::uj2a}) {
            const auto e = estimate(id, h, q, big_n);
            CHECK(e.value >= static_cast<double>(distinct(c)));
            CHECK(e.value <= static_cast<double>(big_n));
            CHECK(e.id == id);
        }
    }
}

TEST_CASE("estimates grow with f1") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        auto c = random_counts(rng);
        c[2] += 1;
        const double q = 0.01 + 0.3 * static_cast<double>(rng() % 1000) / 1000.0;
        const std::uint64_t big_n = 10'000'000;
        double prev[3] = {0, 0, 0};
        for (std::uint64_t f1 = 0; f1 <= 60; f1 += 3) {
            c[1] = f1;
            const auto h = hist(c);
            int k = 0;
            for (auto id : {StatEstimator::gee, StatEstimator::ae, StatEstimator::uj2a}) {
                const double v = estimate(id, h, q, big_n).value;
                if (f1 > 0) {
                    if (id == StatEstimator::gee) {
                        CHECK(v > prev[k]);
                    } else {
                        CHECK(v >= prev[k] - 1e-6 * prev[k]);
                    }
                }
                prev[k++] = v;
            }
        }
    }
}
