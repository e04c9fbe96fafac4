#include "cardest/stat_estimators.hpp"

#include <algorithm>
#include <cmath>

namespace cardest {

namespace {

void check_rate(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("sampling rate must lie in (0, 1]");
}

StatEstimate finish(StatEstimator id, double raw, double lo, std::optional<double> hi) {
    StatEstimate e;
    e.id = id;
    e.raw = raw;
    double v = std::max(raw, lo);
    if (hi) v = std::min(v, std::max(*hi, lo));
    e.value = v;
    e.clamped = v != raw;
    return e;
}

}  // namespace

std::string to_string(StatEstimator id) {
    switch (id) {
        case StatEstimator::gee: return "GEE";
        case StatEstimator::ae: return "AE";
        case StatEstimator::uj2a: return "UJ2A";
    }
    return "?";
}

StatEstimate estimate_gee(const FrequencyHistogram& hist, double q, std::optional<std::uint64_t> batch_size) {
    check_rate(q);
    const double d = static_cast<double>(hist.distinct());
    const double f1 = static_cast<double>(hist.f(1));
    const double raw = std::sqrt(1.0 / q) * f1 + (d - f1);
    std::optional<double> hi;
    if (batch_size) hi = static_cast<double>(*batch_size);
    return finish(StatEstimator::gee, raw, d, hi);
}

double ae_residual(const FrequencyHistogram& hist, double hidden) {
    const double f1 = static_cast<double>(hist.f(1));
    const double f2 = static_cast<double>(hist.f(2));
    const double low_mass = f1 + 2.0 * f2;
    double high_unseen = 0.0;
    double high_single = 0.0;
    for (std::size_t i = 3; i <= hist.max_multiplicity(); ++i) {
        const double fi = static_cast<double>(hist.f(i));
        if (fi == 0.0) continue;
        const double e = std::exp(-static_cast<double>(i));
        high_unseen += e * fi;
        high_single += static_cast<double>(i) * e * fi;
    }
    const double m = f1 + f2 + hidden;
    const double decay = std::exp(-low_mass / m);
    const double num = high_unseen + m * decay;
    const double den = high_single + low_mass * decay;
    return hidden - f1 * num / den;
}

StatEstimate estimate_ae(const FrequencyHistogram& hist, double q, std::uint64_t batch_size) {
    check_rate(q);
    const double d = static_cast<double>(hist.distinct());
    const double big_n = static_cast<double>(batch_size);
    if (q == 1.0 || hist.f(1) == 0) {
        // Nothing hidden.
        return finish(StatEstimator::ae, d, d, big_n);
    }
    const double upper = std::max(0.0, big_n - d);
    const double tol = kAeRelTolerance * std::max(big_n, 1.0);

    double lo = 0.0;
    double hi = upper;
    double g_lo = ae_residual(hist, lo);
    const double g_hi = ae_residual(hist, hi);
    if (!(g_lo <= 0.0 && g_hi >= 0.0) || !std::isfinite(g_lo) || !std::isfinite(g_hi)) {
        auto e = estimate_gee(hist, q, batch_size);
        e.id = StatEstimator::ae;
        e.fell_back = true;
        return e;
    }
    int it = 0;
    while (hi - lo > tol && it < kAeMaxIterations) {
        const double mid = 0.5 * (lo + hi);
        const double g = ae_residual(hist, mid);
        if ((g <= 0.0) == (g_lo <= 0.0)) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
        ++it;
    }
    auto e = finish(StatEstimator::ae, d + 0.5 * (lo + hi), d, big_n);
    e.iterations = it;
    return e;
}

StatEstimate estimate_uj2a(const FrequencyHistogram& hist, double q, std::uint64_t sample_size, std::uint64_t batch_size,
                           std::size_t cutoff) {
    check_rate(q);
    const double d = static_cast<double>(hist.distinct());
    const double big_n = static_cast<double>(batch_size);
    if (q == 1.0) return finish(StatEstimator::uj2a, d, d, big_n);
    if (sample_size == 0) throw DegenerateError("UJ2A undefined on an empty sample");

    double removed_classes = 0.0;
    double removed_packets = 0.0;
    double sum_jj1 = 0.0;
    for (std::size_t j = 1; j <= hist.max_multiplicity(); ++j) {
        const double fj = static_cast<double>(hist.f(j));
        if (fj == 0.0) continue;
        const double jd = static_cast<double>(j);
        if (j > cutoff) {
            removed_classes += fj;
            removed_packets += jd * fj;
        } else {
            sum_jj1 += jd * (jd - 1.0) * fj;
        }
    }
    const double n = static_cast<double>(sample_size) - removed_packets;
    const double d_low = d - removed_classes;
    if (n <= 0.0) return finish(StatEstimator::uj2a, removed_classes, d, big_n);
    const double pop = big_n - removed_packets / q;

    const double f1 = static_cast<double>(hist.f(1));
    const double denom = 1.0 - (1.0 - q) * f1 / n;
    if (!(denom > 0.0)) throw DegenerateError("UJ2A jackknife denominator is not positive");

    const double uj1 = d_low / denom;
    double gamma2 = uj1 / (n * n) * sum_jj1 - 1.0;
    if (pop > 0.0) gamma2 += uj1 / pop;
    gamma2 = std::max(0.0, gamma2);
    const double uj2 = (d_low - f1 * (1.0 - q) * std::log(1.0 - q) * gamma2 / q) / denom;
    return finish(StatEstimator::uj2a, uj2 + removed_classes, d, big_n);
}

StatEstimate estimate(StatEstimator id, const FrequencyHistogram& hist, double q, std::uint64_t batch_size) {
    switch (id) {
        case StatEstimator::gee: return estimate_gee(hist, q, batch_size);
        case StatEstimator::ae: return estimate_ae(hist, q, batch_size);
        case StatEstimator::uj2a: return estimate_uj2a(hist, q, hist.sample_size(), batch_size);
    }
    throw DomainError("unknown estimator");
}

}  // namespace cardest
