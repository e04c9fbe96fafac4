#include "cardest/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cardest/error.hpp"

namespace cardest {

namespace {

void require_pairs(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
    if (a.size() != b.size()) throw DomainError("paired series differ in length");
    if (a.size() < min_len) throw DomainError("need at least " + std::to_string(min_len) + " pairs");
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

MetricsReport error_metrics(std::span<const double> labels, std::span<const double> estimates) {
    require_pairs(labels, estimates, 1);
    MetricsReport m;
    m.n_pairs = labels.size();
    double sq = 0.0;
    double abs_sum = 0.0;
    double pct = 0.0;
    std::size_t pct_n = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double err = labels[i] - estimates[i];
        sq += err * err;
        abs_sum += std::abs(err);
        m.maxae = std::max(m.maxae, std::abs(err));
        if (labels[i] > 0.0) {
            pct += std::abs(err / labels[i]);
            ++pct_n;
        } else {
            ++m.n_excluded;
        }
    }
    const auto n = static_cast<double>(labels.size());
    m.rmse = std::sqrt(sq / n);
    m.mae = abs_sum / n;
    if (pct_n > 0) m.mape = 100.0 * pct / static_cast<double>(pct_n);
    return m;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    require_pairs(xs, ys, 2);
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateError("correlation undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    require_pairs(xs, ys, 2);
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    return pearson(rx, ry);
}

LineFit linfit(std::span<const double> xs, std::span<const double> ys) {
    require_pairs(xs, ys, 2);
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw DegenerateError("line fit needs at least two distinct x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

IntervalFit fit_interval(std::span<const double> xs, std::span<const double> ys, std::size_t first, std::size_t last) {
    require_pairs(xs, ys, 0);
    if (first > last || last >= xs.size()) throw DomainError("interval outside the series");
    if (last - first + 1 < 2) throw DegenerateError("interval must cover at least two batches");
    const auto sx = xs.subspan(first, last - first + 1);
    const auto sy = ys.subspan(first, last - first + 1);
    const auto line = linfit(sx, sy);
    IntervalFit out;
    out.first = first;
    out.last = last;
    out.slope = line.slope;
    out.intercept = line.intercept;
    out.pearson = pearson(sx, sy);
    return out;
}

}  // namespace cardest
