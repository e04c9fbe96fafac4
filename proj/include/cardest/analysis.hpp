#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cardest {

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;  ///< percent; empty when every label is zero
    double maxae = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_excluded = 0;  ///< zero-label pairs left out of MAPE
};

/// RMSE, MAE, MAPE (percent, over labels > 0) and MAXAE of paired estimates.
MetricsReport error_metrics(std::span<const double> labels, std::span<const double> estimates);

/// Product-moment correlation. Throws DegenerateError on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> xs, std::span<const double> ys);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept.
LineFit linfit(std::span<const double> xs, std::span<const double> ys);

struct IntervalFit {
    std::size_t first = 0;  ///< inclusive batch index range
    std::size_t last = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double pearson = 0.0;
};

/// Fits ys against xs restricted to positions [first, last].
IntervalFit fit_interval(std::span<const double> xs, std::span<const double> ys, std::size_t first, std::size_t last);

}  // namespace cardest
