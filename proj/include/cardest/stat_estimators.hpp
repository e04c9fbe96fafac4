#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cardest/features.hpp"

namespace cardest {

enum class StatEstimator { gee, ae, uj2a };

std::string to_string(StatEstimator id);

struct StatEstimate {
    StatEstimator id = StatEstimator::gee;
    double value = 0.0;       ///< reported estimate, clamped to [d, N]
    double raw = 0.0;         ///< estimate before clamping
    bool clamped = false;
    bool fell_back = false;   ///< AE only: root not bracketed, GEE value used
    int iterations = 0;       ///< AE only: bisection steps
};

/// Sample frequencies above this are removed before the second-order jackknife
/// and added back as seen classes (stabilized UJ2A).
inline constexpr std::size_t kUj2aStabilizationCutoff = 50;

/// AE bisection settings: absolute tolerance is kAeRelTolerance * N.
inline constexpr double kAeRelTolerance = 1e-9;
inline constexpr int kAeMaxIterations = 200;

/// GEE: sqrt(1/q) * f1 + sum_{j>=2} f^j. `batch_size`, when known, caps the estimate.
StatEstimate estimate_gee(const FrequencyHistogram& hist, double q, std::optional<std::uint64_t> batch_size = std::nullopt);

/// AE. The number of low-frequency classes m solves
///
///   m - f1 - f2 = f1 * (sum_{i>=3} e^{-i} f_i + m e^{-(f1+2 f2)/m})
///                    / (sum_{i>=3} i e^{-i} f_i + (f1+2 f2) e^{-(f1+2 f2)/m})
///
/// and the estimate is d + (m - f1 - f2). The hidden count h = m - f1 - f2 is
/// found by bisection on [0, N - d].
StatEstimate estimate_ae(const FrequencyHistogram& hist, double q, std::uint64_t batch_size);

/// Residual of the AE equation as a function of the hidden count h (zero at the root).
double ae_residual(const FrequencyHistogram& hist, double hidden);

/// Stabilized unsmoothed second-order jackknife:
///
///   uJ1   = d / (1 - (1-q) f1 / n)
///   g2(D) = max(0, D/n^2 * sum_j j(j-1) f_j + D/N - 1)
///   uJ2   = (d - f1 (1-q) ln(1-q) g2(uJ1) / q) / (1 - (1-q) f1 / n)
///
/// evaluated on the sample with classes of frequency > cutoff removed (n, d and
/// N reduced accordingly), then the removed classes are added back.
/// Throws DegenerateError for an empty sample with q < 1.
StatEstimate estimate_uj2a(const FrequencyHistogram& hist, double q, std::uint64_t sample_size, std::uint64_t batch_size,
                           std::size_t cutoff = kUj2aStabilizationCutoff);

/// Dispatches to one of the three estimators.
StatEstimate estimate(StatEstimator id, const FrequencyHistogram& hist, double q, std::uint64_t batch_size);

}  // namespace cardest
