#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cardest/core.hpp"
#include "cardest/features.hpp"
#include "cardest/online.hpp"
#include "cardest/sampling.hpp"

namespace cardest {

/// Exact number of distinct flows in the batch (hash-set count).
std::uint64_t compute_label(const Batch& batch);

/// Periodic schedule: true iff training_rate > 0 and counter is a multiple of
/// round(1 / training_rate). Counter 0 is therefore always a training batch.
bool is_training_batch(std::size_t counter, double training_rate);

struct FrameworkConfig {
    RateConfig rates;
    SamplerConfig sampler;
    FeatureSet features{Feature::f1};
};

struct BatchResult {
    std::size_t index = 0;
    std::uint64_t batch_packets = 0;   ///< N_i
    std::uint64_t sample_packets = 0;  ///< n_i
    std::uint64_t sample_flows = 0;    ///< d_i
    Eigen::VectorXd features;
    double estimate = 0.0;             ///< clamped at 0
    double raw_estimate = 0.0;
    std::optional<std::uint64_t> label;  ///< present iff is_training
    bool is_training = false;
    bool is_empty = false;             ///< time-mode window without packets
    std::uint64_t processed_packets = 0;
};

struct CostSummary {
    std::size_t batches = 0;
    std::size_t training_batches = 0;
    std::uint64_t total_packets = 0;
    std::uint64_t processed_packets = 0;

    double processed_fraction() const noexcept {
        return total_packets == 0 ? 0.0 : static_cast<double>(processed_packets) / static_cast<double>(total_packets);
    }
};

struct RunResult {
    std::vector<BatchResult> batches;
    CostSummary cost;
    std::vector<std::string> diagnostics;
};

/// Per-batch estimation pipeline: sample, extract features, predict, and on
/// scheduled batches label the full batch and train. Predictions on training
/// batches use the weights from before the update.
template <OnlineModel Model = AnyRegressor>
class Framework {
public:
    Framework(FrameworkConfig config, Model model, bool bootstrapped = false)
        : config_(std::move(config)), model_(std::move(model)), bootstrapped_(bootstrapped) {
        config_.rates.validate();
        config_.sampler.q = config_.rates.sampling_rate;
    }

    BatchResult process_batch(const Batch& batch) { return process_batch(batch, sample_batch(batch, config_.sampler)); }

    /// Same as above with a sample drawn by the caller, so several models can share one.
    BatchResult process_batch(const Batch& batch, const Sample& sample) {
        BatchResult r;
        r.index = batch.index;
        r.batch_packets = batch.size();
        r.sample_packets = sample.size();
        r.is_empty = batch.empty();

        FeatureVector x;
        if (r.is_empty) {
            x = zero_features(config_.features);
        } else {
            const auto hist = build_histogram(sample);
            r.sample_flows = hist.distinct();
            x = extract_features(sample, hist, config_.features);
        }
        r.features = x.values;
        r.raw_estimate = static_cast<double>(model_.predict(x.values));
        r.estimate = clamp_estimate(r.raw_estimate);

        const bool bootstrap_now = !bootstrapped_;
        const bool train = bootstrap_now || is_training_batch(counter_, config_.rates.training_rate);
        if (bootstrap_now && r.is_empty) {
            throw DegenerateError("cannot bootstrap on an empty first batch (batch " + std::to_string(batch.index) + ")");
        }
        if (train && !r.is_empty) {
            const auto label = compute_label(batch);
            try {
                if (bootstrap_now) {
                    const auto report = model_.bootstrap(x.values, static_cast<double>(label));
                    if (!report.converged) {
                        diagnostics_.push_back("bootstrap on batch " + std::to_string(batch.index) +
                                               " hit the iteration cap after " + std::to_string(report.iterations) +
                                               " steps");
                    }
                    bootstrapped_ = true;
                } else {
                    model_.partial_fit(x.values, static_cast<double>(label));
                }
            } catch (const DivergenceError& e) {
                throw DivergenceError(e.what(), batch.index);
            }
            r.label = label;
            r.is_training = true;
        }
        r.processed_packets = r.is_training ? r.batch_packets : r.sample_packets;
        ++counter_;
        return r;
    }

    RunResult run_stream(std::span<const Batch> batches) {
        RunResult out;
        out.batches.reserve(batches.size());
        for (const auto& b : batches) out.batches.push_back(process_batch(b));
        out.cost = summarize(out.batches);
        out.diagnostics = diagnostics_;
        return out;
    }

    static CostSummary summarize(std::span<const BatchResult> results) {
        CostSummary c;
        for (const auto& r : results) {
            ++c.batches;
            c.training_batches += r.is_training ? 1 : 0;
            c.total_packets += r.batch_packets;
            c.processed_packets += r.processed_packets;
        }
        return c;
    }

    const Model& model() const noexcept { return model_; }
    Model& model() noexcept { return model_; }
    std::size_t batch_counter() const noexcept { return counter_; }
    bool bootstrapped() const noexcept { return bootstrapped_; }
    const FrameworkConfig& config() const noexcept { return config_; }
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    FrameworkConfig config_;
    Model model_;
    bool bootstrapped_ = false;
    std::size_t counter_ = 0;
    std::vector<std::string> diagnostics_;
};

}  // namespace cardest
