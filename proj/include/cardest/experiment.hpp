#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cardest/analysis.hpp"
#include "cardest/framework.hpp"
#include "cardest/stat_estimators.hpp"

namespace cardest {

/// One entry of an --estimators list: a statistical baseline or an online learner.
struct EstimatorId {
    std::variant<StatEstimator, Algorithm> which;

    bool online() const noexcept { return std::holds_alternative<Algorithm>(which); }
    std::string name() const;
    static EstimatorId parse(const std::string& name);

    friend bool operator==(const EstimatorId&, const EstimatorId&) = default;
};

std::vector<EstimatorId> parse_estimators(const std::string& csv);
std::vector<EstimatorId> default_estimators();

struct ExperimentConfig {
    RateConfig rates;
    SamplingScheme scheme = SamplingScheme::bernoulli;
    std::uint64_t seed = 1;
    FeatureSet features{Feature::f1};
    std::vector<EstimatorId> estimators = default_estimators();
    Hyperparameters<double> hyper;
    /// Baselines sample at the framework's own rate instead of its effective rate.
    bool unfair = false;
    /// First batch index that enters the error metrics; batch 0 carries the bootstrap.
    std::size_t eval_from = 1;
    /// Leave a trailing short count-mode batch out of the metrics.
    bool drop_partial = false;

    double effective_rate() const { return effective_sampling_rate(rates.sampling_rate, rates.training_rate); }
    double baseline_rate() const { return unfair ? rates.sampling_rate : effective_rate(); }
};

struct EstimatorRun {
    EstimatorId id;
    std::vector<BatchResult> batches;
    std::vector<bool> failed;     ///< per batch: estimator could not produce a value
    MetricsReport metrics;
    CostSummary cost;
    std::size_t clamped = 0;      ///< baselines: estimates clamped to [d, N]
    std::size_t fallbacks = 0;    ///< AE: bracket failures answered by GEE
    std::vector<std::string> diagnostics;
};

struct CompareResult {
    std::vector<EstimatorRun> runs;
    std::vector<std::uint64_t> truth;  ///< exact D of every batch
    double effective_rate = 0.0;
    double baseline_rate = 0.0;
};

/// Feeds every estimator the same pre-drawn samples: the online learners get
/// the q-rate sample, the baselines the (nested) baseline-rate sample.
CompareResult run_compare(std::span<const Batch> batches, const ExperimentConfig& cfg);

/// Batches that count toward metrics under `cfg` (bootstrap, empty and dropped
/// partial batches excluded).
std::vector<bool> evaluation_mask(std::span<const Batch> batches, const ExperimentConfig& cfg);

struct SweepCell {
    double sampling_rate = 0.0;
    std::size_t batch_size = 0;
    double training_rate = 0.0;
    double mape = 0.0;                 ///< mean over repeats
    std::vector<double> repeat_mape;
};

struct SweepPlan {
    std::vector<double> sampling_rates;
    std::vector<std::size_t> batch_sizes;
    double effective_rate = 0.02;
    Algorithm algorithm = Algorithm::pa;
    std::size_t repeats = 1;           ///< sampling seeds seed, seed+1, ...
};

/// MAPE grid at a fixed effective rate. Every cell is validated before any runs.
std::vector<SweepCell> run_sweep(std::span<const PacketRecord> stream, const ExperimentConfig& base, const SweepPlan& plan);

struct FeatureSetRow {
    std::string feature_set;
    EstimatorId id;
    MetricsReport metrics;
};

std::vector<FeatureSetRow> run_feature_sets(std::span<const Batch> batches, const ExperimentConfig& base,
                                            std::span<const FeatureSet> sets);

/// Per-interval OLS of the exact batch cardinality on the q-rate sample's f1.
std::vector<IntervalFit> interval_fits(std::span<const Batch> batches, const SamplerConfig& sampler,
                                       std::span<const std::pair<std::size_t, std::size_t>> ranges);

/// Parses "0-112,113-163" style index ranges.
std::vector<std::pair<std::size_t, std::size_t>> parse_ranges(const std::string& text);

struct TimingOptions {
    FeatureSet features = FeatureSet::all();
    std::uint64_t seed = 1;
    std::size_t max_batches = 20;
    std::size_t stat_reps = 3;
    std::size_t predict_reps = 2000;
    std::size_t fit_reps = 200;
    std::size_t warmup = 1;
};

struct TimingRow {
    double sampling_rate = 0.0;
    double mean_sample_size = 0.0;
    std::array<double, 3> stat{};     ///< GEE, AE, UJ2A seconds (histogram build included)
    std::array<double, 3> predict{};  ///< SGD, PA, RLS seconds
    std::array<double, 3> fit{};      ///< SGD, PA, RLS seconds
};

struct TimingSample {
    double sampling_rate = 0.0;
    std::size_t batch_index = 0;
    std::string component;            ///< e.g. "stat/GEE", "predict/RLS"
    double seconds = 0.0;             ///< mean over repetitions for this batch
};

struct TimingTable {
    std::vector<TimingRow> rows;      ///< medians over batches of per-batch means
    std::vector<TimingSample> raw;
};

TimingTable time_components(std::span<const Batch> batches, std::span<const double> sampling_rates,
                            const TimingOptions& opts);

// --- output ---------------------------------------------------------------

/// Shortest round-trip decimal form; output files stay byte-stable.
std::string format_number(double v);

/// `i,N,n,d,is_training,D,D_hat,processed_pkts` with D empty on unlabeled batches.
void write_batch_results(std::ostream& out, std::span<const BatchResult> results);
void write_error_table(std::ostream& out, std::span<const EstimatorRun> runs, bool unfair_watermark = false);
void write_sweep(std::ostream& out, std::span<const SweepCell> cells);
void write_feature_sets(std::ostream& out, std::span<const FeatureSetRow> rows);
void write_interval_fits(std::ostream& out, std::span<const IntervalFit> fits);
/// `which` is 0 for statistical estimators, 1 for predict, 2 for partial_fit.
void write_timing(std::ostream& out, const TimingTable& table, int which);
void write_timing_raw(std::ostream& out, const TimingTable& table);

}  // namespace cardest
