#include "cardest/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "cardest/ingest.hpp"

namespace cardest {

namespace {

constexpr StatEstimator kStatOrder[] = {StatEstimator::gee, StatEstimator::ae, StatEstimator::uj2a};
constexpr Algorithm kAlgOrder[] = {Algorithm::sgd, Algorithm::pa, Algorithm::rls};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<Sample> draw_samples(std::span<const Batch> batches, const SamplerConfig& cfg) {
    std::vector<Sample> out;
    out.reserve(batches.size());
    for (const auto& b : batches) out.push_back(sample_batch(b, cfg));
    return out;
}

std::vector<std::uint64_t> exact_labels(std::span<const Batch> batches) {
    std::vector<std::uint64_t> out;
    out.reserve(batches.size());
    for (const auto& b : batches) out.push_back(compute_label(b));
    return out;
}

void score(EstimatorRun& run, std::span<const std::uint64_t> truth, const std::vector<bool>& mask) {
    std::vector<double> labels;
    std::vector<double> estimates;
    for (std::size_t i = 0; i < run.batches.size(); ++i) {
        if (!mask[i] || run.failed[i]) continue;
        labels.push_back(static_cast<double>(truth[i]));
        estimates.push_back(run.batches[i].estimate);
    }
    if (!labels.empty()) run.metrics = error_metrics(labels, estimates);
    run.cost = Framework<>::summarize(run.batches);
}

EstimatorRun run_online(Algorithm alg, std::span<const Batch> batches, std::span<const Sample> samples,
                        const ExperimentConfig& cfg) {
    EstimatorRun run;
    run.id = EstimatorId{alg};
    FrameworkConfig fc{cfg.rates, SamplerConfig{cfg.rates.sampling_rate, cfg.seed, cfg.scheme}, cfg.features};
    Framework<AnyRegressor> fw(fc, AnyRegressor(alg, static_cast<Eigen::Index>(cfg.features.dimension()), cfg.hyper));
    run.batches.reserve(batches.size());
    bool broken = false;
    for (std::size_t i = 0; i < batches.size(); ++i) {
        if (!broken) {
            try {
                run.batches.push_back(fw.process_batch(batches[i], samples[i]));
                run.failed.push_back(false);
                continue;
            } catch (const DivergenceError& e) {
                run.diagnostics.push_back(e.what());
                broken = true;
            }
        }
        BatchResult r;
        r.index = batches[i].index;
        r.batch_packets = batches[i].size();
        r.sample_packets = samples[i].size();
        r.processed_packets = r.sample_packets;
        r.estimate = r.raw_estimate = std::numeric_limits<double>::quiet_NaN();
        run.batches.push_back(r);
        run.failed.push_back(true);
    }
    for (const auto& d : fw.diagnostics()) run.diagnostics.push_back(d);
    return run;
}

EstimatorRun run_baseline(StatEstimator id, std::span<const Batch> batches, std::span<const Sample> samples, double q) {
    EstimatorRun run;
    run.id = EstimatorId{id};
    run.batches.reserve(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        BatchResult r;
        r.index = batches[i].index;
        r.batch_packets = batches[i].size();
        r.sample_packets = samples[i].size();
        r.processed_packets = r.sample_packets;
        r.is_empty = batches[i].empty();
        bool failed = r.is_empty;
        if (!failed) {
            const auto hist = build_histogram(samples[i]);
            r.sample_flows = hist.distinct();
            try {
                const auto e = estimate(id, hist, q, batches[i].size());
                r.estimate = e.value;
                r.raw_estimate = e.raw;
                run.clamped += e.clamped ? 1 : 0;
                run.fallbacks += e.fell_back ? 1 : 0;
            } catch (const DegenerateError& e) {
                run.diagnostics.push_back("batch " + std::to_string(r.index) + ": " + e.what());
                failed = true;
            }
        }
        if (failed) r.estimate = r.raw_estimate = std::numeric_limits<double>::quiet_NaN();
        run.batches.push_back(r);
        run.failed.push_back(failed);
    }
    return run;
}

template <class F>
double seconds_per_call(std::size_t reps, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < reps; ++r) body(r);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return dt.count() / static_cast<double>(reps);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string EstimatorId::name() const {
    return std::visit([](auto id) { return to_string(id); }, which);
}

EstimatorId EstimatorId::parse(const std::string& name) {
    const auto n = lower(name);
    for (auto s : kStatOrder) {
        if (lower(to_string(s)) == n) return EstimatorId{s};
    }
    for (auto a : kAlgOrder) {
        if (lower(to_string(a)) == n) return EstimatorId{a};
    }
    throw ConfigError("unknown estimator '" + name + "'");
}

std::vector<EstimatorId> parse_estimators(const std::string& csv) {
    std::vector<EstimatorId> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        const auto id = EstimatorId::parse(item);
        if (std::find(out.begin(), out.end(), id) != out.end()) throw ConfigError("estimator '" + item + "' listed twice");
        out.push_back(id);
    }
    if (out.empty()) throw ConfigError("estimator list is empty");
    return out;
}

std::vector<EstimatorId> default_estimators() {
    std::vector<EstimatorId> out;
    for (auto s : kStatOrder) out.push_back(EstimatorId{s});
    for (auto a : kAlgOrder) out.push_back(EstimatorId{a});
    return out;
}

std::vector<bool> evaluation_mask(std::span<const Batch> batches, const ExperimentConfig& cfg) {
    std::vector<bool> mask(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        mask[i] = i >= cfg.eval_from && !batches[i].empty();
    }
    if (cfg.drop_partial && cfg.rates.batch_mode == BatchMode::count && !batches.empty() &&
        batches.back().size() < cfg.rates.batch_size) {
        mask.back() = false;
    }
    return mask;
}

CompareResult run_compare(std::span<const Batch> batches, const ExperimentConfig& cfg) {
    cfg.rates.validate();
    CompareResult out;
    out.effective_rate = cfg.effective_rate();
    out.baseline_rate = cfg.baseline_rate();
    out.truth = exact_labels(batches);
    const auto mask = evaluation_mask(batches, cfg);

    const bool any_online = std::any_of(cfg.estimators.begin(), cfg.estimators.end(), [](auto& e) { return e.online(); });
    const bool any_stat = std::any_of(cfg.estimators.begin(), cfg.estimators.end(), [](auto& e) { return !e.online(); });
    std::vector<Sample> ml_samples;
    std::vector<Sample> stat_samples;
    if (any_online) ml_samples = draw_samples(batches, SamplerConfig{cfg.rates.sampling_rate, cfg.seed, cfg.scheme});
    if (any_stat) stat_samples = draw_samples(batches, SamplerConfig{out.baseline_rate, cfg.seed, cfg.scheme});

    for (const auto& id : cfg.estimators) {
        auto run = id.online() ? run_online(std::get<Algorithm>(id.which), batches, ml_samples, cfg)
                               : run_baseline(std::get<StatEstimator>(id.which), batches, stat_samples, out.baseline_rate);
        score(run, out.truth, mask);
        out.runs.push_back(std::move(run));
    }
    return out;
}

std::vector<SweepCell> run_sweep(std::span<const PacketRecord> stream, const ExperimentConfig& base, const SweepPlan& plan) {
    if (plan.sampling_rates.empty() || plan.batch_sizes.empty()) throw ConfigError("sweep grid is empty");
    if (plan.repeats == 0) throw ConfigError("sweep needs at least one repeat");
    std::vector<double> training;
    for (double q : plan.sampling_rates) {
        try {
            training.push_back(training_rate_for(plan.effective_rate, q));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "sweep cell sampling_rate=" << q << ": " << e.what();
            throw ConfigError(msg.str());
        }
    }
    for (auto bs : plan.batch_sizes) {
        if (bs == 0) throw ConfigError("sweep batch size must be positive");
    }

    std::vector<SweepCell> cells;
    for (auto bs : plan.batch_sizes) {
        ExperimentConfig cfg = base;
        cfg.rates.batch_mode = BatchMode::count;
        cfg.rates.batch_size = bs;
        cfg.estimators = {EstimatorId{plan.algorithm}};
        const auto batches = batchify(stream, cfg.rates);
        const auto truth = exact_labels(batches);
        const auto mask = evaluation_mask(batches, cfg);
        for (std::size_t k = 0; k < plan.sampling_rates.size(); ++k) {
            SweepCell cell;
            cell.sampling_rate = plan.sampling_rates[k];
            cell.batch_size = bs;
            cell.training_rate = training[k];
            cfg.rates.sampling_rate = cell.sampling_rate;
            cfg.rates.training_rate = cell.training_rate;
            double total = 0.0;
            for (std::size_t r = 0; r < plan.repeats; ++r) {
                cfg.seed = base.seed + r;
                const auto samples = draw_samples(batches, SamplerConfig{cfg.rates.sampling_rate, cfg.seed, cfg.scheme});
                auto run = run_online(plan.algorithm, batches, samples, cfg);
                score(run, truth, mask);
                const double mape = run.metrics.mape.value_or(std::numeric_limits<double>::quiet_NaN());
                cell.repeat_mape.push_back(mape);
                total += mape;
            }
            cell.mape = total / static_cast<double>(plan.repeats);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<FeatureSetRow> run_feature_sets(std::span<const Batch> batches, const ExperimentConfig& base,
                                            std::span<const FeatureSet> sets) {
    ExperimentConfig cfg = base;
    cfg.estimators.clear();
    for (const auto& e : base.estimators) {
        if (e.online()) cfg.estimators.push_back(e);
    }
    if (cfg.estimators.empty()) {
        for (auto a : kAlgOrder) cfg.estimators.push_back(EstimatorId{a});
    }
    std::vector<FeatureSetRow> rows;
    for (const auto& set : sets) {
        cfg.features = set;
        const auto res = run_compare(batches, cfg);
        for (const auto& run : res.runs) rows.push_back({set.label(), run.id, run.metrics});
    }
    return rows;
}

std::vector<IntervalFit> interval_fits(std::span<const Batch> batches, const SamplerConfig& sampler,
                                       std::span<const std::pair<std::size_t, std::size_t>> ranges) {
    std::vector<double> f1;
    std::vector<double> card;
    for (const auto& b : batches) {
        f1.push_back(static_cast<double>(build_histogram(sample_batch(b, sampler)).f(1)));
        card.push_back(static_cast<double>(compute_label(b)));
    }
    std::vector<IntervalFit> out;
    for (const auto& [first, last] : ranges) out.push_back(fit_interval(f1, card, first, last));
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_ranges(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto sep = item.find_first_of("-:");
        try {
            if (sep == std::string::npos) {
                const auto v = std::stoull(item);
                out.emplace_back(v, v);
            } else {
                out.emplace_back(std::stoull(item.substr(0, sep)), std::stoull(item.substr(sep + 1)));
            }
        } catch (const std::exception&) {
            throw ConfigError("bad interval '" + item + "'");
        }
        if (out.back().first > out.back().second) throw ConfigError("interval '" + item + "' is reversed");
    }
    return out;
}

TimingTable time_components(std::span<const Batch> batches, std::span<const double> sampling_rates,
                            const TimingOptions& opts) {
    TimingTable table;
    const auto used = batches.subspan(0, std::min(batches.size(), opts.max_batches));
    if (used.empty()) return table;
    const auto dim = static_cast<Eigen::Index>(opts.features.dimension());
    std::vector<double> labels;
    for (const auto& b : used) labels.push_back(static_cast<double>(compute_label(b)));

    Hyperparameters<double> hp;
    hp.sgd.learning_rate = 1e-15;

    volatile double sink = 0.0;
    for (double q : sampling_rates) {
        TimingRow row;
        row.sampling_rate = q;
        const auto samples = draw_samples(used, SamplerConfig{q, opts.seed, SamplingScheme::bernoulli});
        std::vector<Eigen::VectorXd> xs;
        double total_n = 0.0;
        for (const auto& s : samples) {
            total_n += static_cast<double>(s.size());
            xs.push_back(extract_features(s, build_histogram(s), opts.features).values);
        }
        row.mean_sample_size = total_n / static_cast<double>(samples.size());

        std::array<std::vector<double>, 3> stat_t, pred_t, fit_t;
        for (std::size_t b = 0; b < used.size(); ++b) {
            const auto& s = samples[b];
            const auto big_n = used[b].size();
            for (std::size_t k = 0; k < 3; ++k) {
                auto body = [&](std::size_t) {
                    const auto hist = build_histogram(s);
                    try {
                        sink = sink + estimate(kStatOrder[k], hist, q, big_n).value;
                    } catch (const DegenerateError&) {
                    }
                };
                seconds_per_call(opts.warmup, body);
                stat_t[k].push_back(seconds_per_call(opts.stat_reps, body));
                table.raw.push_back({q, used[b].index, "stat/" + to_string(kStatOrder[k]), stat_t[k].back()});
            }
            for (std::size_t k = 0; k < 3; ++k) {
                AnyRegressor model(kAlgOrder[k], dim, hp);
                model.bootstrap(xs[0], labels[0]);
                pred_t[k].push_back(seconds_per_call(opts.predict_reps, [&](std::size_t) { sink = sink + model.predict(xs[b]); }));
                table.raw.push_back({q, used[b].index, "predict/" + to_string(kAlgOrder[k]), pred_t[k].back()});

                AnyRegressor trained = model;
                fit_t[k].push_back(seconds_per_call(opts.fit_reps, [&](std::size_t r) {
                    const auto j = (b + r) % xs.size();
                    trained.partial_fit(xs[j], labels[j]);
                }));
                table.raw.push_back({q, used[b].index, "fit/" + to_string(kAlgOrder[k]), fit_t[k].back()});
            }
        }
        for (std::size_t k = 0; k < 3; ++k) {
            row.stat[k] = median(stat_t[k]);
            row.predict[k] = median(pred_t[k]);
            row.fit[k] = median(fit_t[k]);
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void write_batch_results(std::ostream& out, std::span<const BatchResult> results) {
    out << "i,N,n,d,is_training,D,D_hat,processed_pkts\n";
    for (const auto& r : results) {
        out << r.index << ',' << r.batch_packets << ',' << r.sample_packets << ',' << r.sample_flows << ','
            << (r.is_training ? 1 : 0) << ',';
        if (r.label) out << *r.label;
        out << ',' << format_number(r.estimate) << ',' << r.processed_packets << '\n';
    }
}

void write_error_table(std::ostream& out, std::span<const EstimatorRun> runs, bool unfair_watermark) {
    if (unfair_watermark) out << "# UNFAIR: baselines sampled at the framework sampling rate, not its effective rate\n";
    out << "estimator,RMSE,MAE,MAPE,MAXAE\n";
    for (const auto& r : runs) {
        out << r.id.name() << ',' << format_number(r.metrics.rmse) << ',' << format_number(r.metrics.mae) << ','
            << (r.metrics.mape ? format_number(*r.metrics.mape) : std::string("nan")) << ','
            << format_number(r.metrics.maxae) << '\n';
    }
}

void write_sweep(std::ostream& out, std::span<const SweepCell> cells) {
    out << "sampling_rate,batch_size,training_rate,MAPE\n";
    for (const auto& c : cells) {
        out << format_number(c.sampling_rate) << ',' << c.batch_size << ',' << format_number(c.training_rate) << ','
            << format_number(c.mape) << '\n';
    }
}

void write_feature_sets(std::ostream& out, std::span<const FeatureSetRow> rows) {
    out << "feature_set,estimator,RMSE,MAE,MAPE,MAXAE\n";
    for (const auto& r : rows) {
        out << r.feature_set << ',' << r.id.name() << ',' << format_number(r.metrics.rmse) << ','
            << format_number(r.metrics.mae) << ','
            << (r.metrics.mape ? format_number(*r.metrics.mape) : std::string("nan")) << ','
            << format_number(r.metrics.maxae) << '\n';
    }
}

void write_interval_fits(std::ostream& out, std::span<const IntervalFit> fits) {
    out << "interval,slope,intercept,pearson\n";
    for (const auto& f : fits) {
        out << '"' << '(' << f.first << ", " << f.last << ')' << '"' << ',' << format_number(f.slope) << ','
            << format_number(f.intercept) << ',' << format_number(f.pearson) << '\n';
    }
}

void write_timing(std::ostream& out, const TimingTable& table, int which) {
    if (which == 0) {
        out << "sampling_rate,mean_sample_size,GEE,AE,UJ2A\n";
    } else {
        out << "sampling_rate,mean_sample_size,SGD,PA,RLS\n";
    }
    for (const auto& r : table.rows) {
        const auto& cols = which == 0 ? r.stat : which == 1 ? r.predict : r.fit;
        out << format_number(r.sampling_rate) << ',' << format_number(r.mean_sample_size);
        for (double c : cols) out << ',' << format_number(c);
        out << '\n';
    }
}

void write_timing_raw(std::ostream& out, const TimingTable& table) {
    out << "sampling_rate,batch_index,component,seconds\n";
    for (const auto& s : table.raw) {
        out << format_number(s.sampling_rate) << ',' << s.batch_index << ',' << s.component << ','
            << format_number(s.seconds) << '\n';
    }
}

}  // namespace cardest
