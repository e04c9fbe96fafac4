// cardest: command-line front end for the estimation framework and its experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cardest/experiment.hpp"
#include "cardest/ingest.hpp"
#include "cardest/kvconfig.hpp"
#include "cardest/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cardest;

namespace {

constexpr const char* kVersion = "1.0.0";

// Raw option values. Unset optionals fall back to the config file, then to defaults.
struct Options {
    std::optional<std::string> config;
    std::optional<std::string> trace;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> estimators;
    std::optional<std::string> features;
    std::optional<std::string> batch_mode;
    std::optional<std::size_t> batch_size;
    std::optional<double> estimation_rate;
    std::optional<double> sampling_rate;
    std::optional<double> training_rate;
    std::optional<double> effective_rate;
    std::optional<std::string> scheme;
    std::optional<std::size_t> eval_from;
    bool unfair = false;
    bool drop_partial = false;
    std::optional<double> sgd_learning_rate;
    std::optional<double> pa_epsilon;
    std::optional<double> pa_c;
    std::optional<double> rls_mu;
    std::optional<double> rls_delta;

    // gen
    std::optional<std::string> spec;
    // sweep
    std::optional<std::string> sampling_rates;
    std::optional<std::string> batch_sizes;
    std::optional<std::size_t> repeats;
    std::optional<std::string> algorithm;
    // features
    std::optional<std::string> feature_sets;
    std::optional<std::string> intervals;
    // bench
    std::optional<std::string> bench_rates;
    std::optional<std::size_t> max_batches;
};

const std::vector<std::string> kConfigKeys = {
    "trace", "preset", "seed", "out", "estimators", "features", "batch_mode", "batch_size", "estimation_rate",
    "sampling_rate", "training_rate", "effective_rate", "scheme", "eval_from", "unfair", "drop_partial",
    "sgd.learning_rate", "pa.epsilon", "pa.c", "rls.mu", "rls.delta", "spec", "sampling_rates", "batch_sizes",
    "repeats", "algorithm", "feature_sets", "intervals", "bench_rates", "max_batches"};

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
void fill(std::optional<T>& slot, std::optional<T> value) {
    if (!slot && value) slot = value;
}

void fill_from_config(Options& o, const KeyValueDoc& doc) {
    doc.require_known(kConfigKeys);
    auto str = [&](const char* k) { return doc.get_string(k); };
    auto num = [&](const char* k) { return doc.get_double(k); };
    auto count = [&](const char* k) -> std::optional<std::size_t> {
        auto v = doc.get_int(k);
        if (!v) return std::nullopt;
        if (*v < 0) throw ConfigError(std::string("config key '") + k + "' must be non-negative");
        return static_cast<std::size_t>(*v);
    };
    auto list = [&](const char* k, char sep) -> std::optional<std::string> {
        if (!doc.has(k)) return std::nullopt;
        if (auto l = doc.get_list(k)) return join(*l, sep);
        return doc.get_string(k);
    };
    fill(o.trace, str("trace"));
    fill(o.preset, str("preset"));
    if (auto s = doc.get_int("seed")) {
        if (*s < 0) throw ConfigError("config key 'seed' must be non-negative");
        fill(o.seed, std::optional<std::uint64_t>(static_cast<std::uint64_t>(*s)));
    }
    fill(o.out, str("out"));
    fill(o.estimators, list("estimators", ','));
    fill(o.features, list("features", ','));
    fill(o.batch_mode, str("batch_mode"));
    fill(o.batch_size, count("batch_size"));
    fill(o.estimation_rate, num("estimation_rate"));
    fill(o.sampling_rate, num("sampling_rate"));
    fill(o.training_rate, num("training_rate"));
    fill(o.effective_rate, num("effective_rate"));
    fill(o.scheme, str("scheme"));
    fill(o.eval_from, count("eval_from"));
    if (auto b = doc.get_bool("unfair")) o.unfair = o.unfair || *b;
    if (auto b = doc.get_bool("drop_partial")) o.drop_partial = o.drop_partial || *b;
    fill(o.sgd_learning_rate, num("sgd.learning_rate"));
    fill(o.pa_epsilon, num("pa.epsilon"));
    fill(o.pa_c, num("pa.c"));
    fill(o.rls_mu, num("rls.mu"));
    fill(o.rls_delta, num("rls.delta"));
    fill(o.spec, str("spec"));
    fill(o.sampling_rates, list("sampling_rates", ','));
    fill(o.batch_sizes, list("batch_sizes", ','));
    fill(o.repeats, count("repeats"));
    fill(o.algorithm, str("algorithm"));
    fill(o.feature_sets, list("feature_sets", ';'));
    fill(o.intervals, list("intervals", ','));
    fill(o.bench_rates, list("bench_rates", ','));
    fill(o.max_batches, count("max_batches"));
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
    std::vector<double> out;
    for (const auto& item : split(csv, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad ") + what + " value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& csv, const char* what) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(csv, what)) {
        if (v <= 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ConfigError(std::string(what) + " entries must be positive integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

struct Resolved {
    ExperimentConfig exp;
    std::string out = "results";
    std::string trace_label;
};

Resolved resolve(const Options& o) {
    Resolved r;
    auto& e = r.exp;
    e.seed = o.seed.value_or(1);
    if (o.batch_mode) e.rates.batch_mode = parse_batch_mode(*o.batch_mode);
    if (o.batch_size) e.rates.batch_size = *o.batch_size;
    if (o.estimation_rate) e.rates.estimation_rate = *o.estimation_rate;
    if (o.sampling_rate) e.rates.sampling_rate = *o.sampling_rate;
    if (o.training_rate) e.rates.training_rate = *o.training_rate;
    if (o.effective_rate) {
        const double tr = training_rate_for(*o.effective_rate, e.rates.sampling_rate);
        if (o.training_rate && std::abs(tr - *o.training_rate) > 1e-12) {
            throw ConfigError("--training-rate disagrees with --effective-rate for this --sampling-rate");
        }
        e.rates.training_rate = tr;
    }
    e.rates.validate();
    if (o.scheme) e.scheme = parse_sampling_scheme(*o.scheme);
    if (o.features) e.features = FeatureSet::parse(*o.features);
    if (o.estimators) e.estimators = parse_estimators(*o.estimators);
    if (o.eval_from) e.eval_from = *o.eval_from;
    e.unfair = o.unfair;
    e.drop_partial = o.drop_partial;
    if (o.sgd_learning_rate) e.hyper.sgd.learning_rate = *o.sgd_learning_rate;
    if (o.pa_epsilon) e.hyper.pa.epsilon = *o.pa_epsilon;
    if (o.pa_c) e.hyper.pa.c = *o.pa_c;
    if (o.rls_mu) e.hyper.rls.mu = *o.rls_mu;
    if (o.rls_delta) e.hyper.rls.delta = *o.rls_delta;
    // reject bad hyperparameters before any trace is read
    for (auto a : {Algorithm::sgd, Algorithm::pa, Algorithm::rls}) {
        try {
            AnyRegressor probe(a, 2, e.hyper);
        } catch (const DomainError& err) {
            throw ConfigError(err.what());
        }
    }
    if (o.out) r.out = *o.out;
    return r;
}

std::vector<PacketRecord> load_stream(const Options& o, const Resolved& r, json& meta) {
    if (o.trace && o.preset) throw ConfigError("give either --trace or --preset, not both");
    if (o.preset) {
        const auto spec = synth_preset(*o.preset, r.exp.seed);
        meta["trace"] = {{"preset", *o.preset}, {"seed", r.exp.seed}};
        return generate_trace(spec).packets;
    }
    if (!o.trace) throw ConfigError("no trace given (use --trace or --preset)");
    auto data = read_trace(TraceSource{*o.trace, std::nullopt});
    meta["trace"] = {{"location", *o.trace},
                     {"format", data.format == TraceFormat::pcap ? "pcap" : "csv"},
                     {"packets", data.packets.size()}};
    if (data.format == TraceFormat::pcap) {
        meta["trace"]["pcap_frames"] = data.pcap.frames;
        meta["trace"]["pcap_skipped"] = data.pcap.skipped;
    }
    return std::move(data.packets);
}

json config_json(const ExperimentConfig& e) {
    json names = json::array();
    for (const auto& id : e.estimators) names.push_back(id.name());
    return {
        {"seed", e.seed},
        {"batch_mode", to_string(e.rates.batch_mode)},
        {"batch_size", e.rates.batch_size},
        {"estimation_rate", e.rates.estimation_rate},
        {"sampling_rate", e.rates.sampling_rate},
        {"training_rate", e.rates.training_rate},
        {"effective_rate", e.effective_rate()},
        {"baseline_rate", e.baseline_rate()},
        {"scheme", to_string(e.scheme)},
        {"features", e.features.names()},
        {"estimators", names},
        {"unfair", e.unfair},
        {"eval_from", e.eval_from},
        {"drop_partial", e.drop_partial},
        {"hyperparameters",
         {{"sgd.learning_rate", e.hyper.sgd.learning_rate},
          {"sgd.bootstrap_tolerance", e.hyper.sgd.bootstrap_tolerance},
          {"sgd.bootstrap_max_iterations", e.hyper.sgd.bootstrap_max_iterations},
          {"pa.epsilon", e.hyper.pa.epsilon},
          {"pa.c", e.hyper.pa.c},
          {"rls.mu", e.hyper.rls.mu},
          {"rls.delta", e.hyper.rls.delta}}},
        {"estimator_details",
         {{"gee", "sqrt(1/q)*f1 + sum_{j>=2} f_j, clamped to [d, N]"},
          {"ae", "bisection on the hidden-class equation, rel. tol " + format_number(kAeRelTolerance) + ", " +
                     std::to_string(kAeMaxIterations) + " iterations, GEE fallback"},
          {"uj2a", "stabilized second-order jackknife, cutoff " + std::to_string(kUj2aStabilizationCutoff)}}},
    };
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    return f;
}

void write_metadata(const fs::path& dir, const json& meta) {
    auto f = open_out(dir / "metadata.json");
    f << meta.dump(2) << '\n';
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

json run_summary(const EstimatorRun& run) {
    std::size_t failed = 0;
    for (bool f : run.failed) failed += f ? 1 : 0;
    json j = {{"estimator", run.id.name()},
              {"failed_batches", failed},
              {"clamped", run.clamped},
              {"fallbacks", run.fallbacks},
              {"metric_pairs", run.metrics.n_pairs},
              {"metric_excluded", run.metrics.n_excluded},
              {"processed_packets", run.cost.processed_packets},
              {"total_packets", run.cost.total_packets},
              {"processed_fraction", run.cost.processed_fraction()},
              {"training_batches", run.cost.training_batches},
              {"rmse", run.metrics.rmse},
              {"mae", run.metrics.mae},
              {"mape", run.metrics.mape ? json(*run.metrics.mape) : json(nullptr)},
              {"maxae", run.metrics.maxae}};
    j["diagnostics"] = run.diagnostics;
    return j;
}

int cmd_gen(const Options& o) {
    const auto out = o.out.value_or("results");
    SynthSpec spec;
    json meta = {{"command", "gen"}, {"version", kVersion}};
    if (o.spec && o.preset) throw ConfigError("give either --spec or --preset, not both");
    if (o.spec) {
        spec = load_synth_spec(*o.spec);
        if (o.seed) spec.seed = *o.seed;
        meta["spec"] = *o.spec;
    } else {
        spec = synth_preset(o.preset.value_or("caida-like"), o.seed.value_or(1));
        meta["preset"] = o.preset.value_or("caida-like");
    }
    if (o.batch_size) spec.batch_size = *o.batch_size;
    spec.validate();
    const auto trace = generate_trace(spec);
    const auto dir = prepare_out(out);
    {
        auto f = open_out(dir / "trace.csv");
        write_csv_trace(f, trace.packets);
    }
    {
        auto f = open_out(dir / "sidecar.csv");
        write_sidecar(f, trace.sidecar);
    }
    {
        auto f = open_out(dir / "spec.toml");
        f << format_synth_spec(spec);
    }
    meta["seed"] = spec.seed;
    meta["batch_size"] = spec.batch_size;
    meta["packets"] = trace.packets.size();
    meta["batches"] = trace.sidecar.size();
    meta["phase_first_packet"] = trace.phase_first_packet;
    write_metadata(dir, meta);
    std::cout << "wrote " << trace.packets.size() << " packets to " << (dir / "trace.csv").string() << '\n';
    return 0;
}

int cmd_compare(const Options& o, bool framework_only) {
    auto r = resolve(o);
    if (framework_only) {
        std::vector<EstimatorId> online;
        for (const auto& id : r.exp.estimators) {
            if (id.online()) online.push_back(id);
        }
        if (online.empty()) {
            if (o.estimators) throw ConfigError("run needs at least one online estimator (sgd, pa, rls)");
            online = {EstimatorId{Algorithm::sgd}, EstimatorId{Algorithm::pa}, EstimatorId{Algorithm::rls}};
        }
        r.exp.estimators = online;
    }
    json meta = {{"command", framework_only ? "run" : "compare"}, {"version", kVersion}};
    const auto stream = load_stream(o, r, meta);
    const auto batches = batchify(stream, r.exp.rates);
    const auto res = run_compare(batches, r.exp);

    const auto dir = prepare_out(r.out);
    meta["config"] = config_json(r.exp);
    meta["batches"] = batches.size();
    json runs = json::array();
    for (const auto& run : res.runs) {
        auto f = open_out(dir / ("batches_" + run.id.name() + ".csv"));
        write_batch_results(f, run.batches);
        runs.push_back(run_summary(run));
    }
    {
        auto f = open_out(dir / "errors.csv");
        write_error_table(f, res.runs, r.exp.unfair);
    }
    meta["runs"] = runs;
    write_metadata(dir, meta);
    write_error_table(std::cout, res.runs, r.exp.unfair);
    return 0;
}

int cmd_sweep(const Options& o) {
    auto opts = o;
    // the sweep derives training rates itself
    const double target = opts.effective_rate.value_or(0.02);
    opts.effective_rate.reset();
    opts.training_rate.reset();
    auto r = resolve(opts);
    SweepPlan plan;
    plan.effective_rate = target;
    plan.sampling_rates = parse_doubles(o.sampling_rates.value_or("0.005,0.01,0.015"), "sampling rate");
    plan.batch_sizes = o.batch_sizes ? parse_sizes(*o.batch_sizes, "batch size") : std::vector<std::size_t>{r.exp.rates.batch_size};
    plan.repeats = o.repeats.value_or(1);
    if (o.algorithm) plan.algorithm = parse_algorithm(*o.algorithm);
    if (r.exp.rates.batch_mode != BatchMode::count) throw ConfigError("sweep works on count-mode batches");
    for (double q : plan.sampling_rates) {
        try {
            training_rate_for(plan.effective_rate, q);
        } catch (const Error& e) {
            throw ConfigError("sweep cell sampling_rate=" + format_number(q) + ": " + e.what());
        }
    }

    json meta = {{"command", "sweep"}, {"version", kVersion}};
    const auto stream = load_stream(o, r, meta);
    const auto cells = run_sweep(stream, r.exp, plan);

    const auto dir = prepare_out(r.out);
    {
        auto f = open_out(dir / "sweep.csv");
        write_sweep(f, cells);
    }
    meta["config"] = config_json(r.exp);
    meta["sweep"] = {{"effective_rate", plan.effective_rate},
                     {"sampling_rates", plan.sampling_rates},
                     {"batch_sizes", plan.batch_sizes},
                     {"algorithm", to_string(plan.algorithm)},
                     {"repeats", plan.repeats}};
    json reps = json::array();
    for (const auto& c : cells) reps.push_back(c.repeat_mape);
    meta["repeat_mape"] = reps;
    write_metadata(dir, meta);
    write_sweep(std::cout, cells);
    return 0;
}

int cmd_features(const Options& o) {
    auto r = resolve(o);
    std::vector<FeatureSet> sets;
    for (const auto& s : split(o.feature_sets.value_or("f1;f1,f2,f3"), ';')) {
        std::string csv = s;
        std::replace(csv.begin(), csv.end(), '+', ',');
        sets.push_back(FeatureSet::parse(csv));
    }
    if (sets.empty()) throw ConfigError("feature set list is empty");
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    if (o.intervals) ranges = parse_ranges(*o.intervals);

    json meta = {{"command", "features"}, {"version", kVersion}};
    const auto stream = load_stream(o, r, meta);
    const auto batches = batchify(stream, r.exp.rates);
    for (const auto& [first, last] : ranges) {
        if (last >= batches.size()) {
            throw ConfigError("interval (" + std::to_string(first) + ", " + std::to_string(last) + ") exceeds the " +
                              std::to_string(batches.size()) + " batches of the trace");
        }
    }
    const auto rows = run_feature_sets(batches, r.exp, sets);
    const auto fits = interval_fits(batches, SamplerConfig{r.exp.rates.sampling_rate, r.exp.seed, r.exp.scheme}, ranges);

    const auto dir = prepare_out(r.out);
    {
        auto f = open_out(dir / "features.csv");
        write_feature_sets(f, rows);
    }
    if (!ranges.empty()) {
        auto f = open_out(dir / "intervals.csv");
        write_interval_fits(f, fits);
    }
    meta["config"] = config_json(r.exp);
    json labels = json::array();
    for (const auto& s : sets) labels.push_back(s.label());
    meta["feature_sets"] = labels;
    meta["batches"] = batches.size();
    write_metadata(dir, meta);
    write_feature_sets(std::cout, rows);
    if (!ranges.empty()) write_interval_fits(std::cout, fits);
    return 0;
}

int cmd_bench(const Options& o) {
    auto r = resolve(o);
    const auto rates = parse_doubles(o.bench_rates.value_or("0.1,0.2,0.3,0.4,0.5"), "bench rate");
    TimingOptions topt;
    topt.seed = r.exp.seed;
    if (o.features) topt.features = r.exp.features;
    if (o.max_batches) topt.max_batches = *o.max_batches;

    json meta = {{"command", "bench"}, {"version", kVersion}};
    const auto stream = load_stream(o, r, meta);
    const auto batches = batchify(stream, r.exp.rates);
    const auto table = time_components(batches, rates, topt);

    const auto dir = prepare_out(r.out);
    const char* names[] = {"timing_stat.csv", "timing_predict.csv", "timing_fit.csv"};
    for (int k = 0; k < 3; ++k) {
        auto f = open_out(dir / names[k]);
        write_timing(f, table, k);
    }
    {
        auto f = open_out(dir / "timing_raw.csv");
        write_timing_raw(f, table);
    }
    meta["config"] = config_json(r.exp);
    meta["bench"] = {{"sampling_rates", rates},
                     {"features", topt.features.names()},
                     {"max_batches", topt.max_batches},
                     {"stat_reps", topt.stat_reps},
                     {"predict_reps", topt.predict_reps},
                     {"fit_reps", topt.fit_reps},
                     {"warmup", topt.warmup}};
    write_metadata(dir, meta);
    for (int k = 0; k < 3; ++k) write_timing(std::cout, table, k);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling-based adaptive cardinality estimation for packet streams"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Options o;
    app.add_option("--config", o.config, "TOML-style config file; command-line flags take precedence");
    app.add_option("--trace", o.trace, "Trace file (native CSV or pcap, '-' for stdin)");
    app.add_option("--preset", o.preset, "Synthesize the trace from a named preset instead of reading one");
    app.add_option("--seed", o.seed, "Sampling and generation seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--estimators", o.estimators, "Comma list from gee,ae,uj2a,sgd,pa,rls");
    app.add_option("--features", o.features, "Comma list from f1,f2,f3,avg_pkt_len,syn_count");
    app.add_option("--batch-mode", o.batch_mode, "count or time");
    app.add_option("--batch-size", o.batch_size, "Packets per batch (count mode)");
    app.add_option("--estimation-rate", o.estimation_rate, "Estimations per second (time mode)");
    app.add_option("--sampling-rate", o.sampling_rate, "Fraction of packets sampled per batch");
    app.add_option("--training-rate", o.training_rate, "Fraction of batches fully processed for training");
    app.add_option("--effective-rate", o.effective_rate, "Target effective sampling rate; sets the training rate");
    app.add_option("--scheme", o.scheme, "bernoulli or fixed_count");
    app.add_option("--eval-from", o.eval_from, "First batch index scored in the error table");
    app.add_flag("--unfair", o.unfair, "Sample baselines at the framework sampling rate (watermarked)");
    app.add_flag("--drop-partial", o.drop_partial, "Leave a short final batch out of the metrics");
    app.add_option("--sgd-learning-rate", o.sgd_learning_rate, "SGD step size");
    app.add_option("--pa-epsilon", o.pa_epsilon, "PA epsilon-insensitive margin");
    app.add_option("--pa-c", o.pa_c, "PA-II aggressiveness");
    app.add_option("--rls-mu", o.rls_mu, "RLS forgetting factor");
    app.add_option("--rls-delta", o.rls_delta, "RLS initial covariance scale, P0 = I / delta");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic trace and its ground-truth sidecar");
    gen->add_option("--spec", o.spec, "Synthesis spec file");
    auto* run = app.add_subcommand("run", "Run the online framework over a trace");
    auto* compare = app.add_subcommand("compare", "Compare online learners with statistical baselines");
    auto* sweep = app.add_subcommand("sweep", "MAPE grid over sampling rates at a fixed effective rate");
    sweep->add_option("--sampling-rates", o.sampling_rates, "Comma list of sampling rates");
    sweep->add_option("--batch-sizes", o.batch_sizes, "Comma list of batch sizes");
    sweep->add_option("--repeats", o.repeats, "Sampling seeds per cell");
    sweep->add_option("--algorithm", o.algorithm, "Online learner to sweep");
    auto* features = app.add_subcommand("features", "Compare feature sets and fit per-interval lines");
    features->add_option("--feature-sets", o.feature_sets, "Semicolon-separated sets, e.g. 'f1;f1,f2,f3'");
    features->add_option("--intervals", o.intervals, "Batch index ranges, e.g. '0-112,113-163'");
    auto* bench = app.add_subcommand("bench", "Time estimator components over sampling rates");
    bench->add_option("--rates", o.bench_rates, "Comma list of sampling rates");
    bench->add_option("--max-batches", o.max_batches, "Batches timed per rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (o.config) fill_from_config(o, KeyValueDoc::load(*o.config));
        if (*gen) return cmd_gen(o);
        if (*run) return cmd_compare(o, true);
        if (*compare) return cmd_compare(o, false);
        if (*sweep) return cmd_sweep(o);
        if (*features) return cmd_features(o);
        if (*bench) return cmd_bench(o);
    } catch (const ConfigError& e) {
        std::cerr << "cardest: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "cardest: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "cardest: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
