#include "cardest/features.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace cardest {

namespace {

constexpr Feature kCanonical[] = {Feature::f1, Feature::f2, Feature::f3, Feature::avg_pkt_len, Feature::syn_count};

void canonicalize(std::vector<Feature>& fs) {
    if (fs.empty()) throw ConfigError("feature set must not be empty");
    std::sort(fs.begin(), fs.end());
    if (std::adjacent_find(fs.begin(), fs.end()) != fs.end()) {
        throw ConfigError("duplicate feature in feature set");
    }
}

}  // namespace

FrequencyHistogram FrequencyHistogram::from_counts(const std::map<std::size_t, std::uint64_t>& counts) {
    FrequencyHistogram h;
    for (const auto& [j, c] : counts) {
        if (j == 0) throw DomainError("multiplicity must be positive");
        if (c == 0) continue;
        if (h.counts_.size() <= j) h.counts_.resize(j + 1, 0);
        h.counts_[j] = c;
        h.distinct_ += c;
        h.sample_size_ += c * j;
    }
    return h;
}

std::map<std::size_t, std::uint64_t> FrequencyHistogram::nonzero() const {
    std::map<std::size_t, std::uint64_t> out;
    for (std::size_t j = 1; j < counts_.size(); ++j) {
        if (counts_[j] != 0) out.emplace(j, counts_[j]);
    }
    return out;
}

FrequencyHistogram build_histogram(std::span<const PacketRecord> packets) {
    std::unordered_map<FlowKey, std::uint32_t> per_flow;
    per_flow.reserve(packets.size());
    for (const auto& pkt : packets) ++per_flow[pkt.key];

    FrequencyHistogram h;
    for (const auto& [key, count] : per_flow) {
        if (h.counts_.size() <= count) h.counts_.resize(count + 1, 0);
        ++h.counts_[count];
    }
    h.distinct_ = per_flow.size();
    h.sample_size_ = packets.size();
    return h;
}

std::string to_string(Feature feature) {
    switch (feature) {
        case Feature::f1: return "f1";
        case Feature::f2: return "f2";
        case Feature::f3: return "f3";
        case Feature::avg_pkt_len: return "avg_pkt_len";
        case Feature::syn_count: return "syn_count";
    }
    return "?";
}

Feature parse_feature(const std::string& name) {
    for (auto f : kCanonical) {
        if (to_string(f) == name) return f;
    }
    throw ConfigError("unknown feature '" + name + "'");
}

FeatureSet::FeatureSet(std::initializer_list<Feature> features) : features_(features) { canonicalize(features_); }

FeatureSet::FeatureSet(std::span<const Feature> features) : features_(features.begin(), features.end()) {
    canonicalize(features_);
}

FeatureSet FeatureSet::parse(const std::vector<std::string>& names) {
    std::vector<Feature> fs;
    for (const auto& n : names) fs.push_back(parse_feature(n));
    return FeatureSet(std::span<const Feature>(fs));
}

FeatureSet FeatureSet::parse(const std::string& csv) {
    std::vector<std::string> names;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) names.push_back(item);
    }
    return parse(names);
}

FeatureSet FeatureSet::all() {
    return FeatureSet{Feature::f1, Feature::f2, Feature::f3, Feature::avg_pkt_len, Feature::syn_count};
}

std::vector<std::string> FeatureSet::names() const {
    std::vector<std::string> out;
    for (auto f : features_) out.push_back(to_string(f));
    out.emplace_back("bias");
    return out;
}

std::string FeatureSet::label() const {
    std::string out;
    for (auto f : features_) {
        if (!out.empty()) out += '+';
        out += to_string(f);
    }
    return out;
}

FeatureVector extract_features(const Sample& sample, const FrequencyHistogram& hist, const FeatureSet& active) {
    FeatureVector x;
    x.names = active.names();
    x.values.resize(static_cast<Eigen::Index>(active.dimension()));
    Eigen::Index i = 0;
    for (auto f : active.features()) {
        double v = 0.0;
        switch (f) {
            case Feature::f1: v = static_cast<double>(hist.f(1)); break;
            case Feature::f2: v = static_cast<double>(hist.f(2)); break;
            case Feature::f3: v = static_cast<double>(hist.f(3)); break;
            case Feature::avg_pkt_len: {
                if (sample.size() == 0) break;
                std::uint64_t total = 0;
                for (const auto& p : sample.packets) total += p.pkt_len;
                v = static_cast<double>(total) / static_cast<double>(sample.size());
                break;
            }
            case Feature::syn_count:
                v = static_cast<double>(std::count_if(sample.packets.begin(), sample.packets.end(),
                                                      [](const PacketRecord& p) { return p.is_syn(); }));
                break;
        }
        x.values[i++] = v;
    }
    x.values[i] = 1.0;
    return x;
}

FeatureVector zero_features(const FeatureSet& active) {
    FeatureVector x;
    x.names = active.names();
    x.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(active.dimension()));
    x.values[x.values.size() - 1] = 1.0;
    return x;
}

}  // namespace cardest
