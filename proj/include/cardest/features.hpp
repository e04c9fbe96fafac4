#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cardest/core.hpp"

namespace cardest {

/// f^j counts of one sample: the number of flows seen exactly j times.
class FrequencyHistogram {
public:
    FrequencyHistogram() = default;

    /// Builds a histogram straight from {j: f^j} pairs; d and n are derived.
    static FrequencyHistogram from_counts(const std::map<std::size_t, std::uint64_t>& counts);

    std::uint64_t f(std::size_t j) const noexcept { return j < counts_.size() ? counts_[j] : 0; }
    std::uint64_t distinct() const noexcept { return distinct_; }
    std::uint64_t sample_size() const noexcept { return sample_size_; }
    /// Largest j with f^j > 0, or 0 for an empty histogram.
    std::size_t max_multiplicity() const noexcept { return counts_.empty() ? 0 : counts_.size() - 1; }

    /// Non-zero (j, f^j) pairs in increasing j.
    std::map<std::size_t, std::uint64_t> nonzero() const;

    friend bool operator==(const FrequencyHistogram&, const FrequencyHistogram&) = default;

private:
    friend FrequencyHistogram build_histogram(std::span<const PacketRecord> packets);

    std::vector<std::uint64_t> counts_;  // index j; trailing entry is always non-zero
    std::uint64_t distinct_ = 0;
    std::uint64_t sample_size_ = 0;
};

FrequencyHistogram build_histogram(std::span<const PacketRecord> packets);
inline FrequencyHistogram build_histogram(const Sample& sample) { return build_histogram(sample.packets); }

enum class Feature { f1, f2, f3, avg_pkt_len, syn_count };

std::string to_string(Feature feature);
Feature parse_feature(const std::string& name);

/// Active features in canonical order (f1, f2, f3, avg_pkt_len, syn_count).
class FeatureSet {
public:
    FeatureSet(std::initializer_list<Feature> features);
    explicit FeatureSet(std::span<const Feature> features);

    /// Comma-separated or list form, e.g. "f1,f2,f3".
    static FeatureSet parse(const std::string& csv);
    static FeatureSet parse(const std::vector<std::string>& names);
    static FeatureSet all();

    const std::vector<Feature>& features() const noexcept { return features_; }
    /// Length of the extracted vector, bias included.
    std::size_t dimension() const noexcept { return features_.size() + 1; }
    std::vector<std::string> names() const;  ///< includes the trailing "bias"
    std::string label() const;               ///< e.g. "f1+f2+f3"

    friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

private:
    std::vector<Feature> features_;
};

struct FeatureVector {
    Eigen::VectorXd values;  ///< bias entry last
    std::vector<std::string> names;

    Eigen::Index size() const noexcept { return values.size(); }
};

/// Pure function of its inputs. avg_pkt_len is 0 for an empty sample;
/// syn_count counts every TCP packet with the SYN bit, SYN-ACKs included.
FeatureVector extract_features(const Sample& sample, const FrequencyHistogram& hist, const FeatureSet& active);

/// The vector an empty time-mode window reports: zero features, bias 1.
FeatureVector zero_features(const FeatureSet& active);

}  // namespace cardest
