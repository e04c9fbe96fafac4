#include "cardest/framework.hpp"

#include <cmath>
#include <unordered_set>

namespace cardest {

std::uint64_t compute_label(const Batch& batch) {
    std::unordered_set<FlowKey> flows;
    flows.reserve(batch.size());
    for (const auto& pkt : batch.packets) flows.insert(pkt.key);
    return flows.size();
}

bool is_training_batch(std::size_t counter, double training_rate) {
    if (!(training_rate >= 0.0 && training_rate <= 1.0)) throw DomainError("training_rate must lie in [0, 1]");
    if (training_rate == 0.0) return false;
    const auto period = static_cast<std::size_t>(std::llround(1.0 / training_rate));
    return counter % period == 0;
}

}  // namespace cardest
