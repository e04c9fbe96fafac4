#include "cardest/online.hpp"

namespace cardest {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::sgd: return "SGD";
        case Algorithm::pa: return "PA";
        case Algorithm::rls: return "RLS";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "sgd" || name == "SGD") return Algorithm::sgd;
    if (name == "pa" || name == "PA") return Algorithm::pa;
    if (name == "rls" || name == "RLS") return Algorithm::rls;
    throw ConfigError("unknown online algorithm '" + name + "'");
}

}  // namespace cardest
