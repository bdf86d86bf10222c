#include "ifsim/mac.hpp"

#include <cmath>
#include <stdexcept>

namespace ifsim {

bool aloha_decide(double p, bool has_packet, double rng_draw) {
    return has_packet && rng_draw < p;
}

CsmaDecision csma_decide(double sensed_power, const MacPolicy& policy, int attempts_so_far,
                         double rng_draw) {
    if (sensed_power <= policy.csma_threshold) return {CsmaDecision::Kind::Transmit, 0};
    if (attempts_so_far < policy.csma_max_attempts) {
        const int w = policy.csma_backoff_window;
        const int slots = 1 + static_cast<int>(rng_draw * w);
        return {CsmaDecision::Kind::Backoff, std::min(slots, w)};
    }
    return {CsmaDecision::Kind::GiveUp, 0};
}

bool tdma_active(int node, const MacPolicy& policy, long slot) {
    const int m = policy.tdma_groups;
    int group;
    if (policy.tdma_assignment.empty()) {
        group = node % m;
    } else {
        const auto it = policy.tdma_assignment.find(node);
        if (it == policy.tdma_assignment.end())
            throw std::invalid_argument("tdma_active: node has no group assignment");
        group = it->second;
    }
    return group == static_cast<int>(slot % m);
}

} // namespace ifsim
