#pragma once

#include <map>
#include <optional>

namespace ifsim {

enum class MacKind { Aloha, Csma, Tdma };

struct MacPolicy {
    MacKind kind = MacKind::Aloha;
    // aloha
    double aloha_p = 1.0;
    // csma (slotted: sense at slot start, back off whole slots)
    double csma_threshold = 0.0;  // sensed power above this means busy
    int csma_backoff_window = 1;  // W >= 1, backoff uniform in {1..W}
    int csma_max_attempts = 8;    // busy senses before giving up on the head packet
    // tdma (distributed time-division)
    int tdma_groups = 1;                   // m >= 1
    std::map<int, int> tdma_assignment;    // TX id -> group; empty means id mod m
};

bool aloha_decide(double p, bool has_packet, double rng_draw);

struct CsmaDecision {
    enum class Kind { Transmit, Backoff, GiveUp } kind = Kind::Transmit;
    int backoff_slots = 0;
};

CsmaDecision csma_decide(double sensed_power, const MacPolicy& policy, int attempts_so_far,
                         double rng_draw);

// True iff the node's group owns this slot. Nodes without an explicit
// assignment default to id mod m, computable without coordination.
bool tdma_active(int node, const MacPolicy& policy, long slot);

} // namespace ifsim
