#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace ifsim {

struct ArrivalProcess {
    double rate = 0.0; // Bernoulli packets/slot, in [0, 1]
};

struct RetxPolicy {
    // Maximum transmissions of one packet, including the first. 0 = unbounded.
    int max_transmissions = 1;
    bool unbounded() const { return max_transmissions == 0; }
};

struct QueueState {
    long backlog = 0;      // Q_k(t)
    int hol_attempts = 0;  // transmissions of the head-of-line packet so far
    long delivered = 0;
    long lost = 0;
    long arrivals_total = 0;
};

// Q(t+1) = max(Q(t) - Y(t), 0) + X(t).
long queue_step(long backlog, long served, long arrived);

// Head-of-line bookkeeping after one transmission attempt (or a CSMA give-up,
// which counts as a failed attempt against the retransmission budget).
// Returns true when the head packet was dropped.
bool on_transmission_result(QueueState& q, bool success, const RetxPolicy& policy);

enum class StabilityKind { Stable, Unstable };

struct StabilityVerdict {
    StabilityKind kind = StabilityKind::Stable;
    double drift = 0.0; // packets/slot, least-squares slope over the trace tail
};

// Drift test standing in for the limiting-distribution definition: fit a
// least-squares slope over the second half of the backlog trace and call the
// queue unstable when it exceeds the tolerance.
StabilityVerdict stability_verdict(const std::vector<long>& trace,
                                   double drift_tolerance = 0.01);

} // namespace ifsim
