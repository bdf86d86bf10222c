#include "ifsim/traffic.hpp"

#include <stdexcept>

namespace ifsim {

long queue_step(long backlog, long served, long arrived) {
    const long drained = backlog - served;
    return (drained > 0 ? drained : 0) + arrived;
}

bool on_transmission_result(QueueState& q, bool success, const RetxPolicy& policy) {
    if (q.backlog < 1)
        throw std::logic_error("on_transmission_result: no packet was in the queue");
    if (success) {
        --q.backlog;
        ++q.delivered;
        q.hol_attempts = 0;
        return false;
    }
    ++q.hol_attempts;
    if (!policy.unbounded() && q.hol_attempts >= policy.max_transmissions) {
        --q.backlog;
        ++q.lost;
        q.hol_attempts = 0;
        return true;
    }
    return false;
}

StabilityVerdict stability_verdict(const std::vector<long>& trace, double drift_tolerance) {
    if (trace.size() < 1000)
        throw std::invalid_argument("stability_verdict: trace shorter than 1000 samples");

    const std::size_t start = trace.size() / 2;
    const std::size_t n = trace.size() - start;
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += static_cast<double>(i);
        mean_y += static_cast<double>(trace[start + i]);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxy += dx * (static_cast<double>(trace[start + i]) - mean_y);
        sxx += dx * dx;
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

    StabilityVerdict v;
    v.drift = slope;
    v.kind = slope > drift_tolerance ? StabilityKind::Unstable : StabilityKind::Stable;
    return v;
}

} // namespace ifsim
