#pragma once

#include <optional>
#include <vector>

namespace ifsim {

// Per-link counters over one observation window.
struct LinkWindowRecord {
    int link = 0;
    double coding_rate = 0.0;
    long slots_active = 0;    // slots the TX transmitted (delta-t)
    long slots_in_window = 0;
    long successes = 0;
    long outages = 0;         // successes + outages == transmission attempts
    long losses = 0;
    long arrivals = 0;
};

// Coding rate weighted by the empirical per-attempt success ratio. Absent
// when the link never transmitted in the window.
std::optional<double> effective_link_throughput(const LinkWindowRecord& record);

// (1/A) * sum_i (delta_t_i / window) * effective throughput of link i, in
// bits/s/Hz/m^2. Links without attempts contribute nothing.
double spatial_throughput(const std::vector<LinkWindowRecord>& records, double area,
                          long window);

// lost / arrived over the window; absent without arrivals.
std::optional<double> packet_loss_rate(const LinkWindowRecord& record);

} // namespace ifsim
