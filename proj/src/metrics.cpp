#include "ifsim/metrics.hpp"

#include <stdexcept>

namespace ifsim {

std::optional<double> effective_link_throughput(const LinkWindowRecord& record) {
    const long attempts = record.successes + record.outages;
    if (attempts <= 0) return std::nullopt;
    return record.coding_rate *
           (static_cast<double>(record.successes) / static_cast<double>(attempts));
}

double spatial_throughput(const std::vector<LinkWindowRecord>& records, double area,
                          long window) {
    if (!(area > 0.0)) throw std::invalid_argument("spatial_throughput: area must be > 0");
    if (window <= 0) throw std::invalid_argument("spatial_throughput: window must be > 0");
    double total = 0.0;
    for (const auto& r : records) {
        const auto thr = effective_link_throughput(r);
        if (!thr) continue;
        total += (static_cast<double>(r.slots_active) / static_cast<double>(window)) * *thr;
    }
    return total / area;
}

std::optional<double> packet_loss_rate(const LinkWindowRecord& record) {
    if (record.arrivals <= 0) return std::nullopt;
    return static_cast<double>(record.losses) / static_cast<double>(record.arrivals);
}

} // namespace ifsim
