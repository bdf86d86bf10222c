#include "ifsim/channel.hpp"

#include <cmath>

namespace ifsim {

double received_power(const ChannelModel& model, double d, double fade_draw) {
    const double eff = std::max(d, model.min_distance);
    return model.tx_power * fade_draw * std::pow(eff, -model.path_loss_exponent);
}

double fade_draw(const ChannelModel& model, std::uint64_t seed, std::uint64_t slot,
                 int rx_id, int tx_id, Concern concern) {
    if (model.fading == FadingKind::None) return 1.0;
    RngStream s(seed, concern, slot, static_cast<std::uint64_t>(rx_id),
                static_cast<std::uint64_t>(tx_id));
    return s.exponential_mean1();
}

GainMatrix gain_matrix(const ChannelModel& model, const Topology& topo,
                       const std::vector<int>& active, std::uint64_t slot,
                       std::uint64_t seed) {
    GainMatrix g;
    g.tx_ids = active;
    g.rx_ids.reserve(topo.links.size());
    for (const auto& l : topo.links) g.rx_ids.push_back(l.id);
    g.power.resize(topo.links.size() * active.size());

    const double w = topo.area_width;
    const double h = topo.area_height;
    std::size_t idx = 0;
    for (const auto& link : topo.links) {
        for (int tx : active) {
            const auto& tx_pos = topo.links[static_cast<std::size_t>(tx)].tx;
            const double d = torus_distance(link.rx, tx_pos, w, h);
            const double fade = fade_draw(model, seed, slot, link.id, tx);
            g.power[idx++] = received_power(model, d, fade);
        }
    }
    return g;
}

RxGainView row_view(const GainMatrix& g, int row) {
    RxGainView v;
    v.rx_id = g.rx_ids[static_cast<std::size_t>(row)];
    v.tx_ids = std::span<const int>(g.tx_ids);
    v.power = std::span<const double>(g.power).subspan(
        static_cast<std::size_t>(row) * g.tx_ids.size(), g.tx_ids.size());
    return v;
}

std::vector<double> gain_row(const ChannelModel& model, const Topology& topo, int rx_index,
                             const std::vector<int>& active, std::uint64_t slot,
                             std::uint64_t seed) {
    std::vector<double> row;
    row.reserve(active.size());
    const auto& link = topo.links[static_cast<std::size_t>(rx_index)];
    for (int tx : active) {
        const auto& tx_pos = topo.links[static_cast<std::size_t>(tx)].tx;
        const double d = torus_distance(link.rx, tx_pos, topo.area_width, topo.area_height);
        const double fade = fade_draw(model, seed, slot, link.id, tx);
        row.push_back(received_power(model, d, fade));
    }
    return row;
}

double sensed_power_at(const ChannelModel& model, const Topology& topo, const Point& where,
                       int sensor_id, const std::vector<int>& transmitters,
                       std::uint64_t slot, std::uint64_t seed) {
    double total = 0.0;
    for (int tx : transmitters) {
        if (tx == sensor_id) continue;
        const auto& tx_pos = topo.links[static_cast<std::size_t>(tx)].tx;
        const double d = torus_distance(where, tx_pos, topo.area_width, topo.area_height);
        const double fade = fade_draw(model, seed, slot, sensor_id, tx, Concern::Sense);
        total += received_power(model, d, fade);
    }
    return total;
}

} // namespace ifsim
