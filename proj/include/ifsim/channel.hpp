#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifsim/geometry.hpp"
#include "ifsim/rng.hpp"

namespace ifsim {

enum class FadingKind { None, RayleighPerSlot };

// Noise power is normalized to 1; every received power is expressed relative
// to it, so SINR denominators are 1 + sum of interference.
struct ChannelModel {
    static constexpr double noise_power = 1.0;

    double path_loss_exponent = 4.0; // alpha > 2
    double min_distance = 1.0;       // d0 > 0, bounds the near-field singularity
    FadingKind fading = FadingKind::None;
    double tx_power = 1.0; // Q, common to all TXs
};

// Q * fade * max(d, d0)^-alpha. fading None fixes fade_draw = 1 upstream.
double received_power(const ChannelModel& model, double d, double fade_draw);

// Per-slot received powers from every active TX at every RX. Rows follow
// topology order (one per link), columns follow tx_ids order.
struct GainMatrix {
    std::vector<int> tx_ids;       // active TX ids, ascending
    std::vector<int> rx_ids;       // all link ids, topology order
    std::vector<double> power;     // dense, rx-major
    int cols() const { return static_cast<int>(tx_ids.size()); }
    int rows() const { return static_cast<int>(rx_ids.size()); }
    double at(int row, int col) const { return power[static_cast<std::size_t>(row) * tx_ids.size() + col]; }
};

// One RX's view of the active TX powers; what the rate kernels consume.
struct RxGainView {
    int rx_id = 0;
    std::span<const int> tx_ids;    // ascending
    std::span<const double> power;  // aligned with tx_ids
};

RxGainView row_view(const GainMatrix& g, int row);

double fade_draw(const ChannelModel& model, std::uint64_t seed, std::uint64_t slot,
                 int rx_id, int tx_id, Concern concern = Concern::Fade);

GainMatrix gain_matrix(const ChannelModel& model, const Topology& topo,
                       const std::vector<int>& active, std::uint64_t slot,
                       std::uint64_t seed);

// Single row of gain_matrix for the RX of link `rx_index`; identical values,
// computable without the rest of the matrix.
std::vector<double> gain_row(const ChannelModel& model, const Topology& topo, int rx_index,
                             const std::vector<int>& active, std::uint64_t slot,
                             std::uint64_t seed);

// Aggregate power sensed at an arbitrary point from the given TXs (carrier
// sensing observable). Uses the Sense fading concern so data-link draws stay
// untouched.
double sensed_power_at(const ChannelModel& model, const Topology& topo, const Point& where,
                       int sensor_id, const std::vector<int>& transmitters,
                       std::uint64_t slot, std::uint64_t seed);

} // namespace ifsim
