#pragma once

#include <optional>
#include <vector>

#include "ifsim/channel.hpp"
#include "ifsim/geometry.hpp"
#include "ifsim/mac.hpp"
#include "ifsim/rates.hpp"
#include "ifsim/traffic.hpp"

namespace ifsim {

// One node's tunable knobs.
struct DesignSetting {
    double coding_rate = 1.0;
    Decoder decoder = Decoder::Ian;
    MacPolicy mac;
    RetxPolicy retx;
};

// What a node believes about the network, built from local observations only.
struct Estimates {
    double density_hat = 0.0;      // active links per m^2
    double arrival_rate_hat = 0.0; // packets/slot
    MobilityKind mobility_class = MobilityKind::QuasiStatic;
    std::vector<double> interferer_distances; // RX-to-interfering-TX, quasi-static only
    double own_link_distance = 1.0;
};

// Internal pressures (loss bound, rate floor, stability) plus the fixed
// external power cap every node assumes the others share.
struct ConstraintSet {
    double plr_bound = 1.0; // epsilon
    std::optional<double> min_rate;
    double drift_tolerance = 0.01;
    double power = 1.0; // Q
};

struct CandidateGrid {
    std::vector<double> access_probabilities;
    std::vector<double> coding_rates;
    std::vector<int> max_transmissions; // 0 = unbounded
    std::vector<int> tdma_divisions;
    // CSMA parameterization used when the rule table picks carrier sensing.
    double csma_guard_factor = 3.0; // busy if one TX within guard * link distance
    int csma_backoff_window = 4;
    int csma_max_attempts = 8;

    static CandidateGrid defaults();
};

struct AdaptOptions {
    double cv_threshold = 0.1;         // mobility classifier
    double dense_guard_factor = 3.0;   // expected interferers within guard*d >= 1
    double heavy_traffic_fraction = 0.5;
    int search_limit = kDefaultSearchLimit;
};

// Quasi-static iff the coefficient of variation of the per-slot sensed power
// stays under the threshold. A flat (or silent) spectrum reads as static.
MobilityKind mobility_classify(const std::vector<double>& sensed_power_trace,
                               double cv_threshold = 0.1);

struct ObservationWindow {
    std::vector<double> sensed_power; // per-slot aggregate at this node
    std::vector<long> arrivals;       // own per-slot arrivals
    double own_link_distance = 1.0;
    std::optional<double> genie_density; // bypasses the sensing inversion
    std::vector<double> genie_interferer_distances;
};

Estimates estimate_state(const ObservationWindow& obs, const ChannelModel& model,
                         const AdaptOptions& opts = {});

// Success probability of one attempt on a link of length d against a Poisson
// field of active interferers with Rayleigh fading (interference-limited):
//   exp(-lambda_active * pi * d^2 * theta^(2/alpha) * Gamma(1+2/alpha) * Gamma(1-2/alpha)).
// Standard stochastic-geometry result; cross-checked against the engine by
// the acceptance suite before the controller may rely on it.
double aloha_rayleigh_success(double active_density, double link_distance, double coding_rate,
                              double path_loss_exponent);

double predicted_spatial_throughput(const Estimates& est, const DesignSetting& candidate,
                                    const ChannelModel& model);

struct Selection {
    DesignSetting setting;
    double predicted_spatial_throughput = 0.0;
    bool feasible = true;
};

// Rule table plus constrained grid search maximizing predicted spatial
// throughput. Infeasible inputs fall back to the stability-first setting and
// are flagged.
Selection select_setting(const Estimates& est, const ConstraintSet& constraints,
                         const CandidateGrid& grid, const ChannelModel& model,
                         const AdaptOptions& opts = {});

} // namespace ifsim
