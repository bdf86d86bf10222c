#include "ifsim/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ifsim {

namespace {

constexpr double kTiny = 1e-12;

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Gains at the node's own RX implied by the estimated interferer distances,
// strongest first.
struct LocalGains {
    double p_own = 0.0;
    std::vector<double> p_interferers;
};

LocalGains local_gains(const Estimates& est, const ChannelModel& model) {
    LocalGains g;
    g.p_own = received_power(model, est.own_link_distance, 1.0);
    g.p_interferers.reserve(est.interferer_distances.size());
    for (double d : est.interferer_distances)
        g.p_interferers.push_back(received_power(model, d, 1.0));
    std::sort(g.p_interferers.begin(), g.p_interferers.end(), std::greater<>());
    return g;
}

// Representative co-active interferers under an m-way time division: every
// m-th by descending power, strongest included.
std::vector<double> coactive_powers(const LocalGains& g, int m) {
    std::vector<double> out;
    for (std::size_t i = 0; i < g.p_interferers.size(); i += static_cast<std::size_t>(m))
        out.push_back(g.p_interferers[i]);
    return out;
}

// Achievable rate on the estimated static topology for one reuse group. OPT
// assumes the symmetric network state: peers run at the IAN rate of the same
// division.
double quasi_achievable_rate(const LocalGains& g, int m, Decoder decoder, int search_limit) {
    const auto coactive = coactive_powers(g, m);
    double interference = 0.0;
    for (double p : coactive) interference += p;
    const double ian = std::log1p(g.p_own / (1.0 + interference)) / std::numbers::ln2;
    if (decoder == Decoder::Ian || coactive.empty()) return ian;

    std::vector<int> ids(coactive.size() + 1);
    std::vector<double> powers(coactive.size() + 1);
    RateTuple rates(coactive.size() + 1, ian);
    ids[0] = 0;
    powers[0] = g.p_own;
    for (std::size_t i = 0; i < coactive.size(); ++i) {
        ids[i + 1] = static_cast<int>(i) + 1;
        powers[i + 1] = coactive[i];
    }
    RxGainView row{0, std::span<const int>(ids), std::span<const double>(powers)};
    return opt_rate(0, row, rates, search_limit).rate;
}

// Mean transmissions spent on one head-of-line packet.
double mean_attempts(double p_success, const RetxPolicy& retx) {
    if (p_success <= 0.0)
        return retx.unbounded() ? std::numeric_limits<double>::infinity()
                                : static_cast<double>(retx.max_transmissions);
    if (retx.unbounded()) return 1.0 / p_success;
    return (1.0 - std::pow(1.0 - p_success, retx.max_transmissions)) / p_success;
}

double predicted_plr(double p_success, const RetxPolicy& retx) {
    if (retx.unbounded()) return 0.0;
    return std::pow(1.0 - p_success, retx.max_transmissions);
}

struct Prediction {
    double p_success = 0.0;
    double activity = 0.0;  // attempt fraction of slots when backlogged
    double plr = 0.0;
    double departure = 0.0; // head-of-line departures per slot when backlogged
    double score = 0.0;     // activity * R * p_success, spatial throughput per link density
};

Prediction predict(double p_success, double activity, double coding_rate,
                   const RetxPolicy& retx) {
    Prediction pr;
    pr.p_success = p_success;
    pr.activity = activity;
    pr.plr = predicted_plr(p_success, retx);
    const double attempts = mean_attempts(p_success, retx);
    pr.departure = std::isinf(attempts) ? 0.0 : activity / attempts;
    pr.score = activity * coding_rate * p_success;
    return pr;
}

struct Candidate {
    DesignSetting setting;
    Prediction pred;
};

// Keeps the first candidate of every score plateau; loops are ordered so
// ties break toward lower p, then lower R, then lower M.
void consider(std::optional<Candidate>& best, Candidate cand) {
    if (!best || cand.pred.score > best->pred.score + kTiny) best = std::move(cand);
}

MacPolicy tdma_policy(int m) {
    MacPolicy mac;
    mac.kind = MacKind::Tdma;
    mac.tdma_groups = m;
    return mac;
}

MacPolicy aloha_policy(double p) {
    MacPolicy mac;
    mac.kind = MacKind::Aloha;
    mac.aloha_p = p;
    return mac;
}

MacPolicy csma_policy(const CandidateGrid& grid, const Estimates& est,
                      const ChannelModel& model) {
    MacPolicy mac;
    mac.kind = MacKind::Csma;
    mac.csma_threshold =
        received_power(model, grid.csma_guard_factor * est.own_link_distance, 1.0);
    mac.csma_backoff_window = grid.csma_backoff_window;
    mac.csma_max_attempts = grid.csma_max_attempts;
    return mac;
}

} // namespace

CandidateGrid CandidateGrid::defaults() {
    CandidateGrid g;
    for (int i = 1; i <= 10; ++i) g.access_probabilities.push_back(static_cast<double>(i) / 10.0);
    constexpr int n_rates = 32;
    for (int i = 0; i < n_rates; ++i) {
        const double t = static_cast<double>(i) / (n_rates - 1);
        g.coding_rates.push_back(0.05 * std::pow(8.0 / 0.05, t));
    }
    g.max_transmissions = {1, 2, 4, 8, 0};
    g.tdma_divisions = {1, 2, 4};
    return g;
}

MobilityKind mobility_classify(const std::vector<double>& sensed_power_trace,
                               double cv_threshold) {
    if (sensed_power_trace.size() < 100)
        throw std::invalid_argument("mobility_classify: trace shorter than 100 slots");
    const double mean = mean_of(sensed_power_trace);
    if (mean <= 0.0) return MobilityKind::QuasiStatic;
    double var = 0.0;
    for (double x : sensed_power_trace) var += (x - mean) * (x - mean);
    var /= static_cast<double>(sensed_power_trace.size());
    const double cv = std::sqrt(var) / mean;
    return cv < cv_threshold ? MobilityKind::QuasiStatic : MobilityKind::HighlyMobile;
}

Estimates estimate_state(const ObservationWindow& obs, const ChannelModel& model,
                         const AdaptOptions& opts) {
    if (obs.sensed_power.size() < 100)
        throw std::invalid_argument("estimate_state: window shorter than 100 slots");

    Estimates est;
    est.own_link_distance = obs.own_link_distance;

    if (!obs.arrivals.empty()) {
        double s = 0.0;
        for (long a : obs.arrivals) s += static_cast<double>(a);
        est.arrival_rate_hat = s / static_cast<double>(obs.arrivals.size());
    }

    if (obs.genie_density) {
        est.density_hat = *obs.genie_density;
    } else {
        // E[aggregate power] = density * Q * integral of the bounded path
        // loss over the plane; invert for the active density.
        const double alpha = model.path_loss_exponent;
        const double d0 = model.min_distance;
        const double integral =
            std::numbers::pi * std::pow(d0, 2.0 - alpha) * alpha / (alpha - 2.0);
        const double mean_power = mean_of(obs.sensed_power);
        est.density_hat = mean_power / (model.tx_power * integral);
    }

    est.interferer_distances = obs.genie_interferer_distances;
    est.mobility_class = mobility_classify(obs.sensed_power, opts.cv_threshold);
    return est;
}

double aloha_rayleigh_success(double active_density, double link_distance, double coding_rate,
                              double path_loss_exponent) {
    const double alpha = path_loss_exponent;
    if (!(alpha > 2.0))
        throw std::invalid_argument("aloha_rayleigh_success: path loss exponent must exceed 2");
    if (coding_rate <= 0.0) return 1.0;
    const double theta = std::exp2(coding_rate) - 1.0;
    const double gamma_term = std::tgamma(1.0 + 2.0 / alpha) * std::tgamma(1.0 - 2.0 / alpha);
    const double exponent = active_density * std::numbers::pi * link_distance * link_distance *
                            std::pow(theta, 2.0 / alpha) * gamma_term;
    return std::exp(-exponent);
}

double predicted_spatial_throughput(const Estimates& est, const DesignSetting& candidate,
                                    const ChannelModel& model) {
    const double r = candidate.coding_rate;
    if (est.mobility_class == MobilityKind::QuasiStatic) {
        const LocalGains g = local_gains(est, model);
        int m = 1;
        double activity = 1.0;
        switch (candidate.mac.kind) {
        case MacKind::Tdma:
            m = candidate.mac.tdma_groups;
            activity = 1.0 / m;
            break;
        case MacKind::Aloha:
            activity = candidate.mac.aloha_p;
            break;
        case MacKind::Csma:
            activity = 1.0;
            break;
        }
        const double ach = quasi_achievable_rate(g, m, candidate.decoder, kDefaultSearchLimit);
        const double p_s = rate_leq(r, ach) ? 1.0 : 0.0;
        return est.density_hat * activity * r * p_s;
    }

    const double p = candidate.mac.kind == MacKind::Aloha ? candidate.mac.aloha_p : 1.0;
    const double lambda_active = est.density_hat * p;
    const double p_s = aloha_rayleigh_success(lambda_active, est.own_link_distance, r,
                                              model.path_loss_exponent);
    return lambda_active * r * p_s;
}

Selection select_setting(const Estimates& est, const ConstraintSet& constraints,
                         const CandidateGrid& grid, const ChannelModel& model,
                         const AdaptOptions& opts) {
    if (grid.coding_rates.empty() || grid.max_transmissions.empty())
        throw std::invalid_argument("select_setting: empty candidate grid");

    const double guard = opts.dense_guard_factor * est.own_link_distance;
    const bool dense = est.density_hat * std::numbers::pi * guard * guard >= 1.0;
    const double lambda_hat = est.arrival_rate_hat;
    // Service rate of the default setting (single division / full access,
    // one transmission per packet) is one departure per slot.
    const bool heavy = lambda_hat > opts.heavy_traffic_fraction;

    std::optional<Candidate> best;

    const auto stability_ok = [&](const Prediction& pr) { return lambda_hat < pr.departure; };
    const auto plr_ok = [&](const Prediction& pr) {
        return pr.plr <= constraints.plr_bound + kTiny;
    };

    if (est.mobility_class == MobilityKind::QuasiStatic) {
        const Decoder decoder = dense ? Decoder::Opt : Decoder::Ian;
        const LocalGains gains = local_gains(est, model);

        const double ach_single = quasi_achievable_rate(gains, 1, decoder, opts.search_limit);

        // Within the capacity region with light traffic and no rate floor,
        // nothing else is needed: full time reuse, no retransmissions, the
        // achievable rate itself.
        if (!dense && !heavy && !constraints.min_rate && ach_single > 0.0 && lambda_hat < 1.0) {
            Selection sel;
            sel.setting = {ach_single, decoder, tdma_policy(1), RetxPolicy{1}};
            sel.predicted_spatial_throughput =
                predicted_spatial_throughput(est, sel.setting, model);
            return sel;
        }

        auto divisions = grid.tdma_divisions;
        if (divisions.empty()) divisions = {1};
        for (int m : divisions) {
            const double ach = quasi_achievable_rate(gains, m, decoder, opts.search_limit);
            if (!(ach > 0.0)) continue;
            std::vector<double> rate_cands;
            rate_cands.push_back(ach);
            for (double r : grid.coding_rates)
                if (rate_leq(r, ach)) rate_cands.push_back(r);
            std::sort(rate_cands.begin(), rate_cands.end());
            for (double r : rate_cands) {
                if (constraints.min_rate && r < *constraints.min_rate) continue;
                for (int m_tx : grid.max_transmissions) {
                    const RetxPolicy retx{m_tx};
                    const Prediction pr = predict(1.0, 1.0 / m, r, retx);
                    if (!plr_ok(pr) || !stability_ok(pr)) continue;
                    consider(best, {{r, decoder, tdma_policy(m), retx}, pr});
                }
            }
        }

        if (!best) {
            // Stability-first fallback: slowest rate, most divided schedule.
            Selection sel;
            sel.feasible = false;
            const double r_min =
                *std::min_element(grid.coding_rates.begin(), grid.coding_rates.end());
            const int m_max = *std::max_element(divisions.begin(), divisions.end());
            sel.setting = {r_min, decoder, tdma_policy(m_max), RetxPolicy{1}};
            sel.predicted_spatial_throughput =
                predicted_spatial_throughput(est, sel.setting, model);
            return sel;
        }
    } else {
        // Highly mobile: joint decoding and distributed time-division are
        // ruled out; only the coding rate, access policy and retransmission
        // budget remain.
        const Decoder decoder = Decoder::Ian;
        const double d = est.own_link_distance;
        const double alpha = model.path_loss_exponent;
        auto rates_sorted = grid.coding_rates;
        std::sort(rates_sorted.begin(), rates_sorted.end());

        if (!dense) {
            // Sparse favours carrier sensing; contention is rare, so predict
            // it as full access against the whole active density.
            const MacPolicy mac = csma_policy(grid, est, model);
            for (double r : rates_sorted) {
                const double p_s = aloha_rayleigh_success(est.density_hat, d, r, alpha);
                for (int m_tx : grid.max_transmissions) {
                    const RetxPolicy retx{m_tx};
                    const Prediction pr = predict(p_s, 1.0, r, retx);
                    if (!plr_ok(pr) || !stability_ok(pr)) continue;
                    consider(best, {{r, decoder, mac, retx}, pr});
                }
            }
        } else {
            auto probs = grid.access_probabilities;
            if (probs.empty()) probs = {1.0};
            std::sort(probs.begin(), probs.end());
            for (double p : probs) {
                for (double r : rates_sorted) {
                    const double p_s = aloha_rayleigh_success(est.density_hat * p, d, r, alpha);
                    for (int m_tx : grid.max_transmissions) {
                        const RetxPolicy retx{m_tx};
                        const Prediction pr = predict(p_s, p, r, retx);
                        if (!plr_ok(pr) || !stability_ok(pr)) continue;
                        consider(best, {{r, decoder, aloha_policy(p), retx}, pr});
                    }
                }
            }
        }

        if (!best) {
            Selection sel;
            sel.feasible = false;
            const double r_min =
                *std::min_element(grid.coding_rates.begin(), grid.coding_rates.end());
            MacPolicy mac;
            if (!dense) {
                mac = csma_policy(grid, est, model);
            } else {
                const double p_min = grid.access_probabilities.empty()
                                         ? 1.0
                                         : *std::min_element(grid.access_probabilities.begin(),
                                                             grid.access_probabilities.end());
                mac = aloha_policy(p_min);
            }
            sel.setting = {r_min, decoder, mac, RetxPolicy{1}};
            sel.predicted_spatial_throughput =
                predicted_spatial_throughput(est, sel.setting, model);
            return sel;
        }
    }

    Selection sel;
    sel.setting = best->setting;
    sel.predicted_spatial_throughput = est.density_hat * best->pred.score;
    sel.feasible = true;
    return sel;
}

} // namespace ifsim
