#include "ifsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include "ifsim/mac.hpp"
#include "ifsim/rates.hpp"
#include "ifsim/rng.hpp"

namespace ifsim {

namespace {

using nlohmann::json;

struct NodeState {
    QueueState queue;
    DesignSetting setting;
    int csma_backoff = 0;
    int csma_attempts = 0;
    bool tracked = false;

    LinkWindowRecord window;
    LinkWindowRecord totals;
    double rate_success_sum_window = 0.0; // sum of coding rates over successes
    double rate_success_sum_total = 0.0;

    std::vector<long> backlog_trace;
    std::vector<double> sensed_window;
    std::vector<long> arrivals_window;
};

void fill_gain_row(std::vector<double>& out, const ChannelModel& model, const Topology& topo,
                   int rx_index, const std::vector<int>& active, std::uint64_t slot,
                   std::uint64_t seed) {
    out.clear();
    const auto& link = topo.links[static_cast<std::size_t>(rx_index)];
    for (int tx : active) {
        const auto& tx_pos = topo.links[static_cast<std::size_t>(tx)].tx;
        const double d = torus_distance(link.rx, tx_pos, topo.area_width, topo.area_height);
        const double fade = fade_draw(model, seed, slot, link.id, tx);
        out.push_back(received_power(model, d, fade));
    }
}

json estimates_to_json(const Estimates& e) {
    return json{{"density_hat", e.density_hat},
                {"arrival_rate_hat", e.arrival_rate_hat},
                {"mobility_class", e.mobility_class == MobilityKind::HighlyMobile
                                       ? "highly-mobile"
                                       : "quasi-static"},
                {"interferer_count", e.interferer_distances.size()},
                {"own_link_distance", e.own_link_distance}};
}

json record_to_json(const LinkWindowRecord& r) {
    return json{{"link", r.link},
                {"coding_rate", r.coding_rate},
                {"slots_active", r.slots_active},
                {"slots_in_window", r.slots_in_window},
                {"successes", r.successes},
                {"outages", r.outages},
                {"losses", r.losses},
                {"arrivals", r.arrivals}};
}

} // namespace

json RunReport::to_json() const {
    json j;
    j["config"] = config;
    j["total_slots"] = total_slots;
    j["aggregate"] = {{"attempts", aggregate.attempts}, {"successes", aggregate.successes},
                      {"outages", aggregate.outages},   {"arrivals", aggregate.arrivals},
                      {"delivered", aggregate.delivered}, {"lost", aggregate.lost}};
    j["spatial_throughput_overall"] = spatial_throughput_overall;

    json links_j = json::array();
    for (const auto& l : links) {
        json lj;
        lj["id"] = l.id;
        lj["attempts"] = l.totals.successes + l.totals.outages;
        lj["successes"] = l.totals.successes;
        lj["outages"] = l.totals.outages;
        lj["arrivals"] = l.totals.arrivals;
        lj["losses"] = l.totals.losses;
        lj["slots_active"] = l.totals.slots_active;
        lj["final_backlog"] = l.final_backlog;
        lj["effective_throughput"] = l.effective_throughput ? json(*l.effective_throughput) : json();
        lj["plr"] = l.plr ? json(*l.plr) : json();
        if (l.stability) {
            lj["stability"] = {
                {"verdict",
                 l.stability->kind == StabilityKind::Stable ? "stable" : "unstable"},
                {"drift", l.stability->drift}};
        } else {
            lj["stability"] = json();
        }
        lj["final_setting"] = design_to_json(l.final_setting);
        links_j.push_back(lj);
    }
    j["links"] = links_j;

    json windows_j = json::array();
    for (const auto& w : windows) {
        json wj;
        wj["start"] = w.start;
        wj["end"] = w.end;
        wj["spatial_throughput"] = w.spatial_throughput;
        json recs = json::array();
        for (const auto& r : w.links) recs.push_back(record_to_json(r));
        wj["links"] = recs;
        windows_j.push_back(wj);
    }
    j["windows"] = windows_j;

    json adapt_j = json::array();
    for (const auto& a : adaptation) {
        adapt_j.push_back({{"slot", a.slot},
                           {"node", a.node},
                           {"estimates", estimates_to_json(a.estimates)},
                           {"setting", design_to_json(a.setting)},
                           {"predicted_spatial_throughput", a.predicted_spatial_throughput},
                           {"feasible", a.feasible}});
    }
    j["adaptation"] = adapt_j;

    if (initial_topology) {
        json t;
        ifsim::to_json(t, *initial_topology);
        j["topology"] = t;
    }
    return j;
}

RunReport run(const ScenarioConfig& cfg) {
    const ChannelModel& model = cfg.channel;
    const MobilityModel mobility = cfg.mobility_model();
    const double area = cfg.area_width * cfg.area_height;

    Topology topo;
    if (cfg.topology_source == TopologySource::Explicit) {
        topo.area_width = cfg.area_width;
        topo.area_height = cfg.area_height;
        topo.links = cfg.explicit_links;
    } else {
        topo = sample_poisson_topology(cfg.density, cfg.area_width, cfg.area_height,
                                       cfg.link_distance, cfg.seed, 0);
    }

    RunReport report;
    report.config = resolved_config(cfg);
    report.total_slots = cfg.total_slots;
    if (cfg.mobility == MobilityKind::QuasiStatic) report.initial_topology = topo;

    std::vector<NodeState> nodes;

    auto ensure_nodes = [&](int count) {
        while (static_cast<int>(nodes.size()) < count) {
            const int id = static_cast<int>(nodes.size());
            NodeState n;
            n.setting = cfg.design;
            if (const auto it = cfg.node_overrides.find(id); it != cfg.node_overrides.end())
                n.setting = it->second;
            n.queue.backlog = cfg.initial_backlog;
            n.tracked = cfg.track == TrackMode::All || id == 0;
            n.window.link = id;
            n.totals.link = id;
            nodes.push_back(std::move(n));
        }
    };
    ensure_nodes(topo.link_count());

    Topology prev_topo = topo;
    std::vector<int> prev_active;
    std::vector<int> active;
    std::vector<int> gave_up;
    std::vector<double> row_buf;
    RateTuple rates_by_id;

    long window_start = 0;

    auto flush_window = [&](long end_slot) {
        WindowStats w;
        w.start = window_start;
        w.end = end_slot;
        const long len = end_slot - window_start;
        double spatial = 0.0;
        for (auto& n : nodes) {
            spatial += n.rate_success_sum_window;
            if (n.tracked && n.window.slots_in_window > 0) w.links.push_back(n.window);
            // Conservation must hold at every window boundary.
            const auto& q = n.queue;
            if (q.arrivals_total + cfg.initial_backlog != q.delivered + q.lost + q.backlog)
                throw std::logic_error("engine: queue conservation violated");
            n.window = LinkWindowRecord{};
            n.window.link = n.totals.link;
            n.window.coding_rate = n.setting.coding_rate;
            n.rate_success_sum_window = 0.0;
        }
        w.spatial_throughput = spatial / (area * static_cast<double>(len));
        report.windows.push_back(std::move(w));
        window_start = end_slot;
    };

    for (long t = 0; t < cfg.total_slots; ++t) {
        // (1) mobility / fading epoch
        if (t > 0 && cfg.mobility == MobilityKind::HighlyMobile) {
            topo = advance(topo, mobility, t, cfg.seed);
            ensure_nodes(topo.link_count());
        }
        const int n_t = topo.link_count();

        // (2) arrivals
        for (int id = 0; id < n_t; ++id) {
            RngStream s(cfg.seed, Concern::Arrival, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(id));
            const long x = s.uniform01() < cfg.arrivals.rate ? 1 : 0;
            auto& n = nodes[static_cast<std::size_t>(id)];
            n.queue.backlog += x;
            n.queue.arrivals_total += x;
            n.window.arrivals += x;
            n.totals.arrivals += x;
            report.aggregate.arrivals += x;
            if (cfg.adaptation.enabled) n.arrivals_window.push_back(x);
        }

        // (3) MAC decisions
        active.clear();
        gave_up.clear();
        for (int id = 0; id < n_t; ++id) {
            auto& n = nodes[static_cast<std::size_t>(id)];
            const bool has_packet = n.queue.backlog >= 1;
            const MacPolicy& mac = n.setting.mac;
            switch (mac.kind) {
            case MacKind::Aloha: {
                RngStream s(cfg.seed, Concern::Mac, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(id));
                if (aloha_decide(mac.aloha_p, has_packet, s.uniform01()))
                    active.push_back(id);
                break;
            }
            case MacKind::Csma: {
                if (!has_packet) break;
                if (n.csma_backoff > 0) {
                    --n.csma_backoff;
                    break;
                }
                // One-slot-stale sensing: what the node heard during t-1.
                double sensed = 0.0;
                if (t > 0 && id < prev_topo.link_count()) {
                    sensed = sensed_power_at(
                        model, prev_topo, prev_topo.links[static_cast<std::size_t>(id)].tx,
                        id, prev_active, static_cast<std::uint64_t>(t - 1), cfg.seed);
                }
                RngStream s(cfg.seed, Concern::Mac, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(id));
                const CsmaDecision d = csma_decide(sensed, mac, n.csma_attempts, s.uniform01());
                switch (d.kind) {
                case CsmaDecision::Kind::Transmit:
                    n.csma_attempts = 0;
                    active.push_back(id);
                    break;
                case CsmaDecision::Kind::Backoff:
                    n.csma_backoff = d.backoff_slots;
                    ++n.csma_attempts;
                    break;
                case CsmaDecision::Kind::GiveUp:
                    n.csma_attempts = 0;
                    gave_up.push_back(id);
                    break;
                }
                break;
            }
            case MacKind::Tdma:
                if (has_packet && tdma_active(id, mac, t)) active.push_back(id);
                break;
            }
        }

        // (4) gains and outage, (5) instantaneous feedback, (6) queue update
        if (!active.empty()) {
            rates_by_id.assign(static_cast<std::size_t>(n_t), 0.0);
            for (int id : active)
                rates_by_id[static_cast<std::size_t>(id)] =
                    nodes[static_cast<std::size_t>(id)].setting.coding_rate;

            for (int k : active) {
                auto& n = nodes[static_cast<std::size_t>(k)];
                fill_gain_row(row_buf, model, topo, k, active, static_cast<std::uint64_t>(t),
                              cfg.seed);
                const RxGainView row{k, std::span<const int>(active),
                                     std::span<const double>(row_buf)};
                const bool out = outage(k, n.setting.coding_rate, row, n.setting.decoder,
                                        rates_by_id, cfg.search_limit);
                const bool lost = on_transmission_result(n.queue, !out, n.setting.retx);

                ++n.window.slots_active;
                ++n.totals.slots_active;
                report.aggregate.attempts += 1;
                if (out) {
                    ++n.window.outages;
                    ++n.totals.outages;
                    ++report.aggregate.outages;
                } else {
                    ++n.window.successes;
                    ++n.totals.successes;
                    ++report.aggregate.successes;
                    n.rate_success_sum_window += n.setting.coding_rate;
                    n.rate_success_sum_total += n.setting.coding_rate;
                    ++report.aggregate.delivered;
                }
                if (lost) {
                    ++n.window.losses;
                    ++n.totals.losses;
                    ++report.aggregate.lost;
                }
            }
        }
        for (int id : gave_up) {
            auto& n = nodes[static_cast<std::size_t>(id)];
            const bool lost = on_transmission_result(n.queue, false, n.setting.retx);
            if (lost) {
                ++n.window.losses;
                ++n.totals.losses;
                ++report.aggregate.lost;
            }
        }

        // (7) metrics accumulation
        for (int id = 0; id < n_t; ++id) {
            auto& n = nodes[static_cast<std::size_t>(id)];
            ++n.window.slots_in_window;
            ++n.totals.slots_in_window;
            n.window.coding_rate = n.setting.coding_rate;
            n.totals.coding_rate = n.setting.coding_rate;
            if (n.tracked) n.backlog_trace.push_back(n.queue.backlog);
            if (cfg.adaptation.enabled) {
                double sensed = 0.0;
                if (t > 0 && id < prev_topo.link_count()) {
                    sensed = sensed_power_at(
                        model, prev_topo, prev_topo.links[static_cast<std::size_t>(id)].tx,
                        id, prev_active, static_cast<std::uint64_t>(t - 1), cfg.seed);
                }
                n.sensed_window.push_back(sensed);
            }
        }

        if ((t + 1) % cfg.metrics_window == 0 || t + 1 == cfg.total_slots) flush_window(t + 1);

        // (8) per-node adaptation at epoch boundaries
        if (cfg.adaptation.enabled && (t + 1) % cfg.adaptation.epoch_length == 0) {
            for (int id = 0; id < n_t; ++id) {
                auto& n = nodes[static_cast<std::size_t>(id)];
                if (n.sensed_window.size() < 100) continue;
                ObservationWindow obs;
                obs.sensed_power = n.sensed_window;
                obs.arrivals = n.arrivals_window;
                const auto& link = topo.links[static_cast<std::size_t>(id)];
                obs.own_link_distance =
                    torus_distance(link.tx, link.rx, topo.area_width, topo.area_height);
                if (cfg.adaptation.genie_density) {
                    obs.genie_density = cfg.mobility == MobilityKind::HighlyMobile
                                            ? cfg.density
                                            : static_cast<double>(n_t) / area;
                }
                if (cfg.adaptation.genie_distances &&
                    cfg.mobility == MobilityKind::QuasiStatic) {
                    for (const auto& other : topo.links) {
                        if (other.id == id) continue;
                        obs.genie_interferer_distances.push_back(torus_distance(
                            link.rx, other.tx, topo.area_width, topo.area_height));
                    }
                }
                const Estimates est = estimate_state(obs, model, cfg.adaptation.options);
                const Selection sel = select_setting(est, cfg.constraints, cfg.adaptation.grid,
                                                     model, cfg.adaptation.options);
                n.setting = sel.setting;
                report.adaptation.push_back({t + 1, id, est, sel.setting,
                                             sel.predicted_spatial_throughput, sel.feasible});
            }
            for (auto& n : nodes) {
                n.sensed_window.clear();
                n.arrivals_window.clear();
            }
        }

        prev_topo = topo;
        prev_active = active;
    }

    // Final per-link summaries for tracked identities.
    for (auto& n : nodes) {
        if (!n.tracked) continue;
        LinkRunStats ls;
        ls.id = n.totals.link;
        ls.totals = n.totals;
        ls.effective_throughput = effective_link_throughput(n.totals);
        ls.plr = packet_loss_rate(n.totals);
        ls.final_backlog = n.queue.backlog;
        ls.final_setting = n.setting;
        if (n.backlog_trace.size() >= 1000)
            ls.stability = stability_verdict(n.backlog_trace, cfg.constraints.drift_tolerance);
        ls.backlog_trace = std::move(n.backlog_trace);
        report.links.push_back(std::move(ls));
    }

    double spatial_total = 0.0;
    for (const auto& n : nodes) spatial_total += n.rate_success_sum_total;
    report.spatial_throughput_overall =
        spatial_total / (area * static_cast<double>(cfg.total_slots));

    return report;
}

} // namespace ifsim
