#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "ifsim/metrics.hpp"
#include "ifsim/scenario.hpp"

namespace ifsim {

struct LinkRunStats {
    int id = 0;
    LinkWindowRecord totals;
    std::optional<double> effective_throughput;
    std::optional<double> plr;
    std::optional<StabilityVerdict> stability;
    long final_backlog = 0;
    DesignSetting final_setting;
    std::vector<long> backlog_trace; // CSV export only, not serialized to JSON
};

struct WindowStats {
    long start = 0;
    long end = 0;
    double spatial_throughput = 0.0;
    std::vector<LinkWindowRecord> links; // tracked links
};

struct AdaptDecisionLog {
    long slot = 0;
    int node = 0;
    Estimates estimates;
    DesignSetting setting;
    double predicted_spatial_throughput = 0.0;
    bool feasible = true;
};

// Network-wide counters pooled over every link identity.
struct AggregateStats {
    long attempts = 0;
    long successes = 0;
    long outages = 0;
    long arrivals = 0;
    long delivered = 0;
    long lost = 0;
};

struct RunReport {
    nlohmann::json config; // resolved echo
    long total_slots = 0;
    AggregateStats aggregate;
    std::vector<LinkRunStats> links; // tracked links, ascending id
    std::vector<WindowStats> windows;
    double spatial_throughput_overall = 0.0;
    std::vector<AdaptDecisionLog> adaptation;
    std::optional<Topology> initial_topology; // quasi-static replay

    nlohmann::json to_json() const;
};

// Deterministic slotted run: mobility update, arrivals, MAC, outage
// evaluation, instantaneous feedback, queue/retransmission update, metrics,
// and per-node adaptation at epoch boundaries.
RunReport run(const ScenarioConfig& cfg);

} // namespace ifsim
