#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ifsim/adapt.hpp"
#include "ifsim/channel.hpp"
#include "ifsim/geometry.hpp"
#include "ifsim/traffic.hpp"

namespace ifsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TopologySource { Explicit, Poisson };
enum class TrackMode { All, Tagged };

struct AdaptationConfig {
    bool enabled = false;
    long epoch_length = 5000;
    bool genie_density = true;
    bool genie_distances = true;
    CandidateGrid grid = CandidateGrid::defaults();
    AdaptOptions options;
};

// Fully resolved run description; every field has a validated value and the
// resolved form is echoed into the artifacts so runs are self-describing.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    long total_slots = 1;

    double area_width = 1.0;
    double area_height = 1.0;
    TopologySource topology_source = TopologySource::Explicit;
    std::vector<LinkSpec> explicit_links;
    double density = 0.0;
    double link_distance = 1.0;
    MobilityKind mobility = MobilityKind::QuasiStatic;

    ChannelModel channel;

    DesignSetting design;
    std::map<int, DesignSetting> node_overrides;

    ArrivalProcess arrivals;
    long initial_backlog = 0;

    ConstraintSet constraints;
    AdaptationConfig adaptation;

    long metrics_window = 1000;
    int search_limit = kDefaultSearchLimit;
    TrackMode track = TrackMode::All;
    bool export_backlog = false;

    MobilityModel mobility_model() const {
        return {mobility, density, link_distance};
    }
};

// Strict parse: unknown keys are rejected with their path, range violations
// name the offending key, and all defaults are resolved.
ScenarioConfig parse_and_validate(const nlohmann::json& doc);
ScenarioConfig parse_and_validate(const std::string& text);

// Round-trippable echo of the resolved configuration.
nlohmann::json resolved_config(const ScenarioConfig& cfg);

nlohmann::json design_to_json(const DesignSetting& d);

} // namespace ifsim
