#pragma once

#include <cstdint>
#include <vector>

#include "ifsim/rng.hpp"

#include <json.hpp>

namespace ifsim {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Euclidean distance.
double distance(const Point& a, const Point& b);

// Shortest distance on the w-by-h torus. The area is treated as a torus for
// all propagation computations to avoid edge effects.
double torus_distance(const Point& a, const Point& b, double w, double h);

struct LinkSpec {
    int id = 0;
    Point tx;
    Point rx;
};

struct Topology {
    double area_width = 0.0;
    double area_height = 0.0;
    std::vector<LinkSpec> links; // ids 0..K, no gaps
    long epoch = 0;              // slot of last placement

    double area() const { return area_width * area_height; }
    int link_count() const { return static_cast<int>(links.size()); }
};

enum class MobilityKind { QuasiStatic, HighlyMobile };

struct MobilityModel {
    MobilityKind kind = MobilityKind::QuasiStatic;
    double density = 0.0;       // links per m^2, highly-mobile redraws only
    double link_distance = 1.0; // TX-RX separation used when sampling
};

// Binomial/Poisson placement: the link count is Poisson(density * area), TX
// positions are uniform over the area and each RX sits at link_distance from
// its TX at a uniform angle, wrapped toroidally. Deterministic per
// (seed, slot).
Topology sample_poisson_topology(double density, double area_width, double area_height,
                                 double link_distance, std::uint64_t seed,
                                 std::uint64_t slot = 0);

// Quasi-static returns the topology unchanged; highly-mobile returns an
// independent fresh sample for this slot.
Topology advance(const Topology& topo, const MobilityModel& mobility, long slot,
                 std::uint64_t seed);

void to_json(nlohmann::json& j, const Topology& t);
void from_json(const nlohmann::json& j, Topology& t);

} // namespace ifsim
