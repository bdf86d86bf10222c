#include "ifsim/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ifsim {

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

double axis_wrap(double d, double period) {
    d = std::abs(d);
    d = std::fmod(d, period);
    return std::min(d, period - d);
}

double wrap_into(double v, double period) {
    v = std::fmod(v, period);
    if (v < 0.0) v += period;
    return v;
}

} // namespace

double torus_distance(const Point& a, const Point& b, double w, double h) {
    const double dx = axis_wrap(a.x - b.x, w);
    const double dy = axis_wrap(a.y - b.y, h);
    return std::hypot(dx, dy);
}

Topology sample_poisson_topology(double density, double area_width, double area_height,
                                 double link_distance, std::uint64_t seed,
                                 std::uint64_t slot) {
    if (!std::isfinite(density) || density < 0.0)
        throw std::invalid_argument("sample_poisson_topology: density must be finite and >= 0");
    if (!std::isfinite(area_width) || !std::isfinite(area_height) || area_width <= 0.0 ||
        area_height <= 0.0)
        throw std::invalid_argument("sample_poisson_topology: area dimensions must be > 0");
    if (!std::isfinite(link_distance) || link_distance <= 0.0)
        throw std::invalid_argument("sample_poisson_topology: link_distance must be > 0");

    Topology topo;
    topo.area_width = area_width;
    topo.area_height = area_height;
    topo.epoch = static_cast<long>(slot);

    RngStream count_stream(seed, Concern::Placement, slot, /*node=*/0, /*extra=*/0);
    const std::uint64_t n = count_stream.poisson(density * area_width * area_height);

    topo.links.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        RngStream s(seed, Concern::Placement, slot, i, /*extra=*/1);
        LinkSpec link;
        link.id = static_cast<int>(i);
        link.tx.x = s.uniform01() * area_width;
        link.tx.y = s.uniform01() * area_height;
        const double angle = s.uniform01() * 2.0 * std::numbers::pi;
        link.rx.x = wrap_into(link.tx.x + link_distance * std::cos(angle), area_width);
        link.rx.y = wrap_into(link.tx.y + link_distance * std::sin(angle), area_height);
        topo.links.push_back(link);
    }
    return topo;
}

Topology advance(const Topology& topo, const MobilityModel& mobility, long slot,
                 std::uint64_t seed) {
    if (mobility.kind == MobilityKind::QuasiStatic) return topo;
    return sample_poisson_topology(mobility.density, topo.area_width, topo.area_height,
                                   mobility.link_distance, seed,
                                   static_cast<std::uint64_t>(slot));
}

void to_json(nlohmann::json& j, const Topology& t) {
    j = nlohmann::json{{"area", {t.area_width, t.area_height}},
                       {"epoch", t.epoch},
                       {"links", nlohmann::json::array()}};
    for (const auto& l : t.links) {
        j["links"].push_back({{"id", l.id},
                              {"tx", {l.tx.x, l.tx.y}},
                              {"rx", {l.rx.x, l.rx.y}}});
    }
}

void from_json(const nlohmann::json& j, Topology& t) {
    t.area_width = j.at("area").at(0).get<double>();
    t.area_height = j.at("area").at(1).get<double>();
    t.epoch = j.value("epoch", 0L);
    t.links.clear();
    for (const auto& l : j.at("links")) {
        LinkSpec link;
        link.id = l.at("id").get<int>();
        link.tx = {l.at("tx").at(0).get<double>(), l.at("tx").at(1).get<double>()};
        link.rx = {l.at("rx").at(0).get<double>(), l.at("rx").at(1).get<double>()};
        t.links.push_back(link);
    }
}

} // namespace ifsim
