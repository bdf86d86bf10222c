#include <doctest.h>

#include "ifsim/scenario.hpp"

using namespace ifsim;
using nlohmann::json;

namespace {

json minimal() {
    return json{
        {"seed", 1},
        {"total_slots", 10},
        {"area", {{"width", 100.0}, {"height", 100.0}}},
        {"topology",
         {{"kind", "explicit"},
          {"links", json::array({json{{"id", 0}, {"tx", {10.0, 10.0}}, {"rx", {10.0, 12.0}}}})}}}};
}

} // namespace

TEST_CASE("minimal config resolves defaults") {
    const ScenarioConfig cfg = parse_and_validate(minimal());
    CHECK(cfg.seed == 1);
    CHECK(cfg.total_slots == 10);
    CHECK(cfg.mobility == MobilityKind::QuasiStatic);
    CHECK(cfg.channel.fading == FadingKind::None); // auto resolves by mobility
    CHECK(cfg.design.mac.kind == MacKind::Aloha);
    CHECK(cfg.design.mac.aloha_p == 1.0);
    CHECK(cfg.design.retx.max_transmissions == 1);
    CHECK(cfg.metrics_window == 1000);
    CHECK(cfg.track == TrackMode::All);
    CHECK(cfg.explicit_links.size() == 1);
}

TEST_CASE("unknown keys are rejected with their path") {
    json j = minimal();
    j["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(parse_and_validate(j), doctest::Contains("typo_key"), ConfigError);

    json j2 = minimal();
    j2["design"] = {{"mac", {{"kind", "aloha"}, {"probability", 0.5}}}};
    CHECK_THROWS_WITH_AS(parse_and_validate(j2), doctest::Contains("probability"), ConfigError);
}

TEST_CASE("range violations name the key") {
    json j = minimal();
    j["design"] = {{"mac", {{"kind", "aloha"}, {"p", 1.5}}}};
    CHECK_THROWS_WITH_AS(parse_and_validate(j), doctest::Contains("config.design.mac.p"),
                         ConfigError);

    json j2 = minimal();
    j2["arrivals"] = {{"rate", -0.1}};
    CHECK_THROWS_WITH_AS(parse_and_validate(j2), doctest::Contains("config.arrivals.rate"),
                         ConfigError);

    json j3 = minimal();
    j3["total_slots"] = 0;
    CHECK_THROWS_AS(parse_and_validate(j3), ConfigError);
}

TEST_CASE("duplicate and gapped link ids are rejected") {
    json j = minimal();
    j["topology"]["links"].push_back(
        json{{"id", 0}, {"tx", {20.0, 20.0}}, {"rx", {20.0, 22.0}}});
    CHECK_THROWS_WITH_AS(parse_and_validate(j), doctest::Contains("duplicate"), ConfigError);

    json j2 = minimal();
    j2["topology"]["links"][0]["id"] = 3;
    CHECK_THROWS_WITH_AS(parse_and_validate(j2), doctest::Contains("gaps"), ConfigError);

    json j3 = minimal();
    j3["topology"]["links"][0]["rx"] = {10.0, 10.0};
    CHECK_THROWS_AS(parse_and_validate(j3), ConfigError);
}

TEST_CASE("poisson-only keys are rejected on explicit topologies") {
    json j = minimal();
    j["topology"]["density"] = 0.01;
    CHECK_THROWS_AS(parse_and_validate(j), ConfigError);
}

TEST_CASE("mobility constrains the topology source") {
    json j = minimal();
    j["mobility"] = "highly-mobile";
    CHECK_THROWS_AS(parse_and_validate(j), ConfigError);

    json ok = json{{"seed", 2},
                   {"total_slots", 5},
                   {"area", {{"width", 100.0}, {"height", 100.0}}},
                   {"mobility", "highly-mobile"},
                   {"topology",
                    {{"kind", "poisson"}, {"density", 1e-3}, {"link_distance", 10.0}}}};
    const ScenarioConfig cfg = parse_and_validate(ok);
    CHECK(cfg.channel.fading == FadingKind::RayleighPerSlot);
    CHECK(cfg.track == TrackMode::Tagged);
}

TEST_CASE("resolved config round trips") {
    json j = minimal();
    j["design"] = {{"coding_rate", 0.75},
                   {"decoder", "opt"},
                   {"mac", {{"kind", "tdma"}, {"groups", 2}}},
                   {"max_transmissions", 0}};
    j["constraints"] = {{"plr_bound", 0.05}, {"min_rate", 0.25}};
    const ScenarioConfig cfg = parse_and_validate(j);
    const json dumped = resolved_config(cfg);
    const ScenarioConfig back = parse_and_validate(dumped);
    CHECK(resolved_config(back) == dumped);
    CHECK(back.design.decoder == Decoder::Opt);
    CHECK(back.design.retx.unbounded());
    CHECK(back.constraints.min_rate.has_value());
}

TEST_CASE("tdma assignment groups are validated") {
    json j = minimal();
    j["design"] = {{"mac", {{"kind", "tdma"}, {"groups", 2}, {"assignment", {{"0", 5}}}}}};
    CHECK_THROWS_WITH_AS(parse_and_validate(j), doctest::Contains("group"), ConfigError);
}
