#include "ifsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ifsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double def,
                  double lo, double hi) {
    double v = def;
    if (obj.contains(key)) {
        if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
        v = obj[key].get<double>();
    }
    if (!std::isfinite(v) || v < lo || v > hi) {
        std::ostringstream os;
        os << "value " << v << " outside [" << lo << ", " << hi << "]";
        fail(path + "." + key, os.str());
    }
    return v;
}

long get_integer(const json& obj, const std::string& path, const char* key, long def, long lo,
                 long hi) {
    long v = def;
    if (obj.contains(key)) {
        if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
        v = obj[key].get<long>();
    }
    if (v < lo || v > hi) {
        std::ostringstream os;
        os << "value " << v << " outside [" << lo << ", " << hi << "]";
        fail(path + "." + key, os.str());
    }
    return v;
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

MacPolicy parse_mac(const json& j, const std::string& path) {
    check_keys(j, path,
               {"kind", "p", "threshold", "backoff_window", "max_attempts", "groups",
                "assignment"});
    MacPolicy mac;
    const std::string kind = get_string(j, path, "kind", "aloha");
    if (kind == "aloha") {
        mac.kind = MacKind::Aloha;
        mac.aloha_p = get_number(j, path, "p", 1.0, 0.0, 1.0);
    } else if (kind == "csma") {
        mac.kind = MacKind::Csma;
        mac.csma_threshold =
            get_number(j, path, "threshold", 0.0, 0.0, std::numeric_limits<double>::max());
        mac.csma_backoff_window =
            static_cast<int>(get_integer(j, path, "backoff_window", 4, 1, 1 << 20));
        mac.csma_max_attempts =
            static_cast<int>(get_integer(j, path, "max_attempts", 8, 0, 1 << 20));
    } else if (kind == "tdma") {
        mac.kind = MacKind::Tdma;
        mac.tdma_groups = static_cast<int>(get_integer(j, path, "groups", 1, 1, 1 << 20));
        if (j.contains("assignment")) {
            if (!j["assignment"].is_object()) fail(path + ".assignment", "expected an object");
            for (const auto& [key, value] : j["assignment"].items()) {
                int node = 0;
                try {
                    node = std::stoi(key);
                } catch (...) {
                    fail(path + ".assignment." + key, "node id must be an integer");
                }
                if (!value.is_number_integer())
                    fail(path + ".assignment." + key, "group must be an integer");
                const int group = value.get<int>();
                if (group < 0 || group >= mac.tdma_groups)
                    fail(path + ".assignment." + key, "group outside [0, groups)");
                mac.tdma_assignment[node] = group;
            }
        }
    } else {
        fail(path + ".kind", "expected one of aloha|csma|tdma");
    }
    return mac;
}

DesignSetting parse_design(const json& j, const std::string& path, const DesignSetting& base) {
    check_keys(j, path, {"coding_rate", "decoder", "mac", "max_transmissions"});
    DesignSetting d = base;
    d.coding_rate = get_number(j, path, "coding_rate", base.coding_rate, 0.0,
                               std::numeric_limits<double>::max());
    const std::string dec = get_string(
        j, path, "decoder", base.decoder == Decoder::Opt ? "opt" : "ian");
    if (dec == "ian")
        d.decoder = Decoder::Ian;
    else if (dec == "opt")
        d.decoder = Decoder::Opt;
    else
        fail(path + ".decoder", "expected ian|opt");
    if (j.contains("mac")) d.mac = parse_mac(j["mac"], path + ".mac");
    d.retx.max_transmissions = static_cast<int>(
        get_integer(j, path, "max_transmissions", base.retx.max_transmissions, 0, 1 << 30));
    return d;
}

json mac_to_json(const MacPolicy& mac) {
    json j;
    switch (mac.kind) {
    case MacKind::Aloha:
        j["kind"] = "aloha";
        j["p"] = mac.aloha_p;
        break;
    case MacKind::Csma:
        j["kind"] = "csma";
        j["threshold"] = mac.csma_threshold;
        j["backoff_window"] = mac.csma_backoff_window;
        j["max_attempts"] = mac.csma_max_attempts;
        break;
    case MacKind::Tdma:
        j["kind"] = "tdma";
        j["groups"] = mac.tdma_groups;
        if (!mac.tdma_assignment.empty()) {
            json a = json::object();
            for (const auto& [node, group] : mac.tdma_assignment)
                a[std::to_string(node)] = group;
            j["assignment"] = a;
        }
        break;
    }
    return j;
}

} // namespace

nlohmann::json design_to_json(const DesignSetting& d) {
    json j;
    j["coding_rate"] = d.coding_rate;
    j["decoder"] = d.decoder == Decoder::Opt ? "opt" : "ian";
    j["mac"] = mac_to_json(d.mac);
    j["max_transmissions"] = d.retx.max_transmissions;
    return j;
}

ScenarioConfig parse_and_validate(const nlohmann::json& doc) {
    check_keys(doc, "config",
               {"seed", "total_slots", "area", "mobility", "topology", "channel", "design",
                "node_overrides", "arrivals", "initial_backlog", "constraints", "adaptation",
                "metrics", "search_limit", "track", "export_backlog"});

    ScenarioConfig cfg;

    if (!doc.contains("seed")) fail("config.seed", "required");
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
        fail("config.seed", "expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();

    if (!doc.contains("total_slots")) fail("config.total_slots", "required");
    cfg.total_slots = get_integer(doc, "config", "total_slots", 1, 1, 1L << 40);

    if (!doc.contains("area")) fail("config.area", "required");
    check_keys(doc["area"], "config.area", {"width", "height"});
    cfg.area_width = get_number(doc["area"], "config.area", "width", 1.0, 1e-9, 1e12);
    cfg.area_height = get_number(doc["area"], "config.area", "height", 1.0, 1e-9, 1e12);

    const std::string mob = get_string(doc, "config", "mobility", "quasi-static");
    if (mob == "quasi-static")
        cfg.mobility = MobilityKind::QuasiStatic;
    else if (mob == "highly-mobile")
        cfg.mobility = MobilityKind::HighlyMobile;
    else
        fail("config.mobility", "expected quasi-static|highly-mobile");

    if (!doc.contains("topology")) fail("config.topology", "required");
    {
        const json& t = doc["topology"];
        check_keys(t, "config.topology", {"kind", "density", "link_distance", "links"});
        const std::string kind = get_string(t, "config.topology", "kind", "poisson");
        if (kind == "poisson") {
            cfg.topology_source = TopologySource::Poisson;
            cfg.density = get_number(t, "config.topology", "density", 0.0, 0.0, 1e12);
            cfg.link_distance =
                get_number(t, "config.topology", "link_distance", 1.0, 1e-9, 1e12);
        } else if (kind == "explicit") {
            cfg.topology_source = TopologySource::Explicit;
            if (t.contains("density") || t.contains("link_distance"))
                fail("config.topology", "density/link_distance only apply to poisson topologies");
            if (!t.contains("links") || !t["links"].is_array())
                fail("config.topology.links", "required array");
            std::set<int> seen;
            for (std::size_t i = 0; i < t["links"].size(); ++i) {
                const json& l = t["links"][i];
                const std::string lp = "config.topology.links[" + std::to_string(i) + "]";
                check_keys(l, lp, {"id", "tx", "rx"});
                LinkSpec link;
                if (!l.contains("id") || !l["id"].is_number_integer())
                    fail(lp + ".id", "required integer");
                link.id = l["id"].get<int>();
                if (!seen.insert(link.id).second) fail(lp + ".id", "duplicate node id");
                auto read_pt = [&](const char* key) {
                    if (!l.contains(key) || !l[key].is_array() || l[key].size() != 2)
                        fail(lp + "." + key, "expected [x, y]");
                    Point p{l[key][0].get<double>(), l[key][1].get<double>()};
                    if (!std::isfinite(p.x) || !std::isfinite(p.y))
                        fail(lp + "." + key, "coordinates must be finite");
                    return p;
                };
                link.tx = read_pt("tx");
                link.rx = read_pt("rx");
                if (distance(link.tx, link.rx) <= 0.0)
                    fail(lp, "tx and rx must not coincide");
                cfg.explicit_links.push_back(link);
            }
            for (int i = 0; i < static_cast<int>(cfg.explicit_links.size()); ++i)
                if (seen.find(i) == seen.end())
                    fail("config.topology.links", "ids must cover 0..K without gaps");
            std::sort(cfg.explicit_links.begin(), cfg.explicit_links.end(),
                      [](const LinkSpec& a, const LinkSpec& b) { return a.id < b.id; });
            if (!cfg.explicit_links.empty()) {
                double min_d = std::numeric_limits<double>::max();
                for (const auto& l : cfg.explicit_links)
                    min_d = std::min(min_d, distance(l.tx, l.rx));
                cfg.link_distance = min_d;
            }
        } else {
            fail("config.topology.kind", "expected poisson|explicit");
        }
    }
    if (cfg.mobility == MobilityKind::HighlyMobile &&
        cfg.topology_source != TopologySource::Poisson)
        fail("config.topology.kind", "highly-mobile requires a poisson topology");

    {
        json ch = doc.value("channel", json::object());
        check_keys(ch, "config.channel",
                   {"path_loss_exponent", "min_distance", "fading", "tx_power"});
        cfg.channel.path_loss_exponent =
            get_number(ch, "config.channel", "path_loss_exponent", 4.0, 2.0 + 1e-9, 64.0);
        cfg.channel.min_distance =
            get_number(ch, "config.channel", "min_distance", 1.0, 1e-12, 1e12);
        cfg.channel.tx_power = get_number(ch, "config.channel", "tx_power", 1.0, 1e-300,
                                          std::numeric_limits<double>::max());
        const std::string fading = get_string(ch, "config.channel", "fading", "auto");
        if (fading == "none")
            cfg.channel.fading = FadingKind::None;
        else if (fading == "rayleigh")
            cfg.channel.fading = FadingKind::RayleighPerSlot;
        else if (fading == "auto")
            cfg.channel.fading = cfg.mobility == MobilityKind::HighlyMobile
                                     ? FadingKind::RayleighPerSlot
                                     : FadingKind::None;
        else
            fail("config.channel.fading", "expected none|rayleigh|auto");
    }

    {
        json d = doc.value("design", json::object());
        DesignSetting base;
        base.coding_rate = 1.0;
        base.decoder = Decoder::Ian;
        base.mac.kind = MacKind::Aloha;
        base.mac.aloha_p = 1.0;
        base.retx.max_transmissions = 1;
        cfg.design = parse_design(d, "config.design", base);
    }

    if (doc.contains("node_overrides")) {
        const json& arr = doc["node_overrides"];
        if (!arr.is_array()) fail("config.node_overrides", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "config.node_overrides[" + std::to_string(i) + "]";
            check_keys(arr[i], p, {"node", "coding_rate", "decoder", "mac", "max_transmissions"});
            if (!arr[i].contains("node") || !arr[i]["node"].is_number_integer())
                fail(p + ".node", "required integer");
            const int node = arr[i]["node"].get<int>();
            if (node < 0) fail(p + ".node", "must be >= 0");
            if (cfg.node_overrides.count(node)) fail(p + ".node", "duplicate node id");
            json d = arr[i];
            d.erase("node");
            cfg.node_overrides[node] = parse_design(d, p, cfg.design);
        }
    }

    {
        json a = doc.value("arrivals", json::object());
        check_keys(a, "config.arrivals", {"kind", "rate"});
        const std::string kind = get_string(a, "config.arrivals", "kind", "bernoulli");
        if (kind != "bernoulli") fail("config.arrivals.kind", "expected bernoulli");
        cfg.arrivals.rate = get_number(a, "config.arrivals", "rate", 0.5, 0.0, 1.0);
    }
    cfg.initial_backlog = get_integer(doc, "config", "initial_backlog", 0, 0, 1L << 40);

    {
        json c = doc.value("constraints", json::object());
        check_keys(c, "config.constraints",
                   {"plr_bound", "min_rate", "drift_tolerance"});
        cfg.constraints.plr_bound = get_number(c, "config.constraints", "plr_bound", 1.0, 0.0, 1.0);
        if (c.contains("min_rate") && !c["min_rate"].is_null())
            cfg.constraints.min_rate = get_number(c, "config.constraints", "min_rate", 0.0, 0.0,
                                                  std::numeric_limits<double>::max());
        cfg.constraints.drift_tolerance =
            get_number(c, "config.constraints", "drift_tolerance", 0.01, 0.0, 1e12);
        cfg.constraints.power = cfg.channel.tx_power;
    }

    {
        json a = doc.value("adaptation", json::object());
        check_keys(a, "config.adaptation",
                   {"enabled", "epoch_length", "genie_density", "genie_distances",
                    "cv_threshold", "dense_guard_factor", "heavy_traffic_fraction"});
        cfg.adaptation.enabled = get_bool(a, "config.adaptation", "enabled", false);
        cfg.adaptation.epoch_length =
            get_integer(a, "config.adaptation", "epoch_length", 5000, 100, 1L << 40);
        cfg.adaptation.genie_density = get_bool(a, "config.adaptation", "genie_density", true);
        cfg.adaptation.genie_distances =
            get_bool(a, "config.adaptation", "genie_distances", true);
        cfg.adaptation.options.cv_threshold =
            get_number(a, "config.adaptation", "cv_threshold", 0.1, 0.0, 1e12);
        cfg.adaptation.options.dense_guard_factor =
            get_number(a, "config.adaptation", "dense_guard_factor", 3.0, 0.0, 1e12);
        cfg.adaptation.options.heavy_traffic_fraction =
            get_number(a, "config.adaptation", "heavy_traffic_fraction", 0.5, 0.0, 1.0);
    }

    {
        json m = doc.value("metrics", json::object());
        check_keys(m, "config.metrics", {"window"});
        cfg.metrics_window = get_integer(m, "config.metrics", "window", 1000, 1, 1L << 40);
    }

    cfg.search_limit =
        static_cast<int>(get_integer(doc, "config", "search_limit", kDefaultSearchLimit, 1, 24));
    cfg.adaptation.options.search_limit = cfg.search_limit;

    const std::string track = get_string(
        doc, "config", "track",
        cfg.mobility == MobilityKind::HighlyMobile ? "tagged" : "all");
    if (track == "all")
        cfg.track = TrackMode::All;
    else if (track == "tagged")
        cfg.track = TrackMode::Tagged;
    else
        fail("config.track", "expected all|tagged");

    cfg.export_backlog = get_bool(doc, "config", "export_backlog", false);
    return cfg;
}

ScenarioConfig parse_and_validate(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_and_validate(doc);
}

nlohmann::json resolved_config(const ScenarioConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["total_slots"] = cfg.total_slots;
    j["area"] = {{"width", cfg.area_width}, {"height", cfg.area_height}};
    j["mobility"] =
        cfg.mobility == MobilityKind::HighlyMobile ? "highly-mobile" : "quasi-static";
    if (cfg.topology_source == TopologySource::Poisson) {
        j["topology"] = {{"kind", "poisson"},
                         {"density", cfg.density},
                         {"link_distance", cfg.link_distance}};
    } else {
        json links = json::array();
        for (const auto& l : cfg.explicit_links)
            links.push_back(
                {{"id", l.id}, {"tx", {l.tx.x, l.tx.y}}, {"rx", {l.rx.x, l.rx.y}}});
        j["topology"] = {{"kind", "explicit"}, {"links", links}};
    }
    j["channel"] = {
        {"path_loss_exponent", cfg.channel.path_loss_exponent},
        {"min_distance", cfg.channel.min_distance},
        {"fading", cfg.channel.fading == FadingKind::RayleighPerSlot ? "rayleigh" : "none"},
        {"tx_power", cfg.channel.tx_power}};
    j["design"] = design_to_json(cfg.design);
    if (!cfg.node_overrides.empty()) {
        json arr = json::array();
        for (const auto& [node, d] : cfg.node_overrides) {
            json o = design_to_json(d);
            o["node"] = node;
            arr.push_back(o);
        }
        j["node_overrides"] = arr;
    }
    j["arrivals"] = {{"kind", "bernoulli"}, {"rate", cfg.arrivals.rate}};
    j["initial_backlog"] = cfg.initial_backlog;
    json cons = {{"plr_bound", cfg.constraints.plr_bound},
                 {"drift_tolerance", cfg.constraints.drift_tolerance}};
    cons["min_rate"] = cfg.constraints.min_rate ? json(*cfg.constraints.min_rate) : json();
    j["constraints"] = cons;
    j["adaptation"] = {
        {"enabled", cfg.adaptation.enabled},
        {"epoch_length", cfg.adaptation.epoch_length},
        {"genie_density", cfg.adaptation.genie_density},
        {"genie_distances", cfg.adaptation.genie_distances},
        {"cv_threshold", cfg.adaptation.options.cv_threshold},
        {"dense_guard_factor", cfg.adaptation.options.dense_guard_factor},
        {"heavy_traffic_fraction", cfg.adaptation.options.heavy_traffic_fraction}};
    j["metrics"] = {{"window", cfg.metrics_window}};
    j["search_limit"] = cfg.search_limit;
    j["track"] = cfg.track == TrackMode::Tagged ? "tagged" : "all";
    j["export_backlog"] = cfg.export_backlog;
    return j;
}

} // namespace ifsim
