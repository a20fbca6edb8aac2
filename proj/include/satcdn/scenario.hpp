#pragma once

// Declarative scenarios: a JSON document describing shells, ground nodes,
// demand, cost parameters, algorithms and delivery policies, and a runner that
// writes one directory of CSV tables per scenario.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "satcdn/delivery.hpp"
#include "satcdn/placement/optimize.hpp"

namespace satcdn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class UserSourceKind { grid, population, trace };

struct UserSource {
    UserSourceKind kind = UserSourceKind::grid;
    // grid
    GridDemandSpec grid;
    // population: `name,lat_deg,lon_deg,population` rows
    std::string population_file;
    std::int64_t requests_per_slot = 1000;
    // trace: user nodes (`name,lat_deg,lon_deg`) plus a demand trace
    std::string nodes_file;
    std::string trace_file;
    std::size_t top_k = 10;
    int first_slot = 1;
    std::optional<int> last_slot;
};

struct GatewaySource {
    std::string file;  // empty when synthetic or inline
    int synthetic_count = 0;
    BoundingBox synthetic_bbox = kUsBoundingBox;
    std::vector<GroundNode> nodes;  // inline list
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    double slot_seconds = 300.0;
    std::optional<int> slots;  // defaults to the demand horizon
    double epoch_offset_s = 0.0;
    std::vector<ShellSpec> shells;
    std::vector<GroundNode> origins;
    GatewaySource gateways;
    UserSource users;
    ContentCatalog catalog;
    std::string catalog_file;
    Metric metric = Metric::hop_count;
    std::string latency_samples_file;
    double lognormal_median_ms = 25.0;
    double lognormal_sigma = 0.5;
    double alpha = 50.0;
    double beta = 1.0;
    double gamma = 10.0;
    CandidateMode candidates = CandidateMode::both;
    std::vector<Algorithm> algorithms = all_algorithms();
    int prediction_window = 0;  // 0: plan with the actual demand
    OptimizerConfig optimizer;
    std::vector<RoutingPolicy> policies;
    DeliveryConfig delivery;
    int threads = 1;
};

namespace config_detail {

using nlohmann::json;

inline std::string type_name(const json& j) { return j.type_name(); }

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object, got " + type_name(j_));
    }

    void only(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : j_.items()) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw ConfigError(path_ + "." + k + ": unknown field");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return path_ + "." + key; }
    const std::string& where() const { return path_; }

    template <typename T>
    T get(const char* key, T fallback) const {
        return has(key) ? need<T>(key) : fallback;
    }

    template <typename T>
    T need(const char* key) const {
        if (!has(key)) throw ConfigError(path(key) + ": required field is missing");
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path(key) + ": expected a boolean, got " + type_name(v));
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer, got " + type_name(v));
            if constexpr (std::is_unsigned_v<T>) {
                if (v.get<long long>() < 0) throw ConfigError(path(key) + ": expected a nonnegative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path(key) + ": expected a number, got " + type_name(v));
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path(key) + ": expected a string, got " + type_name(v));
        }
        try {
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path(key) + ": " + e.what());
        }
    }

    Reader sub(const char* key) const { return Reader(j_.at(key), path(key)); }

private:
    const json& j_;
    std::string path_;
};

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return p;
    std::filesystem::path q(p);
    if (q.is_relative()) q = base / q;
    return std::filesystem::weakly_canonical(q).string();
}

inline void require_file(const std::string& file, const std::string& field) {
    if (!std::filesystem::exists(file)) throw ConfigError(field + ": file '" + file + "' does not exist");
}

inline BoundingBox parse_bbox(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 4) throw ConfigError(path + ": expected [lat_min, lat_max, lon_min, lon_max]");
    for (const auto& v : j)
        if (!v.is_number()) throw ConfigError(path + ": bounding box entries must be numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline json bbox_json(const BoundingBox& b) { return json::array({b.lat_min, b.lat_max, b.lon_min, b.lon_max}); }

inline ShellSpec parse_shell(const Reader& r, double default_gamma) {
    r.only({"preset", "name", "orbits", "sats_per_orbit", "altitude_km", "inclination_deg", "phasing_offset",
            "min_elevation_deg", "isl", "storage_ratio", "fixed_longitudes_deg"});
    ShellSpec s;
    s.storage_ratio = default_gamma;
    if (r.has("preset")) {
        const auto preset = r.need<std::string>("preset");
        if (preset == "starlink_phase1" || preset == "starlink") s = presets::starlink_phase1();
        else if (preset == "o3b") s = presets::o3b();
        else if (preset == "viasat") s = presets::viasat();
        else throw ConfigError(r.path("preset") + ": unknown preset '" + preset + "'");
        s.storage_ratio = default_gamma;
    }
    s.name = r.get<std::string>("name", s.name);
    s.orbit_count = r.get<int>("orbits", s.orbit_count);
    s.sats_per_orbit = r.get<int>("sats_per_orbit", s.sats_per_orbit);
    s.altitude_km = r.get<double>("altitude_km", s.altitude_km);
    s.inclination_deg = r.get<double>("inclination_deg", s.inclination_deg);
    s.phasing_offset = r.get<double>("phasing_offset", s.phasing_offset);
    s.min_elevation_deg = r.get<double>("min_elevation_deg", s.min_elevation_deg);
    s.isl_enabled = r.get<bool>("isl", s.isl_enabled);
    s.storage_ratio = r.get<double>("storage_ratio", s.storage_ratio);
    s.fixed_longitudes_deg = r.get<std::vector<double>>("fixed_longitudes_deg", s.fixed_longitudes_deg);
    if (r.has("fixed_longitudes_deg")) {
        if (!r.has("sats_per_orbit")) s.sats_per_orbit = static_cast<int>(s.fixed_longitudes_deg.size());
        if (!r.has("orbits")) s.orbit_count = 1;
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.where() + ": " + e.what());
    }
    return s;
}

inline std::vector<GroundNode> parse_nodes(const json& j, const std::string& path, GroundKind kind) {
    if (!j.is_array()) throw ConfigError(path + ": expected a list of {name, lat_deg, lon_deg}");
    std::vector<GroundNode> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Reader r(j[i], path + "[" + std::to_string(i) + "]");
        r.only({"name", "lat_deg", "lon_deg"});
        try {
            out.emplace_back(r.need<std::string>("name"), kind, r.need<double>("lat_deg"), r.need<double>("lon_deg"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + "[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

inline json nodes_json(const std::vector<GroundNode>& nodes) {
    json a = json::array();
    for (const auto& n : nodes) a.push_back({{"name", n.id}, {"lat_deg", n.latitude_deg}, {"lon_deg", n.longitude_deg}});
    return a;
}

inline json policy_json(const RoutingPolicy& p) {
    return {{"kind", to_string(p.kind)}, {"fanout", p.fanout}, {"weights", p.weights}};
}

}  // namespace config_detail

// Ashburn, Virginia: a large US hosting hub.
inline GroundNode default_origin() { return GroundNode("origin", GroundKind::origin, 39.04, -77.49); }

inline ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".") {
    using namespace config_detail;
    const Reader r(doc, "config");
    r.only({"name", "seed", "slot_seconds", "slots", "epoch_offset_s", "shells", "origins", "gateways", "users",
            "contents", "metric", "latency_samples", "lognormal", "alpha", "beta", "gamma", "candidates",
            "algorithms", "prediction", "optimizer", "delivery", "threads"});
    ScenarioConfig c;
    c.name = r.get<std::string>("name", c.name);
    c.seed = r.get<std::uint64_t>("seed", c.seed);
    c.slot_seconds = r.get<double>("slot_seconds", c.slot_seconds);
    if (!(c.slot_seconds > 0.0)) throw ConfigError("config.slot_seconds: must be > 0");
    if (r.has("slots")) {
        c.slots = r.need<int>("slots");
        if (*c.slots < 1) throw ConfigError("config.slots: horizon must be >= 1 slot");
    }
    c.epoch_offset_s = r.get<double>("epoch_offset_s", c.epoch_offset_s);
    if (c.epoch_offset_s < 0.0) throw ConfigError("config.epoch_offset_s: must be >= 0");
    c.alpha = r.get<double>("alpha", c.alpha);
    c.beta = r.get<double>("beta", c.beta);
    c.gamma = r.get<double>("gamma", c.gamma);
    c.threads = r.get<int>("threads", c.threads);
    if (c.threads < 1) throw ConfigError("config.threads: must be >= 1");

    if (!r.has("shells")) throw ConfigError("config.shells: required field is missing");
    const auto& shells = r.raw("shells");
    if (!shells.is_array() || shells.empty()) throw ConfigError("config.shells: expected a non-empty list");
    for (std::size_t i = 0; i < shells.size(); ++i) {
        c.shells.push_back(parse_shell(Reader(shells[i], "config.shells[" + std::to_string(i) + "]"), c.gamma));
    }

    c.origins = r.has("origins") ? parse_nodes(r.raw("origins"), "config.origins", GroundKind::origin)
                                 : std::vector<GroundNode>{default_origin()};
    if (c.origins.empty()) throw ConfigError("config.origins: at least one origin is required");

    if (r.has("gateways")) {
        const auto& g = r.raw("gateways");
        if (g.is_array()) {
            c.gateways.nodes = parse_nodes(g, "config.gateways", GroundKind::gateway);
        } else {
            const Reader gr(g, "config.gateways");
            gr.only({"file", "synthetic", "bbox"});
            if (gr.has("file")) {
                c.gateways.file = resolve_path(base_dir, gr.need<std::string>("file"));
                require_file(c.gateways.file, "config.gateways.file");
            } else if (gr.has("synthetic")) {
                c.gateways.synthetic_count = gr.need<int>("synthetic");
                if (c.gateways.synthetic_count < 0) throw ConfigError("config.gateways.synthetic: must be >= 0");
                if (gr.has("bbox")) c.gateways.synthetic_bbox = parse_bbox(gr.raw("bbox"), "config.gateways.bbox");
            } else {
                throw ConfigError("config.gateways: expected 'file' or 'synthetic'");
            }
        }
    }

    if (!r.has("users")) throw ConfigError("config.users: required field is missing");
    {
        const Reader ur = r.sub("users");
        const auto source = ur.need<std::string>("source");
        UserSource& u = c.users;
        if (source == "grid") {
            ur.only({"source", "rows", "cols", "bbox", "per_slot_demand", "active_rows", "active_cols"});
            u.kind = UserSourceKind::grid;
            u.grid.rows = ur.get<int>("rows", u.grid.rows);
            u.grid.cols = ur.get<int>("cols", u.grid.cols);
            if (ur.has("bbox")) u.grid.bbox = parse_bbox(ur.raw("bbox"), ur.path("bbox"));
            u.grid.per_slot_demand = ur.get<double>("per_slot_demand", u.grid.per_slot_demand);
            if (ur.has("active_rows")) u.grid.active_rows = ur.need<int>("active_rows");
            if (ur.has("active_cols")) u.grid.active_cols = ur.need<int>("active_cols");
        } else if (source == "population") {
            ur.only({"source", "file", "requests_per_slot"});
            u.kind = UserSourceKind::population;
            u.population_file = resolve_path(base_dir, ur.need<std::string>("file"));
            require_file(u.population_file, ur.path("file"));
            u.requests_per_slot = ur.get<std::int64_t>("requests_per_slot", u.requests_per_slot);
        } else if (source == "trace") {
            ur.only({"source", "nodes", "trace", "top_k", "first_slot", "last_slot"});
            u.kind = UserSourceKind::trace;
            u.nodes_file = resolve_path(base_dir, ur.need<std::string>("nodes"));
            u.trace_file = resolve_path(base_dir, ur.need<std::string>("trace"));
            require_file(u.nodes_file, ur.path("nodes"));
            require_file(u.trace_file, ur.path("trace"));
            u.top_k = ur.get<std::size_t>("top_k", u.top_k);
            u.first_slot = ur.get<int>("first_slot", u.first_slot);
            if (ur.has("last_slot")) u.last_slot = ur.need<int>("last_slot");
        } else {
            throw ConfigError(ur.path("source") + ": expected grid, population or trace");
        }
    }

    if (r.has("contents")) {
        const auto& cj = r.raw("contents");
        if (cj.is_array()) {
            for (std::size_t i = 0; i < cj.size(); ++i) {
                const Reader cr(cj[i], "config.contents[" + std::to_string(i) + "]");
                cr.only({"id", "size_mb"});
                try {
                    c.catalog.add(cr.need<std::string>("id"), cr.need<double>("size_mb"));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(cr.path("id") + ": " + e.what());
                }
            }
        } else {
            const Reader cr(cj, "config.contents");
            cr.only({"count", "size_mb", "file"});
            if (cr.has("file")) {
                c.catalog_file = resolve_path(base_dir, cr.need<std::string>("file"));
                require_file(c.catalog_file, "config.contents.file");
                c.catalog = load_catalog(c.catalog_file);
            } else {
                const int n = cr.get<int>("count", 1);
                const double size = cr.get<double>("size_mb", 1.0);
                if (n < 1) throw ConfigError("config.contents.count: must be >= 1");
                if (!(size > 0.0)) throw ConfigError("config.contents.size_mb: must be > 0");
                for (int i = 0; i < n; ++i) c.catalog.add("content" + std::to_string(i), size);
            }
        }
    }
    if (c.catalog.empty() && c.users.kind != UserSourceKind::trace) c.catalog.add("content0", 1.0);

    try {
        c.metric = parse_metric(r.get<std::string>("metric", to_string(c.metric)));
        c.candidates = parse_candidate_mode(r.get<std::string>("candidates", to_string(c.candidates)));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (r.has("latency_samples")) {
        c.latency_samples_file = resolve_path(base_dir, r.need<std::string>("latency_samples"));
        require_file(c.latency_samples_file, "config.latency_samples");
    }
    if (r.has("lognormal")) {
        const Reader lr = r.sub("lognormal");
        lr.only({"median_ms", "sigma"});
        c.lognormal_median_ms = lr.get<double>("median_ms", c.lognormal_median_ms);
        c.lognormal_sigma = lr.get<double>("sigma", c.lognormal_sigma);
    }

    if (r.has("algorithms")) {
        c.algorithms.clear();
        for (const auto& name : r.need<std::vector<std::string>>("algorithms")) {
            try {
                c.algorithms.push_back(parse_algorithm(name));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config.algorithms: ") + e.what());
            }
        }
    }

    if (r.has("prediction")) {
        const Reader pr = r.sub("prediction");
        pr.only({"mode", "window"});
        const auto mode = pr.get<std::string>("mode", "oracle");
        if (mode == "oracle") {
            c.prediction_window = 0;
        } else if (mode == "moving_average") {
            c.prediction_window = pr.get<int>("window", 1);
            if (c.prediction_window < 1) throw ConfigError("config.prediction.window: must be >= 1");
        } else {
            throw ConfigError("config.prediction.mode: expected oracle or moving_average");
        }
    }

    c.optimizer.slot_seconds = c.slot_seconds;
    c.optimizer.seed = c.seed;
    if (r.has("optimizer")) {
        const Reader orr = r.sub("optimizer");
        orr.only({"max_iterations", "neighbor_limit", "relative_tolerance", "starfront_thresholds",
                  "pch_intra_period_s", "pch_inter_period_s"});
        OptimizerConfig& o = c.optimizer;
        o.max_iterations = orr.get<int>("max_iterations", o.max_iterations);
        o.neighbor_limit = orr.get<int>("neighbor_limit", o.neighbor_limit);
        o.relative_tolerance = orr.get<double>("relative_tolerance", o.relative_tolerance);
        o.starfront_thresholds = orr.get<std::vector<double>>("starfront_thresholds", o.starfront_thresholds);
        o.pch_intra_period_s = orr.get<double>("pch_intra_period_s", o.pch_intra_period_s);
        if (orr.has("pch_inter_period_s")) o.pch_inter_period_s = orr.need<double>("pch_inter_period_s");
    }
    if (c.optimizer.starfront_thresholds.empty()) c.optimizer.starfront_thresholds = default_starfront_thresholds(c.metric);
    if (!c.optimizer.pch_inter_period_s) c.optimizer.pch_inter_period_s = 4.0 * c.optimizer.pch_intra_period_s;
    try {
        c.optimizer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config.optimizer: ") + e.what());
    }

    if (r.has("delivery")) {
        const Reader dr = r.sub("delivery");
        dr.only({"policies", "fanout", "weights", "chunk_mb", "terrestrial_gbps", "satellite_gbps", "qoe_budget_s",
                 "server_capacity_mbps"});
        const int fanout = dr.get<int>("fanout", 3);
        const auto weights = dr.get<std::vector<double>>("weights", {4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0});
        for (const auto& name : dr.get<std::vector<std::string>>("policies", {})) {
            RoutingPolicy p;
            try {
                switch (parse_routing_kind(name)) {
                    case RoutingKind::closest: p = RoutingPolicy::closest(); break;
                    case RoutingKind::round_robin: p = RoutingPolicy::round_robin(fanout); break;
                    case RoutingKind::weighted_round_robin: p = RoutingPolicy::weighted(weights); break;
                }
                p.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config.delivery.policies: ") + e.what());
            }
            c.policies.push_back(p);
        }
        DeliveryConfig& d = c.delivery;
        d.links.terrestrial_gbps = dr.get<double>("terrestrial_gbps", d.links.terrestrial_gbps);
        d.links.satellite_gbps = dr.get<double>("satellite_gbps", d.links.satellite_gbps);
        d.qoe.budget_s = dr.get<double>("qoe_budget_s", d.qoe.budget_s);
        if (dr.has("chunk_mb")) d.chunk_mb = dr.need<double>("chunk_mb");
        if (dr.has("server_capacity_mbps")) d.server_capacity_mbps = dr.need<double>("server_capacity_mbps");
        try {
            d.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config.delivery: ") + e.what());
        }
    }

    CostParams p;
    p.alpha = c.alpha;
    p.beta = c.beta;
    p.gamma = c.gamma;
    for (const auto& s : c.shells) p.shell_gamma.push_back(s.storage_ratio);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scenario(doc, std::filesystem::absolute(path).parent_path());
}

// Fully resolved config; parse_scenario(to_json(c)) reproduces c.
inline nlohmann::json to_json(const ScenarioConfig& c) {
    using nlohmann::json;
    using namespace config_detail;
    json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["slot_seconds"] = c.slot_seconds;
    if (c.slots) j["slots"] = *c.slots;
    j["epoch_offset_s"] = c.epoch_offset_s;
    json shells = json::array();
    for (const auto& s : c.shells) {
        json sj{{"name", s.name},
                {"orbits", s.orbit_count},
                {"sats_per_orbit", s.sats_per_orbit},
                {"altitude_km", s.altitude_km},
                {"inclination_deg", s.inclination_deg},
                {"phasing_offset", s.phasing_offset},
                {"min_elevation_deg", s.min_elevation_deg},
                {"isl", s.isl_enabled},
                {"storage_ratio", s.storage_ratio}};
        if (!s.fixed_longitudes_deg.empty()) sj["fixed_longitudes_deg"] = s.fixed_longitudes_deg;
        shells.push_back(sj);
    }
    j["shells"] = shells;
    j["origins"] = nodes_json(c.origins);
    if (!c.gateways.file.empty()) j["gateways"] = {{"file", c.gateways.file}};
    else if (c.gateways.synthetic_count > 0)
        j["gateways"] = {{"synthetic", c.gateways.synthetic_count}, {"bbox", bbox_json(c.gateways.synthetic_bbox)}};
    else j["gateways"] = nodes_json(c.gateways.nodes);
    const UserSource& u = c.users;
    switch (u.kind) {
        case UserSourceKind::grid: {
            json g{{"source", "grid"}, {"rows", u.grid.rows}, {"cols", u.grid.cols}, {"bbox", bbox_json(u.grid.bbox)},
                   {"per_slot_demand", u.grid.per_slot_demand}};
            if (u.grid.active_rows) g["active_rows"] = *u.grid.active_rows;
            if (u.grid.active_cols) g["active_cols"] = *u.grid.active_cols;
            j["users"] = g;
            break;
        }
        case UserSourceKind::population:
            j["users"] = {{"source", "population"}, {"file", u.population_file}, {"requests_per_slot", u.requests_per_slot}};
            break;
        case UserSourceKind::trace: {
            json t{{"source", "trace"}, {"nodes", u.nodes_file}, {"trace", u.trace_file}, {"top_k", u.top_k},
                   {"first_slot", u.first_slot}};
            if (u.last_slot) t["last_slot"] = *u.last_slot;
            j["users"] = t;
            break;
        }
    }
    if (!c.catalog_file.empty()) {
        j["contents"] = {{"file", c.catalog_file}};
    } else if (!c.catalog.empty()) {
        json cs = json::array();
        for (std::size_t k = 0; k < c.catalog.size(); ++k) cs.push_back({{"id", c.catalog.id(k)}, {"size_mb", c.catalog.size_mb(k)}});
        j["contents"] = cs;
    }
    j["metric"] = to_string(c.metric);
    if (!c.latency_samples_file.empty()) j["latency_samples"] = c.latency_samples_file;
    j["lognormal"] = {{"median_ms", c.lognormal_median_ms}, {"sigma", c.lognormal_sigma}};
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["candidates"] = to_string(c.candidates);
    json algs = json::array();
    for (Algorithm a : c.algorithms) algs.push_back(to_string(a));
    j["algorithms"] = algs;
    if (c.prediction_window == 0) j["prediction"] = {{"mode", "oracle"}};
    else j["prediction"] = {{"mode", "moving_average"}, {"window", c.prediction_window}};
    const OptimizerConfig& o = c.optimizer;
    j["optimizer"] = {{"max_iterations", o.max_iterations},
                      {"neighbor_limit", o.neighbor_limit},
                      {"relative_tolerance", o.relative_tolerance},
                      {"starfront_thresholds", o.starfront_thresholds},
                      {"pch_intra_period_s", o.pch_intra_period_s},
                      {"pch_inter_period_s", o.pch_inter_period_s.value_or(4.0 * o.pch_intra_period_s)}};
    json policies = json::array();
    for (const auto& p : c.policies) policies.push_back(to_string(p.kind));
    json d{{"policies", policies},
           {"terrestrial_gbps", c.delivery.links.terrestrial_gbps},
           {"satellite_gbps", c.delivery.links.satellite_gbps},
           {"qoe_budget_s", c.delivery.qoe.budget_s}};
    for (const auto& p : c.policies) {
        if (p.kind == RoutingKind::round_robin) d["fanout"] = p.fanout;
        if (p.kind == RoutingKind::weighted_round_robin) d["weights"] = p.weights;
    }
    if (c.delivery.chunk_mb) d["chunk_mb"] = *c.delivery.chunk_mb;
    if (c.delivery.server_capacity_mbps) d["server_capacity_mbps"] = *c.delivery.server_capacity_mbps;
    j["delivery"] = d;
    j["threads"] = c.threads;
    return j;
}

// Gateways spread uniformly at random over a bounding box.
inline std::vector<GroundNode> synth_gateways(int count, const BoundingBox& bbox, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);
    std::vector<GroundNode> out;
    for (int i = 0; i < count; ++i) {
        const double u1 = std::generate_canonical<double, 53>(rng);
        const double u2 = std::generate_canonical<double, 53>(rng);
        out.emplace_back("gw" + std::to_string(i), GroundKind::gateway, bbox.lat_min + u1 * (bbox.lat_max - bbox.lat_min),
                         bbox.lon_min + u2 * (bbox.lon_max - bbox.lon_min));
    }
    return out;
}

struct PopulationRow {
    GroundNode node;
    double population = 0.0;
};

inline std::vector<PopulationRow> load_population(const std::string& path) {
    std::vector<PopulationRow> out;
    for (const auto& row : csv::read(path, {"name", "lat_deg", "lon_deg", "population"})) {
        try {
            out.push_back({GroundNode(row.fields[0], GroundKind::user_region, csv::to_double(row.fields[1], path, row.line),
                                      csv::to_double(row.fields[2], path, row.line)),
                           csv::to_double(row.fields[3], path, row.line)});
        } catch (const std::invalid_argument& e) {
            throw csv::ParseError(path, row.line, e.what());
        }
    }
    return out;
}

inline std::vector<double> load_latency_samples(const std::string& path) {
    std::vector<double> out;
    for (const auto& row : csv::read(path, {})) {
        if (row.fields.size() != 1) throw csv::ParseError(path, row.line, "expected one latency_ms value per line");
        if (out.empty() && row.fields[0] == "latency_ms") continue;
        out.push_back(csv::to_double(row.fields[0], path, row.line));
    }
    return out;
}

struct UserWorkload {
    std::vector<GroundNode> users;
    Workload workload;
};

inline UserWorkload build_workload(const ScenarioConfig& c) {
    UserWorkload out;
    const UserSource& u = c.users;
    switch (u.kind) {
        case UserSourceKind::grid: {
            GridDemandSpec spec = u.grid;
            spec.slots = c.slots.value_or(48);
            auto g = synth_grid_demand(spec, c.catalog);
            out.users = std::move(g.users);
            out.workload = std::move(g.workload);
            break;
        }
        case UserSourceKind::population: {
            const auto rows = load_population(u.population_file);
            std::vector<double> weights;
            std::vector<std::string> ids;
            for (const auto& r : rows) {
                out.users.push_back(r.node);
                ids.push_back(r.node.id);
                weights.push_back(r.population);
            }
            out.workload.catalog = c.catalog;
            out.workload.demand = synth_population_demand(weights, ids, c.catalog, u.requests_per_slot,
                                                          c.slots.value_or(48), c.seed);
            break;
        }
        case UserSourceKind::trace: {
            out.users = load_ground_nodes(u.nodes_file, GroundKind::user_region);
            std::vector<std::string> ids;
            for (const auto& n : out.users) ids.push_back(n.id);
            TraceOptions opt;
            opt.top_k = u.top_k;
            opt.first_slot = u.first_slot;
            opt.last_slot = u.last_slot;
            opt.sizes = c.catalog.empty() ? nullptr : &c.catalog;
            out.workload = load_trace(u.trace_file, ids, opt);
            break;
        }
    }
    return out;
}

// Everything derived from a config before any algorithm runs.
struct Scenario {
    ScenarioConfig config;
    NetworkLayout layout;
    std::vector<NodeId> user_nodes;
    Workload workload;
    DemandMatrix planning;
    std::optional<LatencySampler> sampler;
    std::vector<SnapshotGraph> snapshots;
    DistanceOracle oracle;
    CostParams params;
    std::size_t warnings = 0;

    int slots() const { return oracle.slots(); }
};

inline std::vector<GroundNode> resolve_gateways(const ScenarioConfig& c) {
    if (!c.gateways.file.empty()) return load_ground_nodes(c.gateways.file, GroundKind::gateway);
    if (c.gateways.synthetic_count > 0) return synth_gateways(c.gateways.synthetic_count, c.gateways.synthetic_bbox, c.seed);
    return c.gateways.nodes;
}

inline Scenario build_scenario(const ScenarioConfig& c) {
    UserWorkload uw = build_workload(c);
    const int T = c.slots.value_or(uw.workload.demand.slots());
    if (T < 1) throw ConfigError("config.slots: horizon must be >= 1 slot (the demand has none)");

    std::vector<GroundNode> ground = c.origins;
    const std::vector<GroundNode> gateways = resolve_gateways(c);
    ground.insert(ground.end(), gateways.begin(), gateways.end());
    const std::size_t first_user = ground.size();
    ground.insert(ground.end(), uw.users.begin(), uw.users.end());
    std::set<std::string> names;
    for (const auto& g : ground)
        if (!names.insert(g.id).second) throw ConfigError("duplicate ground node name '" + g.id + "'");

    Scenario s{c, NetworkLayout(Constellation(c.shells), ground), {}, std::move(uw.workload), {}, {}, {}, {}, {}, 0};
    for (std::size_t i = first_user; i < ground.size(); ++i) s.user_nodes.push_back(s.layout.ground_node(i));

    if (c.metric == Metric::sampled_latency) {
        s.sampler = c.latency_samples_file.empty()
                        ? LatencySampler::lognormal(c.lognormal_median_ms, c.lognormal_sigma, c.seed)
                        : LatencySampler::from_samples(load_latency_samples(c.latency_samples_file), c.seed);
    }
    SnapshotOptions opt;
    opt.slot_seconds = c.slot_seconds;
    opt.epoch_offset_s = c.epoch_offset_s;
    opt.origin_satellite_links = gateways.empty();
    opt.sampler = s.sampler ? &*s.sampler : nullptr;
    s.snapshots = build_snapshots(s.layout, T, opt);
    for (const auto& g : s.snapshots) s.warnings += g.warnings.size();

    s.oracle = build_distance_oracle(s.snapshots, c.metric, SiteTable::from_layout(s.layout, c.candidates), s.user_nodes,
                                     c.threads);
    s.params.metric = c.metric;
    s.params.alpha = c.alpha;
    s.params.beta = c.beta;
    s.params.gamma = c.gamma;
    for (const auto& sh : c.shells) s.params.shell_gamma.push_back(sh.storage_ratio);
    s.params.c_qmin = s.oracle.c_qmin();
    s.planning = c.prediction_window > 0 ? predict_demand(s.workload.demand, c.prediction_window) : s.workload.demand;
    return s;
}

inline ScenarioConfig restrict_candidates(ScenarioConfig c, CandidateMode mode) {
    c.candidates = mode;
    return c;
}

// Cost of a schedule per content on the actual demand, unreachable users included.
inline std::vector<CostBreakdown> content_costs(const Scenario& s, const ReplicaSchedule& schedule) {
    std::vector<CostBreakdown> out;
    for (std::size_t c = 0; c < s.workload.catalog.size(); ++c) {
        out.push_back(content_cost(s.oracle, content_demand(s.workload.demand, c, s.slots()),
                                   storage_per_site(s.oracle.sites(), s.params, s.workload.catalog.size_mb(c)),
                                   s.params.alpha, schedule.content_sets(c), c));
    }
    return out;
}

struct ShellUsage {
    std::string name;
    long long replica_slots = 0;  // (replica, content, slot) triples on this shell
    double share = 0.0;           // of all non-origin replica slots
    double time_ratio = 0.0;      // fraction of (content, slot) pairs with a replica here
};

// One row per shell, then one for gateways.
inline std::vector<ShellUsage> shell_usage(const Scenario& s, const ReplicaSchedule& schedule) {
    const SiteTable& st = s.oracle.sites();
    const std::size_t groups = s.config.shells.size() + 1;
    std::vector<ShellUsage> out(groups);
    for (std::size_t i = 0; i + 1 < groups; ++i) out[i].name = s.config.shells[i].name;
    out.back().name = "gateways";
    std::vector<long long> pairs(groups, 0);
    long long total = 0, cells = 0;
    for (std::size_t c = 0; c < schedule.contents(); ++c) {
        for (int t = 1; t <= schedule.slots(); ++t) {
            ++cells;
            std::vector<char> seen(groups, 0);
            for (int v : schedule.at(c, t)) {
                const Site& site = st[static_cast<std::size_t>(v)];
                if (site.kind == SiteKind::origin) continue;
                const std::size_t g = site.kind == SiteKind::gateway ? groups - 1 : static_cast<std::size_t>(site.shell);
                ++out[g].replica_slots;
                ++total;
                seen[g] = 1;
            }
            for (std::size_t g = 0; g < groups; ++g) pairs[g] += seen[g];
        }
    }
    for (std::size_t g = 0; g < groups; ++g) {
        out[g].share = total == 0 ? 0.0 : static_cast<double>(out[g].replica_slots) / static_cast<double>(total);
        out[g].time_ratio = cells == 0 ? 0.0 : static_cast<double>(pairs[g]) / static_cast<double>(cells);
    }
    return out;
}

struct AlgorithmResult {
    Algorithm algorithm = Algorithm::no_replica;
    ReplicaSchedule schedule;
    OptimizerStats stats;
    std::vector<CostBreakdown> costs;  // per content
    CostBreakdown total;
    std::vector<DeliveryReport> delivery;
    double seconds = 0.0;
    std::optional<std::string> error;
};

inline AlgorithmResult run_algorithm(const Scenario& s, Algorithm a) {
    AlgorithmResult r;
    r.algorithm = a;
    const auto start = std::chrono::steady_clock::now();
    try {
        const DemandMatrix& plan = uses_prediction(a) ? s.planning : s.workload.demand;
        OptimizeResult opt = optimize(a, s.oracle, plan, s.workload.catalog, s.params, s.config.optimizer, s.config.threads);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        validate_schedule(opt.schedule, s.oracle.sites());
        r.schedule = std::move(opt.schedule);
        r.stats = std::move(opt.stats);
        r.costs = content_costs(s, r.schedule);
        for (const auto& c : r.costs) r.total += c;
        for (const auto& p : s.config.policies) {
            r.delivery.push_back(simulate_delivery(s.snapshots, s.oracle, r.schedule, s.workload.demand, s.workload.catalog,
                                                   p, s.config.delivery));
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

inline std::string node_name(const Scenario& s, int site) {
    return s.oracle.sites()[static_cast<std::size_t>(site)].name;
}

inline void write_algorithm_outputs(const Scenario& s, const AlgorithmResult& r, const std::filesystem::path& dir) {
    const std::string alg = to_string(r.algorithm);
    const std::string metric = to_string(s.config.metric);
    {
        csv::Writer w((dir / (alg + "_costs.csv")).string());
        w.row("algorithm", "content", "metric", "query", "replication", "storage", "total");
        for (std::size_t c = 0; c < r.costs.size(); ++c) {
            const auto& b = r.costs[c];
            w.row(alg, s.workload.catalog.id(c), metric, b.query, b.replication, b.storage, b.total);
        }
        w.row(alg, "all", metric, r.total.query, r.total.replication, r.total.storage, r.total.total);
    }
    {
        csv::Writer w((dir / (alg + "_schedule.csv")).string());
        w.row("content", "slot", "node_id");
        for (std::size_t c = 0; c < r.schedule.contents(); ++c)
            for (int t = 1; t <= r.schedule.slots(); ++t)
                for (int v : r.schedule.at(c, t)) w.row(s.workload.catalog.id(c), t, node_name(s, v));
    }
    {
        csv::Writer w((dir / (alg + "_ops.csv")).string());
        w.row("algorithm", "iterations", "dp_relaxations", "orbit_relaxations", "replica_relaxations", "mean_replicas",
              "starfront_threshold", "unsatisfied_users");
        w.row(alg, r.stats.iterations, r.stats.dp_relaxations, r.stats.orbit_relaxations, r.stats.replica_relaxations,
              r.schedule.mean_replicas(s.oracle.sites().origin_count()),
              r.stats.chosen_threshold ? csv::fmt(*r.stats.chosen_threshold) : std::string(), r.stats.unsatisfied_users);
    }
    {
        csv::Writer w((dir / (alg + "_shell_usage.csv")).string());
        w.row("shell", "replica_slots", "share", "time_ratio");
        for (const auto& u : shell_usage(s, r.schedule)) w.row(u.name, u.replica_slots, u.share, u.time_ratio);
    }
    if (!r.delivery.empty()) {
        csv::Writer w((dir / (alg + "_delivery.csv")).string());
        w.row("slot", "policy", "mean_qoe", "traffic_gb");
        for (const auto& rep : r.delivery)
            for (const auto& sd : rep.slots) w.row(sd.slot, to_string(rep.policy.kind), sd.mean_qoe, sd.traffic_gb);
        csv::Writer l((dir / (alg + "_replica_load.csv")).string());
        l.row("policy", "slot", "node_id", "requests", "volume_mb");
        for (const auto& rep : r.delivery)
            for (const auto& ld : rep.load)
                l.row(to_string(rep.policy.kind), ld.slot, node_name(s, ld.site), ld.requests, ld.volume_mb);
    }
}

struct RunSummary {
    std::vector<AlgorithmResult> results;
    nlohmann::json metadata;
};

inline nlohmann::json scenario_metadata(const Scenario& s) {
    nlohmann::json m;
    m["config"] = to_json(s.config);
    m["slots"] = s.slots();
    m["satellites"] = s.layout.satellite_count();
    m["ground_nodes"] = s.layout.ground().size();
    m["users"] = s.user_nodes.size();
    m["sites"] = s.oracle.site_count();
    m["candidate_sites"] = s.oracle.sites().candidate_count();
    m["contents"] = s.workload.catalog.size();
    m["c_qmin"] = s.params.c_qmin;
    m["origin_storage"] = "exempt";
    m["replication_source"] = "nearest replica of the previous slot, distance measured at the arrival slot";
    m["snapshot_warnings"] = s.warnings;
    m["qoe_model"] = s.config.delivery.qoe.describe();
    m["demand_rounding"] = "delivery rounds demand to whole requests";
    if (s.sampler) {
        m["latency_sampling"] = s.sampler->uses_fallback()
                                    ? "lognormal fallback (no sample file)"
                                    : "uniform draw from " + s.config.latency_samples_file;
    }
    return m;
}

// Runs every configured algorithm and writes the result bundle into `out`.
inline RunSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    const Scenario s = build_scenario(cfg);
    RunSummary summary;
    summary.metadata = scenario_metadata(s);
    nlohmann::json errors = nlohmann::json::object();
    nlohmann::json runtime = nlohmann::json::object();
    for (Algorithm a : cfg.algorithms) {
        AlgorithmResult r = run_algorithm(s, a);
        if (r.error) {
            errors[to_string(a)] = *r.error;
        } else {
            write_algorithm_outputs(s, r, out);
            runtime[to_string(a)] = r.seconds;
        }
        summary.results.push_back(std::move(r));
    }
    summary.metadata["algorithm_errors"] = errors;
    std::ofstream(out / "metadata.json") << summary.metadata.dump(2) << '\n';
    std::ofstream(out / "runtime.json") << runtime.dump(2) << '\n';
    return summary;
}

struct CompareRow {
    std::string bundle;
    std::string algorithm;
    std::string metric;
    std::string query, replication, storage, total;
};

// Scenario-level totals of every algorithm in each bundle directory.
inline std::vector<CompareRow> compare_bundles(const std::vector<std::string>& dirs) {
    std::vector<CompareRow> rows;
    for (const auto& d : dirs) {
        const std::filesystem::path dir(d);
        if (!std::filesystem::is_directory(dir)) throw std::runtime_error("'" + d + "' is not a result directory");
        std::string bundle = dir.filename().string();
        if (bundle.empty()) bundle = dir.parent_path().filename().string();
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(dir)) {
            const std::string f = e.path().filename().string();
            if (f.size() > 10 && f.ends_with("_costs.csv")) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            for (const auto& row : csv::read(f.string(), {"algorithm", "content", "metric", "query", "replication", "storage", "total"})) {
                if (row.fields[1] != "all") continue;
                rows.push_back({bundle, row.fields[0], row.fields[2], row.fields[3], row.fields[4], row.fields[5], row.fields[6]});
            }
        }
    }
    return rows;
}

}  // namespace satcdn
