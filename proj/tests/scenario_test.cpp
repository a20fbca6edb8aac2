#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "satcdn/satcdn.hpp"
#include "test_paths.hpp"

using namespace satcdn;
using nlohmann::json;

namespace {

json minimal_geo() {
    return json::parse(R"({
        "name": "geo",
        "shells": [{"name": "geo", "altitude_km": 35786, "inclination_deg": 0, "fixed_longitudes_deg": [-95]}],
        "users": {"source": "grid", "rows": 1, "cols": 1},
        "slots": 2,
        "algorithms": ["no_replica"]
    })");
}

json small_leo(const std::string& algorithms = R"(["no_replica", "naive_greedy", "mtls", "mtols", "pch"])") {
    return json::parse(R"({
        "name": "leo",
        "seed": 7,
        "shells": [{"name": "leo", "orbits": 12, "sats_per_orbit": 10, "altitude_km": 550, "inclination_deg": 53,
                    "min_elevation_deg": 10}],
        "gateways": {"synthetic": 3},
        "users": {"source": "grid", "rows": 2, "cols": 3, "per_slot_demand": 4},
        "contents": {"count": 2, "size_mb": 1},
        "slots": 6,
        "alpha": 5,
        "delivery": {"policies": ["closest", "wrr"]},
        "algorithms": )" + algorithms + "}");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const AlgorithmResult& result_of(const RunSummary& s, Algorithm a) {
    for (const auto& r : s.results)
        if (r.algorithm == a) return r;
    throw std::out_of_range("algorithm not run");
}

}  // namespace

TEST(Scenario, MinimalGeoNoReplica) {
    const auto dir = scratch_dir("geo");
    const RunSummary s = run_scenario(parse_scenario(minimal_geo()), dir);
    ASSERT_EQ(s.results.size(), 1u);
    ASSERT_FALSE(s.results[0].error.has_value());
    const auto rows = csv::read((dir / "no_replica_costs.csv").string(),
                                {"algorithm", "content", "metric", "query", "replication", "storage", "total"});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].fields[1], "content0");
    EXPECT_EQ(rows[0].fields[4], "0");
    EXPECT_EQ(rows[0].fields[5], "0");
    // user - GEO - origin: 2 hops per unit of demand, 2 slots.
    EXPECT_EQ(std::stod(rows[0].fields[3]), 4.0);
    EXPECT_TRUE(std::filesystem::exists(dir / "metadata.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "no_replica_schedule.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "no_replica_ops.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Scenario, RerunIsByteIdentical) {
    const ScenarioConfig cfg = parse_scenario(small_leo());
    const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    run_scenario(cfg, a);
    ScenarioConfig threaded = cfg;
    threaded.threads = 2;
    run_scenario(threaded, b);
    std::size_t compared = 0;
    for (const auto& e : std::filesystem::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
        ++compared;
    }
    EXPECT_EQ(compared, 5u * 4u + 5u * 2u);
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Scenario, ResolvedConfigRoundTrips) {
    const ScenarioConfig cfg = parse_scenario(small_leo());
    const json resolved = to_json(cfg);
    EXPECT_EQ(to_json(parse_scenario(resolved)), resolved);
    EXPECT_EQ(resolved["optimizer"]["max_iterations"], 50);
    EXPECT_EQ(resolved["optimizer"]["neighbor_limit"], 4);
    EXPECT_EQ(resolved["gamma"], 10.0);

    const auto a = scratch_dir("rt_a"), b = scratch_dir("rt_b");
    ScenarioConfig one = cfg, two = parse_scenario(resolved);
    one.algorithms = two.algorithms = {Algorithm::mtols};
    run_scenario(one, a);
    run_scenario(two, b);
    EXPECT_EQ(slurp(a / "mtols_schedule.csv"), slurp(b / "mtols_schedule.csv"));
    EXPECT_EQ(slurp(a / "mtols_costs.csv"), slurp(b / "mtols_costs.csv"));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Scenario, FieldPreciseErrors) {
    json d = minimal_geo();
    d["alpha"] = "big";
    EXPECT_EQ(config_error(d), "config.alpha: expected a number, got string");
    d = minimal_geo();
    d["shells"][0]["orbits"] = 0;
    EXPECT_NE(config_error(d).find("config.shells[0]"), std::string::npos);
    d = minimal_geo();
    d["users"]["colums"] = 3;
    EXPECT_EQ(config_error(d), "config.users.colums: unknown field");
    d = minimal_geo();
    d.erase("shells");
    EXPECT_EQ(config_error(d), "config.shells: required field is missing");
    d = minimal_geo();
    d["slots"] = 0;
    EXPECT_EQ(config_error(d), "config.slots: horizon must be >= 1 slot");
    d = minimal_geo();
    d["users"] = {{"source", "trace"}, {"nodes", "/nonexistent/users.csv"}, {"trace", "x.csv"}};
    EXPECT_NE(config_error(d).find("config.users.nodes"), std::string::npos);
    d = minimal_geo();
    d["algorithms"] = {"mtls", "magic"};
    EXPECT_NE(config_error(d).find("config.algorithms"), std::string::npos);
    d = minimal_geo();
    d["gamma"] = 0.5;
    EXPECT_NE(config_error(d).find("gamma"), std::string::npos);
    d = minimal_geo();
    d["origins"] = json::array();
    EXPECT_EQ(config_error(d), "config.origins: at least one origin is required");
    d = minimal_geo();
    d["delivery"] = {{"policies", {"wrr"}}, {"weights", {0.1, 0.9}}, {"fanout", 2}};
    EXPECT_NE(config_error(d).find("config.delivery.policies"), std::string::npos);
    EXPECT_THROW(load_scenario("/nonexistent/config.json"), ConfigError);
}

TEST(Scenario, DuplicateGroundNamesRejected) {
    json d = minimal_geo();
    d["gateways"] = json::parse(R"([{"name": "origin", "lat_deg": 40, "lon_deg": -100}])");
    EXPECT_THROW(build_scenario(parse_scenario(d)), ConfigError);
}

TEST(Scenario, SatellitesOnlyScheduleHasNoGateways) {
    ScenarioConfig cfg = restrict_candidates(parse_scenario(small_leo(R"(["mtls"])")), CandidateMode::satellites_only);
    const Scenario s = build_scenario(cfg);
    const AlgorithmResult r = run_algorithm(s, Algorithm::mtls);
    ASSERT_FALSE(r.error);
    for (std::size_t c = 0; c < r.schedule.contents(); ++c)
        for (int t = 1; t <= r.schedule.slots(); ++t)
            for (int v : r.schedule.at(c, t)) EXPECT_NE(s.oracle.sites()[static_cast<std::size_t>(v)].kind, SiteKind::gateway);
}

TEST(Scenario, GatewaysOnlyWithoutGatewaysIsNoReplica) {
    json d = small_leo(R"(["mtls", "no_replica"])");
    d.erase("gateways");
    const ScenarioConfig cfg = restrict_candidates(parse_scenario(d), CandidateMode::gateways_only);
    const Scenario s = build_scenario(cfg);
    EXPECT_EQ(s.oracle.sites().candidate_count(), 0u);
    const AlgorithmResult m = run_algorithm(s, Algorithm::mtls);
    const AlgorithmResult n = run_algorithm(s, Algorithm::no_replica);
    EXPECT_EQ(m.schedule, n.schedule);
    EXPECT_EQ(m.total.total, n.total.total);
    EXPECT_EQ(m.total.replication + m.total.storage, 0.0);
}

TEST(Scenario, BothCandidatesNoWorseThanGatewaysOnly) {
    const ScenarioConfig base = parse_scenario(small_leo(R"(["mtls"])"));
    const Scenario both = build_scenario(restrict_candidates(base, CandidateMode::both));
    const Scenario gw = build_scenario(restrict_candidates(base, CandidateMode::gateways_only));
    EXPECT_LE(run_algorithm(both, Algorithm::mtls).total.total, run_algorithm(gw, Algorithm::mtls).total.total);
}

TEST(Scenario, LeoMeoShellUsage) {
    json d = small_leo(R"(["mtls"])");
    d["shells"].push_back({{"preset", "o3b"}, {"storage_ratio", 5.0}});
    d["slots"] = 12;
    const auto dir = scratch_dir("leomeo");
    const RunSummary s = run_scenario(parse_scenario(d), dir);
    ASSERT_FALSE(s.results[0].error);
    const auto rows = csv::read((dir / "mtls_shell_usage.csv").string(), {"shell", "replica_slots", "share", "time_ratio"});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].fields[0], "leo");
    EXPECT_EQ(rows[1].fields[0], "o3b");
    EXPECT_EQ(rows[2].fields[0], "gateways");
    double share = 0.0;
    for (const auto& r : rows) {
        const double ratio = std::stod(r.fields[3]);
        EXPECT_GE(ratio, 0.0);
        EXPECT_LE(ratio, 1.0);
        share += std::stod(r.fields[2]);
    }
    if (s.results[0].schedule.mean_replicas(1) > 0) {
        EXPECT_NEAR(share, 1.0, 1e-9);
    }
    std::filesystem::remove_all(dir);
}

TEST(Scenario, AlgorithmFailureIsRecorded) {
    json d = minimal_geo();
    d["algorithms"] = {"no_replica", "mtls"};
    ScenarioConfig cfg = parse_scenario(d);
    cfg.optimizer.max_iterations = 0;  // rejected when the optimizer runs
    const auto dir = scratch_dir("fail");
    const RunSummary s = run_scenario(cfg, dir);
    EXPECT_FALSE(result_of(s, Algorithm::no_replica).error);
    EXPECT_TRUE(result_of(s, Algorithm::mtls).error);
    EXPECT_TRUE(std::filesystem::exists(dir / "no_replica_costs.csv"));
    EXPECT_FALSE(std::filesystem::exists(dir / "mtls_costs.csv"));
    EXPECT_TRUE(s.metadata["algorithm_errors"].contains("mtls"));
    std::filesystem::remove_all(dir);
}

TEST(Scenario, CompareJoinsBundles) {
    const auto a = scratch_dir("cmp_a"), b = scratch_dir("cmp_b");
    run_scenario(parse_scenario(minimal_geo()), a);
    json d = minimal_geo();
    d["metric"] = "ideal";
    run_scenario(parse_scenario(d), b);
    const auto rows = compare_bundles({a.string(), b.string()});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].algorithm, "no_replica");
    EXPECT_EQ(rows[0].metric, "hop");
    EXPECT_EQ(rows[1].metric, "ideal");
    EXPECT_GT(std::stod(rows[1].total), 4.0 * 100.0);  // two GEO legs exceed 100 ms
    EXPECT_THROW(compare_bundles({"/nonexistent/bundle"}), std::runtime_error);
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Scenario, PredictionPlansFromMovingAverage) {
    json d = small_leo(R"(["mtls", "pch"])");
    d["prediction"] = {{"mode", "moving_average"}, {"window", 2}};
    const Scenario s = build_scenario(parse_scenario(d));
    EXPECT_EQ(s.planning.slots(), s.workload.demand.slots());
    EXPECT_FALSE(uses_prediction(Algorithm::pch));
    EXPECT_TRUE(uses_prediction(Algorithm::mtls));
}
