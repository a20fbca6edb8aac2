#include <gtest/gtest.h>

#include <set>

#include "satcdn/snapshot.hpp"

using namespace satcdn;

namespace {

std::set<std::tuple<NodeId, NodeId, LinkKind>> edge_set(const SnapshotGraph& g) {
    std::set<std::tuple<NodeId, NodeId, LinkKind>> out;
    for (const Link& l : g.links) out.emplace(l.a, l.b, l.kind);
    return out;
}

}  // namespace

TEST(Snapshot, StarlinkIslDegreeIsFour) {
    const NetworkLayout layout(build_shell(presets::starlink_phase1()), {});
    const SnapshotGraph g = snapshot(layout, 1);
    std::vector<int> degree(static_cast<std::size_t>(layout.node_count()), 0);
    for (const Link& l : g.links) {
        ASSERT_EQ(l.kind, LinkKind::inter_satellite);
        ++degree[static_cast<std::size_t>(l.a)];
        ++degree[static_cast<std::size_t>(l.b)];
    }
    for (int s = 0; s < layout.satellite_count(); ++s) EXPECT_EQ(degree[static_cast<std::size_t>(s)], 4);
}

TEST(Snapshot, SingleGeoSatelliteGivesOneEdge) {
    ShellSpec geo = presets::viasat();
    geo.sats_per_orbit = 1;
    geo.fixed_longitudes_deg = {-100.0};
    const NetworkLayout layout(build_shell(geo), {GroundNode("u", GroundKind::user_region, 10.0, -95.0)});
    for (int t : {1, 7, 40}) {
        const SnapshotGraph g = snapshot(layout, t);
        ASSERT_EQ(g.links.size(), 1u);
        EXPECT_EQ(g.links[0].kind, LinkKind::ground_satellite);
    }
}

TEST(Snapshot, VisibilityMatchesBruteForce) {
    ShellSpec s;
    s.orbit_count = 2;
    s.sats_per_orbit = 2;
    s.inclination_deg = 30.0;
    s.isl_enabled = false;
    std::vector<GroundNode> ground;
    for (int lat = -40; lat <= 40; lat += 20)
        for (int lon = -180; lon < 180; lon += 30)
            ground.emplace_back("g" + std::to_string(lat) + "_" + std::to_string(lon), GroundKind::user_region, lat, lon);
    const NetworkLayout layout(build_shell(s), ground);
    SnapshotOptions opt;
    opt.slot_seconds = 300.0;
    for (int t = 1; t <= 12; ++t) {
        const SnapshotGraph g = snapshot(layout, t, opt);
        const double time = opt.time_of_slot(t);
        const auto sats = propagate(layout.constellation(), time);
        std::set<std::tuple<NodeId, NodeId, LinkKind>> expected;
        for (std::size_t gi = 0; gi < ground.size(); ++gi) {
            const Vec3 gp = earth_fixed_to_inertial(ground[gi].earth_fixed(), time);
            for (std::size_t si = 0; si < sats.size(); ++si) {
                const Vec3 los = sats[si] - gp;
                const double elev = 90.0 - std::acos(los.dot(gp) / (los.norm() * gp.norm())) * 180.0 / M_PI;
                if (elev >= s.min_elevation_deg) {
                    expected.emplace(static_cast<NodeId>(si), layout.ground_node(gi), LinkKind::ground_satellite);
                }
            }
        }
        EXPECT_EQ(edge_set(g), expected) << "slot " << t;
    }
}

TEST(Snapshot, TinyShellCollapsesDuplicateIsls) {
    ShellSpec s;
    s.orbit_count = 2;
    s.sats_per_orbit = 2;
    const SnapshotGraph g = snapshot(NetworkLayout(build_shell(s), {}), 1);
    EXPECT_EQ(g.links.size(), 4u);
    ShellSpec one;
    one.orbit_count = 1;
    one.sats_per_orbit = 1;
    EXPECT_TRUE(snapshot(NetworkLayout(build_shell(one), {}), 1).links.empty());
}

TEST(Snapshot, DeterministicAndIslTimeInvariant) {
    const NetworkLayout layout(build_shell(presets::starlink_phase1()),
                               {GroundNode("u", GroundKind::user_region, 40.0, -100.0),
                                GroundNode("gw", GroundKind::gateway, 35.0, -90.0),
                                GroundNode("o", GroundKind::origin, 39.0, -77.0)});
    const auto a = snapshot(layout, 3);
    const auto b = snapshot(layout, 3);
    EXPECT_EQ(edge_set(a), edge_set(b));
    auto isl = [](const SnapshotGraph& g) {
        std::set<std::pair<NodeId, NodeId>> out;
        for (const Link& l : g.links)
            if (l.kind == LinkKind::inter_satellite) out.emplace(l.a, l.b);
        return out;
    };
    EXPECT_EQ(isl(a), isl(snapshot(layout, 17)));
}

TEST(Snapshot, WeightsArePositiveAndHopIsOne) {
    const LatencySampler sampler = LatencySampler::lognormal(30.0, 0.4, 7);
    SnapshotOptions opt;
    opt.sampler = &sampler;
    const NetworkLayout layout(build_shell(presets::starlink_phase1()),
                               {GroundNode("u", GroundKind::user_region, 40.0, -100.0),
                                GroundNode("gw", GroundKind::gateway, 35.0, -90.0),
                                GroundNode("o", GroundKind::origin, 39.0, -77.0)});
    const auto g = snapshot(layout, 2, opt);
    bool saw_terrestrial = false;
    for (const Link& l : g.links) {
        EXPECT_EQ(l.weight(Metric::hop_count), 1.0);
        EXPECT_GT(l.weight(Metric::ideal_latency), 0.0);
        EXPECT_GT(l.weight(Metric::sampled_latency), 0.0);
        EXPECT_EQ(l.sampled_latency_ms.has_value(), l.kind == LinkKind::ground_satellite);
        saw_terrestrial |= l.kind == LinkKind::terrestrial;
    }
    EXPECT_TRUE(saw_terrestrial);
    const auto again = snapshot(layout, 2, opt);
    for (std::size_t i = 0; i < g.links.size(); ++i) EXPECT_EQ(g.links[i].sampled_latency_ms, again.links[i].sampled_latency_ms);
}

TEST(Snapshot, IdealLatencyIsDistanceOverLightSpeed) {
    const NetworkLayout layout(build_shell(presets::starlink_phase1()), {});
    const auto g = snapshot(layout, 1);
    const auto pos = propagate(layout.constellation(), 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
        const Link& l = g.links[i];
        EXPECT_NEAR(l.ideal_latency_ms,
                    distance_km(pos[static_cast<std::size_t>(l.a)], pos[static_cast<std::size_t>(l.b)]) / 299.792458, 1e-9);
    }
}

TEST(Snapshot, SampledLatencyDrawsFromSamples) {
    const LatencySampler sampler = LatencySampler::from_samples({21.0, 33.0, 48.0}, 3);
    EXPECT_FALSE(sampler.uses_fallback());
    for (int slot = 1; slot < 20; ++slot) {
        const double v = sampler.sample(slot, 1, 2);
        EXPECT_TRUE(v == 21.0 || v == 33.0 || v == 48.0);
        EXPECT_EQ(v, sampler.sample(slot, 2, 1));
    }
    EXPECT_THROW(LatencySampler::from_samples({}, 1), std::invalid_argument);
}

TEST(Snapshot, WarnsForUncoveredUser) {
    ShellSpec geo = presets::viasat();
    geo.sats_per_orbit = 1;
    geo.fixed_longitudes_deg = {-100.0};
    const NetworkLayout layout(build_shell(geo), {GroundNode("far", GroundKind::user_region, 0.0, 80.0)});
    const auto g = snapshot(layout, 1);
    EXPECT_TRUE(g.links.empty());
    ASSERT_EQ(g.warnings.size(), 1u);
}

TEST(Snapshot, OriginSatelliteLinksOnlyWhenEnabled) {
    ShellSpec geo = presets::viasat();
    const NetworkLayout layout(build_shell(geo), {GroundNode("o", GroundKind::origin, 39.0, -77.0)});
    EXPECT_TRUE(snapshot(layout, 1).links.empty());
    SnapshotOptions opt;
    opt.origin_satellite_links = true;
    EXPECT_FALSE(snapshot(layout, 1, opt).links.empty());
}

TEST(Snapshot, GroundNodeValidation) {
    EXPECT_THROW(GroundNode("x", GroundKind::gateway, 91.0, 0.0), std::invalid_argument);
    EXPECT_DOUBLE_EQ(GroundNode("x", GroundKind::gateway, 0.0, 200.0).longitude_deg, -160.0);
    EXPECT_EQ(parse_metric("hop"), Metric::hop_count);
    EXPECT_EQ(parse_metric("sampled"), Metric::sampled_latency);
    EXPECT_THROW(parse_metric("hops"), std::invalid_argument);
}
