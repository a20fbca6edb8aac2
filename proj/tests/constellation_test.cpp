#include <gtest/gtest.h>

#include <cmath>

#include "satcdn/constellation.hpp"

using namespace satcdn;

namespace {

double kepler_period_s(double altitude_km) {
    const double a = 6371.0 + altitude_km;
    return 2.0 * M_PI * std::sqrt(a * a * a / 398600.4418);
}

}  // namespace

TEST(Geometry, PeriodMatchesKeplerAndKnownShells) {
    EXPECT_NEAR(orbital_period_s(550.0), kepler_period_s(550.0), 1e-9);
    EXPECT_NEAR(orbital_period_s(550.0) / 60.0, 95.5, 0.5);
    EXPECT_NEAR(orbital_period_s(8062.0) / 60.0, 287.9, 1.0);
    EXPECT_LT(orbital_period_s(550.0), orbital_period_s(1200.0));
    EXPECT_LT(orbital_period_s(1200.0), orbital_period_s(8062.0));
}

TEST(Geometry, ElevationAtZenithIsNinety) {
    const Vec3 ground = earth_fixed_position(12.0, 34.0);
    const Vec3 sat = earth_fixed_position(12.0, 34.0, 550.0);
    EXPECT_NEAR(elevation_angle(sat, ground), 90.0, 1e-9);
}

TEST(Geometry, ElevationAtAntipodeIsNegative) {
    const Vec3 ground = earth_fixed_position(0.0, 0.0);
    const Vec3 sat = earth_fixed_position(0.0, 180.0, 550.0);
    EXPECT_LT(elevation_angle(sat, ground), 0.0);
}

TEST(Geometry, ElevationMatchesSphericalTriangle) {
    const double R = 6371.0, h = 550.0, gamma = 10.0 * M_PI / 180.0;
    const double expected = std::atan2(std::cos(gamma) - R / (R + h), std::sin(gamma)) * 180.0 / M_PI;
    const double got = elevation_angle(earth_fixed_position(0.0, 10.0, h), earth_fixed_position(0.0, 0.0));
    EXPECT_NEAR(got, expected, 1e-6);
}

TEST(Geometry, ElevationRejectsSatelliteInsideEarth) {
    EXPECT_THROW(elevation_angle(earth_fixed_position(0, 0, -10.0), earth_fixed_position(0, 0)), std::invalid_argument);
}

TEST(Geometry, LongitudeNormalization) {
    EXPECT_DOUBLE_EQ(normalize_longitude(180.0), -180.0);
    EXPECT_DOUBLE_EQ(normalize_longitude(190.0), -170.0);
    EXPECT_DOUBLE_EQ(normalize_longitude(-190.0), 170.0);
    EXPECT_DOUBLE_EQ(normalize_longitude(45.0), 45.0);
}

TEST(Constellation, StarlinkPhaseOneHas1584Satellites) {
    const Constellation c = build_shell(presets::starlink_phase1());
    EXPECT_EQ(c.size(), 1584u);
    EXPECT_NEAR(c.period_s(0) / 60.0, 95.5, 0.5);
}

TEST(Constellation, SingleSatelliteStartsAtPhaseZero) {
    ShellSpec s;
    s.orbit_count = 1;
    s.sats_per_orbit = 1;
    s.inclination_deg = 0.0;
    const Constellation c = build_shell(s);
    ASSERT_EQ(c.size(), 1u);
    const Vec3 p = propagate(c, 0.0)[0];
    EXPECT_NEAR(p.x, 6371.0 + 550.0, 1e-9);
    EXPECT_NEAR(p.y, 0.0, 1e-9);
    EXPECT_NEAR(p.z, 0.0, 1e-9);
}

TEST(Constellation, O3bSatellitesAreEighteenDegreesApart) {
    const Constellation c = build_shell(presets::o3b());
    ASSERT_EQ(c.size(), 20u);
    const auto pos = propagate(c, 0.0);
    for (std::size_t j = 0; j < 20; ++j) {
        const Vec3 a = pos[j], b = pos[(j + 1) % 20];
        EXPECT_NEAR(a.z, 0.0, 1e-9);
        const double angle = rad2deg(std::acos(a.dot(b) / (a.norm() * b.norm())));
        EXPECT_NEAR(angle, 18.0, 1e-9);
    }
}

TEST(Constellation, WalkerSpacingAndPhasing) {
    ShellSpec s;
    s.orbit_count = 4;
    s.sats_per_orbit = 6;
    s.phasing_offset = 0.5;
    const Constellation c = build_shell(s);
    for (const auto& sat : c.satellites()) {
        EXPECT_NEAR(sat.raan_rad, sat.id.orbit * M_PI / 2.0, 1e-12);
        EXPECT_NEAR(sat.phase0_rad, (sat.id.index + 0.5 * sat.id.orbit) * 2.0 * M_PI / 6.0, 1e-12);
    }
}

TEST(Constellation, RejectsEmptyShell) {
    ShellSpec s;
    s.orbit_count = 0;
    EXPECT_THROW(build_shell(s), std::invalid_argument);
    s.orbit_count = 1;
    s.sats_per_orbit = 0;
    EXPECT_THROW(build_shell(s), std::invalid_argument);
}

TEST(Constellation, PropagationIsPeriodic) {
    const Constellation c = build_shell(presets::starlink_phase1());
    const auto p0 = propagate(c, 0.0);
    const auto p1 = propagate(c, c.period_s(0));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT(distance_km(p0[i], p1[i]), 1e-6);
}

TEST(Constellation, PropagateRejectsNegativeTime) {
    EXPECT_THROW(propagate(build_shell(presets::o3b()), -1.0), std::invalid_argument);
}

TEST(Constellation, GeostationaryIsFixedOverTheGround) {
    const Constellation c = build_shell(presets::viasat());
    const auto p0 = propagate(c, 0.0);
    for (double t : {300.0, 7200.0, 40000.0}) {
        const auto pt = propagate(c, t);
        for (std::size_t i = 0; i < c.size(); ++i) {
            EXPECT_LT(distance_km(inertial_to_earth_fixed(pt[i], t), inertial_to_earth_fixed(p0[i], 0.0)), 1e-6);
        }
    }
}

TEST(Constellation, SatelliteIdsAreUnique) {
    const Constellation c({presets::starlink_phase1(), presets::o3b()});
    std::set<SatelliteId> ids;
    for (const auto& s : c.satellites()) ids.insert(s.id);
    EXPECT_EQ(ids.size(), c.size());
    EXPECT_EQ(c.index_of(1, 0, 3), 1584u + 3u);
    EXPECT_EQ(c.index_of(0, -1, 22), c.index_of(0, 71, 0));
}
