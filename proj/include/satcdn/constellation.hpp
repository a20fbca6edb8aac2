#pragma once

// Walker-style circular-orbit shells and their positions over time.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "satcdn/geometry.hpp"

namespace satcdn {

struct ShellSpec {
    std::string name = "shell";
    int orbit_count = 1;     // P
    int sats_per_orbit = 1;  // Q
    double altitude_km = 550.0;
    double inclination_deg = 53.0;
    // Fraction of the in-orbit spacing applied between adjacent orbit planes.
    double phasing_offset = 0.0;
    double min_elevation_deg = 10.0;
    bool isl_enabled = true;
    // Satellite storage ratio for this shell (gamma).
    double storage_ratio = 10.0;
    // Non-empty only for geostationary shells placed at explicit longitudes;
    // then orbit_count must be 1 and sats_per_orbit equals the list size.
    std::vector<double> fixed_longitudes_deg;

    std::size_t satellite_count() const {
        return static_cast<std::size_t>(orbit_count) * static_cast<std::size_t>(sats_per_orbit);
    }

    bool geostationary() const {
        return !fixed_longitudes_deg.empty() ||
               (std::abs(altitude_km - kGeoAltitudeKm) < 1.0 && inclination_deg == 0.0);
    }

    void validate() const {
        auto fail = [this](const std::string& what) {
            throw std::invalid_argument("shell '" + name + "': " + what);
        };
        if (orbit_count < 1) fail("orbit_count must be >= 1");
        if (sats_per_orbit < 1) fail("sats_per_orbit must be >= 1");
        if (!(altitude_km > 0.0)) fail("altitude_km must be > 0");
        if (inclination_deg < 0.0 || inclination_deg > 180.0) fail("inclination_deg must be in [0, 180]");
        if (phasing_offset < 0.0 || phasing_offset >= 1.0) fail("phasing_offset must be in [0, 1)");
        if (min_elevation_deg < 0.0 || min_elevation_deg >= 90.0) fail("min_elevation_deg must be in [0, 90)");
        if (storage_ratio < 0.0) fail("storage_ratio must be >= 0");
        if (!fixed_longitudes_deg.empty()) {
            if (orbit_count != 1 || static_cast<std::size_t>(sats_per_orbit) != fixed_longitudes_deg.size()) {
                fail("fixed longitudes require orbit_count = 1 and sats_per_orbit = number of longitudes");
            }
        }
    }
};

namespace presets {

inline ShellSpec starlink_phase1() {
    ShellSpec s;
    s.name = "starlink";
    s.orbit_count = 72;
    s.sats_per_orbit = 22;
    s.altitude_km = 550.0;
    s.inclination_deg = 53.0;
    s.storage_ratio = 10.0;
    return s;
}

inline ShellSpec o3b() {
    ShellSpec s;
    s.name = "o3b";
    s.orbit_count = 1;
    s.sats_per_orbit = 20;
    s.altitude_km = 8062.0;
    s.inclination_deg = 0.0;
    s.isl_enabled = false;
    s.storage_ratio = 10.0;
    return s;
}

inline ShellSpec viasat() {
    ShellSpec s;
    s.name = "viasat";
    s.orbit_count = 1;
    s.sats_per_orbit = 4;
    s.altitude_km = kGeoAltitudeKm;
    s.inclination_deg = 0.0;
    s.isl_enabled = false;
    s.storage_ratio = 10.0;
    s.fixed_longitudes_deg = {-130.0, -105.0, -80.0, -55.0};
    return s;
}

}  // namespace presets

struct SatelliteId {
    int shell = 0;
    int orbit = 0;  // i in 0..P-1
    int index = 0;  // j in 0..Q-1

    friend bool operator==(const SatelliteId&, const SatelliteId&) = default;
    friend auto operator<=>(const SatelliteId&, const SatelliteId&) = default;
};

inline std::string to_string(const SatelliteId& id) {
    return "sat:" + std::to_string(id.shell) + ":" + std::to_string(id.orbit) + ":" + std::to_string(id.index);
}

struct Satellite {
    SatelliteId id;
    double raan_rad = 0.0;
    double phase0_rad = 0.0;  // argument of latitude at t = 0
};

// One or more shells flattened into a single satellite list. Satellites are
// ordered by (shell, orbit, index), which is also their node order in snapshots.
class Constellation {
public:
    Constellation() = default;

    explicit Constellation(std::vector<ShellSpec> shells) : shells_(std::move(shells)) {
        for (std::size_t s = 0; s < shells_.size(); ++s) {
            const ShellSpec& spec = shells_[s];
            spec.validate();
            shell_offsets_.push_back(sats_.size());
            periods_.push_back(orbital_period_s(spec.altitude_km));
            const double plane_step = 2.0 * std::numbers::pi / spec.orbit_count;
            const double slot_step = 2.0 * std::numbers::pi / spec.sats_per_orbit;
            for (int i = 0; i < spec.orbit_count; ++i) {
                for (int j = 0; j < spec.sats_per_orbit; ++j) {
                    Satellite sat;
                    sat.id = {static_cast<int>(s), i, j};
                    if (!spec.fixed_longitudes_deg.empty()) {
                        sat.raan_rad = 0.0;
                        sat.phase0_rad = deg2rad(spec.fixed_longitudes_deg[static_cast<std::size_t>(j)]);
                    } else {
                        sat.raan_rad = i * plane_step;
                        sat.phase0_rad = j * slot_step + i * spec.phasing_offset * slot_step;
                    }
                    sats_.push_back(sat);
                }
            }
        }
        shell_offsets_.push_back(sats_.size());
    }

    const std::vector<ShellSpec>& shells() const { return shells_; }
    const std::vector<Satellite>& satellites() const { return sats_; }
    std::size_t size() const { return sats_.size(); }

    const ShellSpec& shell_of(std::size_t sat) const {
        return shells_[static_cast<std::size_t>(sats_[sat].id.shell)];
    }

    double period_s(std::size_t shell) const { return periods_[shell]; }

    // Flat index of satellite (shell, orbit, index), with orbit and index
    // wrapped into range.
    std::size_t index_of(int shell, int orbit, int index) const {
        const ShellSpec& spec = shells_[static_cast<std::size_t>(shell)];
        const int p = ((orbit % spec.orbit_count) + spec.orbit_count) % spec.orbit_count;
        const int q = ((index % spec.sats_per_orbit) + spec.sats_per_orbit) % spec.sats_per_orbit;
        return shell_offsets_[static_cast<std::size_t>(shell)] +
               static_cast<std::size_t>(p) * static_cast<std::size_t>(spec.sats_per_orbit) +
               static_cast<std::size_t>(q);
    }

    // Inertial position of one satellite at time t.
    Vec3 position(std::size_t sat, double t_seconds) const {
        const Satellite& s = sats_[sat];
        const ShellSpec& spec = shells_[static_cast<std::size_t>(s.id.shell)];
        const double a = kEarthRadiusKm + spec.altitude_km;
        if (spec.geostationary()) {
            const Vec3 fixed{a * std::cos(s.raan_rad + s.phase0_rad), a * std::sin(s.raan_rad + s.phase0_rad), 0.0};
            return earth_fixed_to_inertial(fixed, t_seconds);
        }
        const double u = s.phase0_rad +
                         2.0 * std::numbers::pi * t_seconds / periods_[static_cast<std::size_t>(s.id.shell)];
        Vec3 p{a * std::cos(u), a * std::sin(u), 0.0};
        p = rotate_x(p, deg2rad(spec.inclination_deg));
        return rotate_z(p, s.raan_rad);
    }

private:
    std::vector<ShellSpec> shells_;
    std::vector<Satellite> sats_;
    std::vector<std::size_t> shell_offsets_;
    std::vector<double> periods_;
};

inline Constellation build_shell(const ShellSpec& spec) { return Constellation({spec}); }

// Inertial positions of every satellite at `t_seconds`.
inline std::vector<Vec3> propagate(const Constellation& c, double t_seconds) {
    if (t_seconds < 0.0) throw std::invalid_argument("propagate: t_seconds must be >= 0");
    std::vector<Vec3> out;
    out.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.position(i, t_seconds));
    return out;
}

}  // namespace satcdn
