#pragma once

// Spherical-Earth geometry shared by the constellation and snapshot code.
// All public angles are degrees; trigonometry happens in radians.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace satcdn {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;
inline constexpr double kSiderealDaySec = 86164.0905;
inline constexpr double kSpeedOfLightKmPerMs = 299.792458;
inline constexpr double kGeoAltitudeKm = 35786.0;
inline constexpr double kEarthRotationRadPerSec = 2.0 * std::numbers::pi / kSiderealDaySec;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline double distance_km(Vec3 a, Vec3 b) { return (a - b).norm(); }

// Rotation about the z axis (Earth spin axis) by `angle_rad`.
inline Vec3 rotate_z(Vec3 v, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

inline Vec3 rotate_x(Vec3 v, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

// Earth-fixed Cartesian position of a point at the given geodetic coordinates
// on the spherical Earth, `altitude_km` above the surface.
inline Vec3 earth_fixed_position(double lat_deg, double lon_deg, double altitude_km = 0.0) {
    const double r = kEarthRadiusKm + altitude_km;
    const double lat = deg2rad(lat_deg);
    const double lon = deg2rad(lon_deg);
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

// Inertial position of an Earth-fixed point after `t_seconds` of Earth rotation.
// The inertial and Earth-fixed frames coincide at t = 0.
inline Vec3 earth_fixed_to_inertial(Vec3 p, double t_seconds) {
    return rotate_z(p, kEarthRotationRadPerSec * t_seconds);
}

inline Vec3 inertial_to_earth_fixed(Vec3 p, double t_seconds) {
    return rotate_z(p, -kEarthRotationRadPerSec * t_seconds);
}

// Circular-orbit period from Kepler's third law.
inline double orbital_period_s(double altitude_km) {
    const double a = kEarthRadiusKm + altitude_km;
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / kEarthMuKm3PerS2);
}

// Elevation of `sat` above the local horizon of `ground`, in degrees.
// Both positions must be expressed in the same frame.
inline double elevation_angle(Vec3 sat, Vec3 ground) {
    if (sat.norm() <= kEarthRadiusKm) {
        throw std::invalid_argument("elevation_angle: satellite position is inside the Earth sphere");
    }
    const Vec3 los = sat - ground;
    const Vec3 zenith = (1.0 / ground.norm()) * ground;
    const double up = los.dot(zenith);
    const double horizontal = (los - up * zenith).norm();
    return rad2deg(std::atan2(up, horizontal));
}

inline double normalize_longitude(double lon_deg) {
    double lon = std::fmod(lon_deg + 180.0, 360.0);
    if (lon < 0.0) lon += 360.0;
    return lon - 180.0;
}

// Light-speed delay over a straight segment.
inline double ideal_latency_ms(double km) { return km / kSpeedOfLightKmPerMs; }

}  // namespace satcdn
