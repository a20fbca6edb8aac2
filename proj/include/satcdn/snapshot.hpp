#pragma once

// Per-slot network graphs G_t: +grid inter-satellite links, ground-satellite
// visibility links and terrestrial origin-gateway links.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "satcdn/constellation.hpp"
#include "satcdn/geometry.hpp"

namespace satcdn {

using NodeId = int;

enum class GroundKind { user_region, gateway, origin };
enum class NodeKind { satellite, user_region, gateway, origin };
enum class LinkKind { inter_satellite, ground_satellite, terrestrial };
enum class Metric { hop_count, ideal_latency, sampled_latency };

inline std::string to_string(Metric m) {
    switch (m) {
        case Metric::hop_count: return "hop";
        case Metric::ideal_latency: return "ideal";
        case Metric::sampled_latency: return "sampled";
    }
    return "?";
}

inline Metric parse_metric(const std::string& s) {
    if (s == "hop" || s == "hop_count") return Metric::hop_count;
    if (s == "ideal" || s == "ideal_latency") return Metric::ideal_latency;
    if (s == "sampled" || s == "sampled_latency") return Metric::sampled_latency;
    throw std::invalid_argument("unknown metric '" + s + "' (expected hop, ideal or sampled)");
}

inline std::string to_string(GroundKind k) {
    switch (k) {
        case GroundKind::user_region: return "user_region";
        case GroundKind::gateway: return "gateway";
        case GroundKind::origin: return "origin";
    }
    return "?";
}

struct GroundNode {
    std::string id;
    GroundKind kind = GroundKind::user_region;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;

    GroundNode() = default;
    GroundNode(std::string id_, GroundKind kind_, double lat, double lon)
        : id(std::move(id_)), kind(kind_), latitude_deg(lat), longitude_deg(normalize_longitude(lon)) {
        if (std::abs(lat) > 90.0) throw std::invalid_argument("ground node '" + id + "': |latitude| > 90");
    }

    Vec3 earth_fixed() const { return earth_fixed_position(latitude_deg, longitude_deg); }
};

// Minimum delay assigned to any link so that every edge weight stays positive.
inline constexpr double kMinLinkLatencyMs = 1e-3;

// Ground-satellite latency samples. With a sample list, each (slot, link) draws
// one measured value; without one, a lognormal fallback is used. Draws are a
// pure function of (seed, slot, endpoints).
class LatencySampler {
public:
    static LatencySampler from_samples(std::vector<double> samples, std::uint64_t seed) {
        if (samples.empty()) throw std::invalid_argument("latency sample list is empty");
        for (double v : samples) {
            if (!(v > 0.0)) throw std::invalid_argument("latency samples must be positive");
        }
        LatencySampler s;
        s.samples_ = std::move(samples);
        s.seed_ = seed;
        return s;
    }

    static LatencySampler lognormal(double median_ms, double sigma, std::uint64_t seed) {
        if (!(median_ms > 0.0) || !(sigma >= 0.0)) throw std::invalid_argument("invalid lognormal parameters");
        LatencySampler s;
        s.median_ms_ = median_ms;
        s.sigma_ = sigma;
        s.seed_ = seed;
        return s;
    }

    bool uses_fallback() const { return samples_.empty(); }
    double fallback_median_ms() const { return median_ms_; }
    double fallback_sigma() const { return sigma_; }

    double sample(int slot, NodeId a, NodeId b) const {
        if (a > b) std::swap(a, b);
        std::uint64_t h = mix(seed_ ^ 0x5851f42d4c957f2dULL);
        h = mix(h ^ static_cast<std::uint64_t>(slot));
        h = mix(h ^ (static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint32_t>(b)));
        if (!samples_.empty()) return samples_[h % samples_.size()];
        std::mt19937_64 rng(h);
        std::lognormal_distribution<double> dist(std::log(median_ms_), sigma_);
        return std::max(dist(rng), kMinLinkLatencyMs);
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::vector<double> samples_;
    double median_ms_ = 25.0;
    double sigma_ = 0.5;
    std::uint64_t seed_ = 0;
};

struct Link {
    NodeId a = 0;
    NodeId b = 0;
    LinkKind kind = LinkKind::inter_satellite;
    double ideal_latency_ms = kMinLinkLatencyMs;
    std::optional<double> sampled_latency_ms;  // ground-satellite links only

    double weight(Metric m) const {
        switch (m) {
            case Metric::hop_count: return 1.0;
            case Metric::ideal_latency: return ideal_latency_ms;
            case Metric::sampled_latency: return sampled_latency_ms.value_or(ideal_latency_ms);
        }
        return 1.0;
    }
};

struct SnapshotGraph {
    int slot = 1;
    double time_s = 0.0;
    int node_count = 0;
    std::vector<Link> links;
    std::vector<std::string> warnings;

    // Adjacency as (neighbor, link index) pairs.
    std::vector<std::vector<std::pair<NodeId, int>>> adjacency() const {
        std::vector<std::vector<std::pair<NodeId, int>>> adj(static_cast<std::size_t>(node_count));
        for (std::size_t e = 0; e < links.size(); ++e) {
            adj[static_cast<std::size_t>(links[e].a)].emplace_back(links[e].b, static_cast<int>(e));
            adj[static_cast<std::size_t>(links[e].b)].emplace_back(links[e].a, static_cast<int>(e));
        }
        return adj;
    }

    std::size_t degree(NodeId n, std::optional<LinkKind> kind = std::nullopt) const {
        return static_cast<std::size_t>(std::count_if(links.begin(), links.end(), [&](const Link& l) {
            return (l.a == n || l.b == n) && (!kind || l.kind == *kind);
        }));
    }
};

// Node numbering shared by every snapshot of one network: satellites first (in
// constellation order), then ground nodes in the order given.
class NetworkLayout {
public:
    NetworkLayout(Constellation constellation, std::vector<GroundNode> ground)
        : constellation_(std::move(constellation)), ground_(std::move(ground)) {}

    const Constellation& constellation() const { return constellation_; }
    const std::vector<GroundNode>& ground() const { return ground_; }

    int node_count() const { return static_cast<int>(constellation_.size() + ground_.size()); }
    int satellite_count() const { return static_cast<int>(constellation_.size()); }
    NodeId ground_node(std::size_t g) const { return satellite_count() + static_cast<int>(g); }

    bool is_satellite(NodeId n) const { return n < satellite_count(); }

    NodeKind kind(NodeId n) const {
        if (is_satellite(n)) return NodeKind::satellite;
        switch (ground_[static_cast<std::size_t>(n - satellite_count())].kind) {
            case GroundKind::user_region: return NodeKind::user_region;
            case GroundKind::gateway: return NodeKind::gateway;
            case GroundKind::origin: return NodeKind::origin;
        }
        return NodeKind::user_region;
    }

    std::string name(NodeId n) const {
        if (is_satellite(n)) return to_string(constellation_.satellites()[static_cast<std::size_t>(n)].id);
        return ground_[static_cast<std::size_t>(n - satellite_count())].id;
    }

    const GroundNode& ground_of(NodeId n) const { return ground_[static_cast<std::size_t>(n - satellite_count())]; }

private:
    Constellation constellation_;
    std::vector<GroundNode> ground_;
};

struct SnapshotOptions {
    double slot_seconds = 300.0;
    double epoch_offset_s = 0.0;
    // Origin <-> gateway links through the terrestrial Internet.
    bool terrestrial_links = true;
    // Let origin nodes talk to satellites directly (used when no gateways exist).
    bool origin_satellite_links = false;
    const LatencySampler* sampler = nullptr;

    double time_of_slot(int slot) const { return epoch_offset_s + (slot - 1) * slot_seconds; }
};

inline SnapshotGraph snapshot(const NetworkLayout& layout, int slot, const SnapshotOptions& opt = {}) {
    if (slot < 1) throw std::invalid_argument("snapshot: slots are 1-based");
    const Constellation& c = layout.constellation();
    SnapshotGraph g;
    g.slot = slot;
    g.time_s = opt.time_of_slot(slot);
    g.node_count = layout.node_count();

    const std::vector<Vec3> sat_pos = propagate(c, std::max(0.0, g.time_s));

    auto add_link = [&](NodeId a, NodeId b, LinkKind kind, double km) {
        Link l;
        l.a = std::min(a, b);
        l.b = std::max(a, b);
        l.kind = kind;
        l.ideal_latency_ms = std::max(ideal_latency_ms(km), kMinLinkLatencyMs);
        if (kind == LinkKind::ground_satellite && opt.sampler != nullptr) {
            l.sampled_latency_ms = opt.sampler->sample(slot, l.a, l.b);
        }
        g.links.push_back(l);
    };

    // +grid ISLs with torus wrap-around; duplicate pairs collapse for tiny shells.
    for (std::size_t s = 0; s < c.shells().size(); ++s) {
        const ShellSpec& spec = c.shells()[s];
        if (!spec.isl_enabled) continue;
        std::set<std::pair<NodeId, NodeId>> seen;
        for (int i = 0; i < spec.orbit_count; ++i) {
            for (int j = 0; j < spec.sats_per_orbit; ++j) {
                const auto self = static_cast<NodeId>(c.index_of(static_cast<int>(s), i, j));
                const NodeId nbrs[2] = {static_cast<NodeId>(c.index_of(static_cast<int>(s), i, j + 1)),
                                        static_cast<NodeId>(c.index_of(static_cast<int>(s), i + 1, j))};
                for (NodeId n : nbrs) {
                    if (n == self) continue;
                    if (!seen.emplace(std::min(self, n), std::max(self, n)).second) continue;
                    add_link(self, n, LinkKind::inter_satellite,
                             distance_km(sat_pos[static_cast<std::size_t>(self)], sat_pos[static_cast<std::size_t>(n)]));
                }
            }
        }
    }

    const auto& ground = layout.ground();
    std::vector<Vec3> ground_pos;
    ground_pos.reserve(ground.size());
    for (const auto& gn : ground) ground_pos.push_back(earth_fixed_to_inertial(gn.earth_fixed(), g.time_s));

    for (std::size_t gi = 0; gi < ground.size(); ++gi) {
        if (ground[gi].kind == GroundKind::origin && !opt.origin_satellite_links) continue;
        const NodeId gnode = layout.ground_node(gi);
        for (std::size_t si = 0; si < c.size(); ++si) {
            const double elev = elevation_angle(sat_pos[si], ground_pos[gi]);
            if (elev >= c.shell_of(si).min_elevation_deg) {
                add_link(static_cast<NodeId>(si), gnode, LinkKind::ground_satellite,
                         distance_km(sat_pos[si], ground_pos[gi]));
            }
        }
    }

    if (opt.terrestrial_links) {
        for (std::size_t oi = 0; oi < ground.size(); ++oi) {
            if (ground[oi].kind != GroundKind::origin) continue;
            for (std::size_t gi = 0; gi < ground.size(); ++gi) {
                if (ground[gi].kind != GroundKind::gateway) continue;
                add_link(layout.ground_node(oi), layout.ground_node(gi), LinkKind::terrestrial,
                         distance_km(ground_pos[oi], ground_pos[gi]));
            }
        }
    }

    std::vector<char> touched(static_cast<std::size_t>(g.node_count), 0);
    for (const Link& l : g.links) {
        touched[static_cast<std::size_t>(l.a)] = 1;
        touched[static_cast<std::size_t>(l.b)] = 1;
    }
    for (std::size_t gi = 0; gi < ground.size(); ++gi) {
        if (ground[gi].kind == GroundKind::user_region && !touched[static_cast<std::size_t>(layout.ground_node(gi))]) {
            g.warnings.push_back("slot " + std::to_string(slot) + ": user '" + ground[gi].id +
                                 "' has no visible satellite");
        }
    }
    return g;
}

inline std::vector<SnapshotGraph> build_snapshots(const NetworkLayout& layout, int slots,
                                                  const SnapshotOptions& opt = {}) {
    std::vector<SnapshotGraph> out;
    out.reserve(static_cast<std::size_t>(std::max(slots, 0)));
    for (int t = 1; t <= slots; ++t) out.push_back(snapshot(layout, t, opt));
    return out;
}

}  // namespace satcdn
