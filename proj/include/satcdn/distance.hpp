#pragma once

// Replica sites (origins + candidates) and per-slot shortest-path distances
// between users, sites and sites.

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satcdn/parallel.hpp"
#include "satcdn/snapshot.hpp"

namespace satcdn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SiteKind { origin, gateway, satellite };

enum class CandidateMode { both, gateways_only, satellites_only };

inline std::string to_string(CandidateMode m) {
    switch (m) {
        case CandidateMode::both: return "both";
        case CandidateMode::gateways_only: return "gateways_only";
        case CandidateMode::satellites_only: return "satellites_only";
    }
    return "?";
}

inline CandidateMode parse_candidate_mode(const std::string& s) {
    if (s == "both") return CandidateMode::both;
    if (s == "gateways_only") return CandidateMode::gateways_only;
    if (s == "satellites_only") return CandidateMode::satellites_only;
    throw std::invalid_argument("unknown candidate mode '" + s + "'");
}

struct Site {
    NodeId node = 0;
    SiteKind kind = SiteKind::satellite;
    int shell = -1;
    int orbit = -1;
    int index = -1;
    // Orbit label used by the orbit-level search. Gateways are static, so each
    // one is its own label.
    int orbit_group = -1;
    std::string name;
};

// Sites are stored origins first, then candidates in node order, so the site
// index order matches node-id order among candidates.
class SiteTable {
public:
    SiteTable() = default;
    SiteTable(std::vector<Site> sites, std::size_t origin_count) : sites_(std::move(sites)), origins_(origin_count) {
        if (origins_ == 0) throw std::invalid_argument("at least one origin site is required");
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            if ((i < origins_) != (sites_[i].kind == SiteKind::origin)) {
                throw std::invalid_argument("origin sites must come first in the site table");
            }
            orbit_groups_ = std::max(orbit_groups_, sites_[i].orbit_group + 1);
        }
    }

    static SiteTable from_layout(const NetworkLayout& layout, CandidateMode mode = CandidateMode::both) {
        std::vector<Site> origins;
        std::vector<Site> candidates;
        const Constellation& c = layout.constellation();
        std::vector<int> shell_orbit_base;
        int orbit_total = 0;
        for (const auto& s : c.shells()) {
            shell_orbit_base.push_back(orbit_total);
            orbit_total += s.orbit_count;
        }
        if (mode != CandidateMode::gateways_only) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                const auto& id = c.satellites()[i].id;
                candidates.push_back({static_cast<NodeId>(i), SiteKind::satellite, id.shell, id.orbit, id.index,
                                      shell_orbit_base[static_cast<std::size_t>(id.shell)] + id.orbit,
                                      to_string(id)});
            }
        }
        for (std::size_t g = 0; g < layout.ground().size(); ++g) {
            const GroundNode& gn = layout.ground()[g];
            const NodeId node = layout.ground_node(g);
            if (gn.kind == GroundKind::origin) {
                origins.push_back({node, SiteKind::origin, -1, -1, -1, -1, gn.id});
            } else if (gn.kind == GroundKind::gateway && mode != CandidateMode::satellites_only) {
                candidates.push_back({node, SiteKind::gateway, -1, -1, -1, orbit_total++, gn.id});
            }
        }
        const std::size_t n_origin = origins.size();
        origins.insert(origins.end(), candidates.begin(), candidates.end());
        return SiteTable(std::move(origins), n_origin);
    }

    std::size_t size() const { return sites_.size(); }
    std::size_t origin_count() const { return origins_; }
    std::size_t candidate_count() const { return sites_.size() - origins_; }
    bool is_origin(std::size_t s) const { return s < origins_; }
    const Site& operator[](std::size_t s) const { return sites_[s]; }
    const std::vector<Site>& sites() const { return sites_; }
    // Number of orbit labels, one per satellite orbit and one per gateway.
    int orbit_group_count() const { return orbit_groups_; }

private:
    std::vector<Site> sites_;
    std::size_t origins_ = 0;
    int orbit_groups_ = 0;
};

// Compressed adjacency with per-metric weights.
struct WeightedGraph {
    std::vector<std::size_t> offsets;
    std::vector<NodeId> targets;
    std::vector<double> weights;
    std::vector<int> link_ids;

    WeightedGraph(const SnapshotGraph& g, Metric m) {
        const auto n = static_cast<std::size_t>(g.node_count);
        std::vector<std::size_t> deg(n, 0);
        for (const Link& l : g.links) {
            ++deg[static_cast<std::size_t>(l.a)];
            ++deg[static_cast<std::size_t>(l.b)];
        }
        offsets.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + deg[i];
        targets.resize(offsets[n]);
        weights.resize(offsets[n]);
        link_ids.resize(offsets[n]);
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (std::size_t e = 0; e < g.links.size(); ++e) {
            const Link& l = g.links[e];
            const double w = l.weight(m);
            for (auto [from, to] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}}) {
                const std::size_t k = fill[static_cast<std::size_t>(from)]++;
                targets[k] = to;
                weights[k] = w;
                link_ids[k] = static_cast<int>(e);
            }
        }
    }

    std::size_t node_count() const { return offsets.size() - 1; }
};

struct ShortestPathTree {
    std::vector<double> dist;
    std::vector<int> parent_link;  // -1 at the source and for unreachable nodes
};

// Single-source shortest paths. Unit weights use BFS; otherwise Dijkstra.
// Among equal-length paths the one found first in adjacency order wins.
inline ShortestPathTree shortest_paths(const WeightedGraph& g, NodeId source, bool unit_weights) {
    const std::size_t n = g.node_count();
    ShortestPathTree tree{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
    tree.dist[static_cast<std::size_t>(source)] = 0.0;
    if (unit_weights) {
        std::vector<NodeId> queue{source};
        queue.reserve(n);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto u = static_cast<std::size_t>(queue[head]);
            for (std::size_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
                const auto v = static_cast<std::size_t>(g.targets[k]);
                if (tree.dist[v] == kInf) {
                    tree.dist[v] = tree.dist[u] + 1.0;
                    tree.parent_link[v] = g.link_ids[k];
                    queue.push_back(g.targets[k]);
                }
            }
        }
        return tree;
    }
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, node] = heap.top();
        heap.pop();
        const auto u = static_cast<std::size_t>(node);
        if (d > tree.dist[u]) continue;
        for (std::size_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
            const auto v = static_cast<std::size_t>(g.targets[k]);
            const double nd = d + g.weights[k];
            if (nd < tree.dist[v]) {
                tree.dist[v] = nd;
                tree.parent_link[v] = g.link_ids[k];
                heap.emplace(nd, g.targets[k]);
            }
        }
    }
    return tree;
}

// Per-slot distances between (user, site) and (site, site) pairs, in metric
// units, stored as float. Slots are 1-based. Disconnected pairs are +inf.
class DistanceOracle {
public:
    DistanceOracle() = default;
    DistanceOracle(Metric metric, SiteTable sites, std::vector<NodeId> users, int slots)
        : metric_(metric), sites_(std::move(sites)), users_(std::move(users)), slots_(slots) {
        const std::size_t s = sites_.size();
        site_site_.assign(static_cast<std::size_t>(slots), std::vector<float>(s * s, kInfF));
        user_site_.assign(static_cast<std::size_t>(slots), std::vector<float>(users_.size() * s, kInfF));
    }

    Metric metric() const { return metric_; }
    int slots() const { return slots_; }
    const SiteTable& sites() const { return sites_; }
    std::size_t site_count() const { return sites_.size(); }
    std::size_t user_count() const { return users_.size(); }
    const std::vector<NodeId>& users() const { return users_; }

    double site_site(int t, std::size_t a, std::size_t b) const { return site_row(t, a)[b]; }
    double user_site(int t, std::size_t u, std::size_t s) const { return user_row(t, u)[s]; }

    const float* site_row(int t, std::size_t a) const { return slot_data(site_site_, t).data() + a * sites_.size(); }
    const float* user_row(int t, std::size_t u) const { return slot_data(user_site_, t).data() + u * sites_.size(); }

    float* mutable_site_row(int t, std::size_t a) { return slot_data(site_site_, t).data() + a * sites_.size(); }
    float* mutable_user_row(int t, std::size_t u) { return slot_data(user_site_, t).data() + u * sites_.size(); }

    // Smallest positive finite user-site distance over all slots; 1 when none exists.
    double c_qmin() const {
        double best = kInf;
        for (const auto& slot : user_site_)
            for (float d : slot)
                if (d > 0.0f && d < kInfF) best = std::min(best, static_cast<double>(d));
        return best == kInf ? 1.0 : best;
    }

private:
    static constexpr float kInfF = std::numeric_limits<float>::infinity();

    template <typename V>
    static auto slot_data(V& v, int t) -> decltype(v[0]) {
        if (t < 1 || static_cast<std::size_t>(t) > v.size()) {
            throw std::out_of_range("distance oracle slot " + std::to_string(t) + " out of range");
        }
        return v[static_cast<std::size_t>(t - 1)];
    }

    Metric metric_ = Metric::hop_count;
    SiteTable sites_;
    std::vector<NodeId> users_;
    int slots_ = 0;
    std::vector<std::vector<float>> site_site_;
    std::vector<std::vector<float>> user_site_;
};

// Runs one single-source search per site and slot. snapshots[i] is slot i+1.
inline DistanceOracle build_distance_oracle(std::span<const SnapshotGraph> snapshots, Metric metric, SiteTable sites,
                                            std::vector<NodeId> users, int threads = 1) {
    if (snapshots.empty()) throw std::invalid_argument("build_distance_oracle: no snapshots");
    DistanceOracle oracle(metric, std::move(sites), std::move(users), static_cast<int>(snapshots.size()));
    const SiteTable& st = oracle.sites();
    parallel_for(snapshots.size(), threads, [&](std::size_t i) {
        const int t = static_cast<int>(i) + 1;
        const WeightedGraph g(snapshots[i], metric);
        for (std::size_t s = 0; s < st.size(); ++s) {
            const ShortestPathTree tree = shortest_paths(g, st[s].node, metric == Metric::hop_count);
            float* row = oracle.mutable_site_row(t, s);
            for (std::size_t b = 0; b < st.size(); ++b) row[b] = static_cast<float>(tree.dist[static_cast<std::size_t>(st[b].node)]);
            for (std::size_t u = 0; u < oracle.user_count(); ++u) {
                oracle.mutable_user_row(t, u)[s] = static_cast<float>(tree.dist[static_cast<std::size_t>(oracle.users()[u])]);
            }
        }
        // Exact symmetry regardless of float rounding along different search orders.
        for (std::size_t a = 0; a < st.size(); ++a) {
            for (std::size_t b = a + 1; b < st.size(); ++b) {
                float& x = oracle.mutable_site_row(t, a)[b];
                float& y = oracle.mutable_site_row(t, b)[a];
                x = y = std::min(x, y);
            }
        }
    });
    return oracle;
}

}  // namespace satcdn
