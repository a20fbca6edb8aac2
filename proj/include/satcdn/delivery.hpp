#pragma once

// Request routing against a replica schedule and chunk-level delivery
// simulation: download time = path propagation + size / bottleneck throughput.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "satcdn/cost.hpp"
#include "satcdn/csv.hpp"

namespace satcdn {

enum class RoutingKind { closest, round_robin, weighted_round_robin };

inline std::string to_string(RoutingKind k) {
    switch (k) {
        case RoutingKind::closest: return "closest";
        case RoutingKind::round_robin: return "round_robin";
        case RoutingKind::weighted_round_robin: return "weighted_round_robin";
    }
    return "?";
}

inline RoutingKind parse_routing_kind(const std::string& s) {
    if (s == "closest") return RoutingKind::closest;
    if (s == "round_robin" || s == "rr") return RoutingKind::round_robin;
    if (s == "weighted_round_robin" || s == "wrr") return RoutingKind::weighted_round_robin;
    throw std::invalid_argument("unknown routing policy '" + s + "'");
}

struct RoutingPolicy {
    RoutingKind kind = RoutingKind::closest;
    int fanout = 3;
    // Share of traffic for the closest, second closest, ... replica.
    std::vector<double> weights{4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0};

    static RoutingPolicy closest() { return {RoutingKind::closest, 1, {1.0}}; }
    static RoutingPolicy round_robin(int n = 3) { return {RoutingKind::round_robin, n, std::vector<double>(n, 1.0 / n)}; }
    static RoutingPolicy weighted(std::vector<double> w = {4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0}) {
        return {RoutingKind::weighted_round_robin, static_cast<int>(w.size()), std::move(w)};
    }

    void validate() const {
        if (fanout < 1) throw std::invalid_argument("routing fanout must be >= 1");
        if (kind != RoutingKind::weighted_round_robin) return;
        if (weights.size() != static_cast<std::size_t>(fanout)) {
            throw std::invalid_argument("weighted round robin needs one weight per replica");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0.0) throw std::invalid_argument("routing weights must be nonnegative");
            if (i > 0 && weights[i] > weights[i - 1]) throw std::invalid_argument("routing weights must be non-increasing");
            sum += weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("routing weights must sum to 1");
    }
};

// Per-(user, content) counters of round-robin style policies.
struct RoutingCursor {
    long long requests = 0;
    std::vector<long long> served;  // by proximity rank
};

class RoutingState {
public:
    RoutingCursor& at(std::size_t user, std::size_t content) { return cursors_[{user, content}]; }

private:
    std::map<std::pair<std::size_t, std::size_t>, RoutingCursor> cursors_;
};

struct RouteChoice {
    int site = 0;
    double distance = kInf;
    int rank = 0;
    bool unreachable = false;
};

// Replicas in `set` reachable from user u at slot t, closest first (ties by site index).
inline std::vector<std::pair<double, int>> ranked_replicas(const DistanceOracle& oracle, int t, std::size_t u,
                                                           const SiteSet& set) {
    const float* row = oracle.user_row(t, u);
    std::vector<std::pair<double, int>> out;
    for (int v : set)
        if (row[v] < std::numeric_limits<float>::infinity()) out.emplace_back(row[v], v);
    std::sort(out.begin(), out.end());
    return out;
}

inline RouteChoice route(std::size_t user, const SiteSet& set, int slot, const RoutingPolicy& policy,
                         const DistanceOracle& oracle, RoutingCursor& cursor) {
    const auto ranked = ranked_replicas(oracle, slot, user, set);
    if (ranked.empty()) return {0, kInf, 0, true};
    const std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(policy.fanout));
    std::size_t pick = 0;
    switch (policy.kind) {
        case RoutingKind::closest: break;
        case RoutingKind::round_robin: pick = static_cast<std::size_t>(cursor.requests % static_cast<long long>(n)); break;
        case RoutingKind::weighted_round_robin: {
            // Largest deficit w_i * k - served_i, so every prefix of requests
            // stays within one request of the target shares.
            cursor.served.resize(std::max(cursor.served.size(), static_cast<std::size_t>(policy.fanout)), 0);
            double wsum = 0.0;
            for (std::size_t i = 0; i < n; ++i) wsum += policy.weights[i];
            const double k = static_cast<double>(cursor.requests + 1);
            double best = -kInf;
            for (std::size_t i = 0; i < n; ++i) {
                const double deficit = policy.weights[i] / wsum * k - static_cast<double>(cursor.served[i]);
                if (deficit > best + 1e-12) {
                    best = deficit;
                    pick = i;
                }
            }
            ++cursor.served[pick];
            break;
        }
    }
    ++cursor.requests;
    return {ranked[pick].second, ranked[pick].first, static_cast<int>(pick), false};
}

struct LinkModel {
    double terrestrial_gbps = 20.0;
    double satellite_gbps = 10.0;

    double throughput_gbps(LinkKind k) const { return k == LinkKind::terrestrial ? terrestrial_gbps : satellite_gbps; }

    void validate() const {
        if (!(terrestrial_gbps > 0.0) || !(satellite_gbps > 0.0)) throw std::invalid_argument("link throughput must be > 0");
    }
};

inline double transmission_seconds(double size_mb, double gbps) { return size_mb * 8.0 / (gbps * 1000.0); }

struct DeliveryPath {
    std::vector<int> links;  // link indices into the snapshot
    double propagation_ms = 0.0;
    double bottleneck_gbps = 0.0;
    bool reachable = true;
};

// Path from `from` to `to` in a shortest-path tree rooted at `from`.
inline DeliveryPath trace_path(const SnapshotGraph& g, const ShortestPathTree& tree, NodeId from, NodeId to,
                               const LinkModel& links) {
    DeliveryPath p;
    p.bottleneck_gbps = kInf;
    if (tree.dist[static_cast<std::size_t>(to)] == kInf) {
        p.reachable = false;
        return p;
    }
    NodeId cur = to;
    while (cur != from) {
        const int e = tree.parent_link[static_cast<std::size_t>(cur)];
        const Link& l = g.links[static_cast<std::size_t>(e)];
        p.links.push_back(e);
        p.propagation_ms += l.ideal_latency_ms;
        p.bottleneck_gbps = std::min(p.bottleneck_gbps, links.throughput_gbps(l.kind));
        cur = l.a == cur ? l.b : l.a;
    }
    if (p.links.empty()) p.bottleneck_gbps = links.terrestrial_gbps;
    return p;
}

// Seconds to fetch one chunk; +inf for an unreachable path.
inline double chunk_download_time(const DeliveryPath& path, double chunk_mb) {
    if (!(chunk_mb > 0.0)) throw std::invalid_argument("chunk size must be > 0");
    if (!path.reachable) return kInf;
    return path.propagation_ms / 1000.0 + transmission_seconds(chunk_mb, path.bottleneck_gbps);
}

// Score in [0, 10]: full marks within the playout budget, falling linearly to
// 0 at twice the budget.
struct QoeModel {
    double budget_s = 4.0;

    double score(double download_s) const {
        if (download_s == kInf) return 0.0;
        const double late = std::max(0.0, download_s - budget_s);
        return std::max(0.0, 10.0 - 10.0 * late / budget_s);
    }

    std::string describe() const {
        return "qoe = max(0, 10 - 10 * max(0, download_s - budget_s) / budget_s), budget_s = " + csv::fmt(budget_s);
    }
};

struct DeliveryConfig {
    LinkModel links;
    QoeModel qoe;
    // Size of one request; the content size when unset.
    std::optional<double> chunk_mb;
    // Per-server service rate; requests to one server queue FIFO within a slot.
    std::optional<double> server_capacity_mbps;

    void validate() const {
        links.validate();
        if (!(qoe.budget_s > 0.0)) throw std::invalid_argument("QoE budget must be > 0");
        if (chunk_mb && !(*chunk_mb > 0.0)) throw std::invalid_argument("chunk size must be > 0");
        if (server_capacity_mbps && !(*server_capacity_mbps > 0.0)) throw std::invalid_argument("server capacity must be > 0");
    }
};

struct SlotDelivery {
    int slot = 0;
    long long requests = 0;
    long long unreachable = 0;
    double mean_qoe = 0.0;
    double mean_download_s = 0.0;  // over reachable requests
    double traffic_gb = 0.0;
};

struct ReplicaLoad {
    int slot = 0;
    int site = 0;
    long long requests = 0;
    double volume_mb = 0.0;
};

struct DeliveryReport {
    RoutingPolicy policy;
    std::vector<SlotDelivery> slots;  // slots with at least one request
    std::vector<ReplicaLoad> load;    // sorted by (slot, site)
    // MB carried per link, per reported slot.
    std::vector<std::map<int, double>> link_mb;
    double total_traffic_gb = 0.0;

    double mean_qoe() const {
        double q = 0.0;
        long long n = 0;
        for (const auto& s : slots) {
            q += s.mean_qoe * static_cast<double>(s.requests);
            n += s.requests;
        }
        return n == 0 ? 0.0 : q / static_cast<double>(n);
    }
};

inline long long request_count(double demand) { return demand <= 0.0 ? 0 : std::llround(demand); }

// Routes every request of `demand` (rounded to whole requests) in user, then
// content order. Paths follow the oracle's metric on each snapshot.
inline DeliveryReport simulate_delivery(std::span<const SnapshotGraph> snapshots, const DistanceOracle& oracle,
                                        const ReplicaSchedule& schedule, const DemandMatrix& demand,
                                        const ContentCatalog& catalog, const RoutingPolicy& policy,
                                        const DeliveryConfig& cfg, RoutingState* state = nullptr) {
    policy.validate();
    cfg.validate();
    const int T = std::min({schedule.slots(), demand.slots(), static_cast<int>(snapshots.size()), oracle.slots()});
    if (demand.user_count() != oracle.user_count()) throw std::invalid_argument("demand and oracle disagree on users");
    RoutingState local;
    RoutingState& rs = state ? *state : local;
    DeliveryReport report;
    report.policy = policy;
    const SiteTable& sites = oracle.sites();

    for (int t = 1; t <= T; ++t) {
        const SnapshotGraph& g = snapshots[static_cast<std::size_t>(t - 1)];
        std::optional<WeightedGraph> wg;
        SlotDelivery sd;
        sd.slot = t;
        std::map<int, ReplicaLoad> load;
        std::map<int, double> link_mb;
        std::map<int, double> busy_until;  // per site, seconds into the slot
        double qoe_sum = 0.0, dl_sum = 0.0;
        for (std::size_t u = 0; u < demand.user_count(); ++u) {
            std::optional<ShortestPathTree> tree;
            for (std::size_t c = 0; c < demand.content_count(); ++c) {
                const long long n = request_count(demand.at(t, u, c));
                if (n == 0) continue;
                const double mb = cfg.chunk_mb.value_or(catalog.size_mb(c));
                RoutingCursor& cursor = rs.at(u, c);
                for (long long r = 0; r < n; ++r) {
                    ++sd.requests;
                    const RouteChoice choice = route(u, schedule.at(c, t), t, policy, oracle, cursor);
                    if (choice.unreachable) {
                        ++sd.unreachable;
                        continue;
                    }
                    if (!tree) {
                        if (!wg) wg.emplace(g, oracle.metric());
                        tree = shortest_paths(*wg, oracle.users()[u], oracle.metric() == Metric::hop_count);
                    }
                    const DeliveryPath path =
                        trace_path(g, *tree, oracle.users()[u], sites[static_cast<std::size_t>(choice.site)].node, cfg.links);
                    double dl = chunk_download_time(path, mb);
                    if (cfg.server_capacity_mbps) {
                        const double rate_gbps = std::min(path.bottleneck_gbps, *cfg.server_capacity_mbps / 1000.0);
                        double& busy = busy_until[choice.site];
                        busy += transmission_seconds(mb, rate_gbps);
                        dl = path.propagation_ms / 1000.0 + busy;
                    }
                    qoe_sum += cfg.qoe.score(dl);
                    dl_sum += dl;
                    for (int e : path.links) link_mb[e] += mb;
                    sd.traffic_gb += mb * static_cast<double>(path.links.size()) / 1000.0;
                    ReplicaLoad& l = load[choice.site];
                    l.slot = t;
                    l.site = choice.site;
                    ++l.requests;
                    l.volume_mb += mb;
                }
            }
        }
        if (sd.requests == 0) continue;
        sd.mean_qoe = qoe_sum / static_cast<double>(sd.requests);
        const long long reached = sd.requests - sd.unreachable;
        sd.mean_download_s = reached == 0 ? kInf : dl_sum / static_cast<double>(reached);
        report.total_traffic_gb += sd.traffic_gb;
        report.slots.push_back(sd);
        for (auto& [site, l] : load) report.load.push_back(l);
        report.link_mb.push_back(std::move(link_mb));
    }
    return report;
}

}  // namespace satcdn
