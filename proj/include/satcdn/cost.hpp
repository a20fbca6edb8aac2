#pragma once

// Query, replication and storage costs of a replica schedule.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satcdn/demand.hpp"
#include "satcdn/distance.hpp"

namespace satcdn {

struct CostParams {
    Metric metric = Metric::hop_count;
    double alpha = 50.0;
    double beta = 1.0;
    // Satellite storage ratio; per-shell values override it when present.
    double gamma = 10.0;
    std::vector<double> shell_gamma;
    double c_qmin = 1.0;

    double gamma_of(int shell) const {
        if (shell >= 0 && static_cast<std::size_t>(shell) < shell_gamma.size()) {
            return shell_gamma[static_cast<std::size_t>(shell)];
        }
        return gamma;
    }

    // Per-MB holding cost of one slot at a site. Origins always hold the
    // content and are not charged.
    double storage_unit(const Site& s) const {
        switch (s.kind) {
            case SiteKind::origin: return 0.0;
            case SiteKind::gateway: return beta * c_qmin;
            case SiteKind::satellite: return gamma_of(s.shell) * c_qmin;
        }
        return 0.0;
    }

    void validate() const {
        if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
        if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
        if (!(gamma >= beta)) throw std::invalid_argument("gamma must be >= beta");
        for (double g : shell_gamma) {
            if (!(g >= beta)) throw std::invalid_argument("every shell gamma must be >= beta");
        }
        if (!(c_qmin > 0.0)) throw std::invalid_argument("c_qmin must be > 0");
    }
};

// Sorted site indices; always contains every origin.
using SiteSet = std::vector<int>;

inline SiteSet origin_set(std::size_t origin_count) {
    SiteSet s(origin_count);
    for (std::size_t i = 0; i < origin_count; ++i) s[i] = static_cast<int>(i);
    return s;
}

inline bool contains(const SiteSet& s, int site) { return std::binary_search(s.begin(), s.end(), site); }

class ReplicaSchedule {
public:
    ReplicaSchedule() = default;
    ReplicaSchedule(std::size_t contents, int slots, std::size_t origin_count)
        : contents_(contents), slots_(slots), sets_(contents * static_cast<std::size_t>(slots), origin_set(origin_count)) {}

    std::size_t contents() const { return contents_; }
    int slots() const { return slots_; }

    const SiteSet& at(std::size_t c, int t) const { return sets_[index(c, t)]; }
    void set(std::size_t c, int t, SiteSet s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        sets_[index(c, t)] = std::move(s);
    }

    // Slot sets 1..T for one content.
    std::vector<SiteSet> content_sets(std::size_t c) const {
        std::vector<SiteSet> out;
        for (int t = 1; t <= slots_; ++t) out.push_back(at(c, t));
        return out;
    }

    void set_content(std::size_t c, const std::vector<SiteSet>& sets) {
        if (sets.size() != static_cast<std::size_t>(slots_)) throw std::invalid_argument("wrong number of slot sets");
        for (int t = 1; t <= slots_; ++t) set(c, t, sets[static_cast<std::size_t>(t - 1)]);
    }

    // Mean number of non-origin replicas per (content, slot).
    double mean_replicas(std::size_t origin_count) const {
        if (sets_.empty()) return 0.0;
        double n = 0.0;
        for (const auto& s : sets_) n += static_cast<double>(s.size() - std::min(s.size(), origin_count));
        return n / static_cast<double>(sets_.size());
    }

    friend bool operator==(const ReplicaSchedule&, const ReplicaSchedule&) = default;

private:
    std::size_t index(std::size_t c, int t) const {
        if (c >= contents_ || t < 1 || t > slots_) throw std::out_of_range("schedule index out of range");
        return c * static_cast<std::size_t>(slots_) + static_cast<std::size_t>(t - 1);
    }

    std::size_t contents_ = 0;
    int slots_ = 0;
    std::vector<SiteSet> sets_;
};

// Throws if any set misses an origin or references a non-site.
inline void validate_schedule(const ReplicaSchedule& s, const SiteTable& sites) {
    for (std::size_t c = 0; c < s.contents(); ++c) {
        for (int t = 1; t <= s.slots(); ++t) {
            const SiteSet& set = s.at(c, t);
            if (!std::is_sorted(set.begin(), set.end()) || std::adjacent_find(set.begin(), set.end()) != set.end()) {
                throw std::logic_error("replica set is not sorted and unique");
            }
            for (std::size_t o = 0; o < sites.origin_count(); ++o) {
                if (!contains(set, static_cast<int>(o))) throw std::logic_error("replica set misses an origin");
            }
            for (int v : set) {
                if (v < 0 || static_cast<std::size_t>(v) >= sites.size()) throw std::logic_error("unknown replica site");
            }
        }
    }
}

struct CostBreakdown {
    double query = 0.0;
    double replication = 0.0;
    double storage = 0.0;
    double total = 0.0;
    // (content, slot) pairs where some demanded user could reach no replica.
    std::vector<std::pair<std::size_t, int>> disconnected;

    CostBreakdown& operator+=(const CostBreakdown& o) {
        query += o.query;
        replication += o.replication;
        storage += o.storage;
        total = query + replication + storage;
        disconnected.insert(disconnected.end(), o.disconnected.begin(), o.disconnected.end());
        return *this;
    }
};

// sum_u demand_u * min_{v in set} dist_t(u, v). Users without demand are skipped.
inline double slot_query_cost(const DistanceOracle& oracle, int t, std::span<const double> demand, const SiteSet& set) {
    double total = 0.0;
    for (std::size_t u = 0; u < demand.size(); ++u) {
        if (demand[u] <= 0.0) continue;
        const float* row = oracle.user_row(t, u);
        double best = kInf;
        for (int v : set) best = std::min(best, static_cast<double>(row[v]));
        total += demand[u] * best;
    }
    return total;
}

// sum_{v in cur} min_{w in prev} dist_t(v, w), without the alpha factor.
inline double slot_replication_distance(const DistanceOracle& oracle, int t, const SiteSet& prev, const SiteSet& cur) {
    double total = 0.0;
    for (int v : cur) {
        if (contains(prev, v)) continue;
        const float* row = oracle.site_row(t, static_cast<std::size_t>(v));
        double best = kInf;
        for (int w : prev) best = std::min(best, static_cast<double>(row[w]));
        total += best;
    }
    return total;
}

inline double slot_storage_cost(const SiteSet& set, std::span<const double> storage_per_site) {
    double total = 0.0;
    for (int v : set) total += storage_per_site[static_cast<std::size_t>(v)];
    return total;
}

// Cost of one content's slot sets 1..T. `demand[t-1]` is the per-user demand
// at slot t and `storage_per_site` already includes the content size.
inline CostBreakdown content_cost(const DistanceOracle& oracle, const std::vector<std::vector<double>>& demand,
                                  std::span<const double> storage_per_site, double alpha,
                                  const std::vector<SiteSet>& sets, std::size_t content = 0) {
    CostBreakdown b;
    SiteSet prev = origin_set(oracle.sites().origin_count());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        const double q = slot_query_cost(oracle, t, demand[i], sets[i]);
        if (q == kInf) b.disconnected.emplace_back(content, t);
        b.query += q;
        b.replication += alpha * slot_replication_distance(oracle, t, prev, sets[i]);
        b.storage += slot_storage_cost(sets[i], storage_per_site);
        prev = sets[i];
    }
    b.total = b.query + b.replication + b.storage;
    return b;
}

inline std::vector<double> storage_per_site(const SiteTable& sites, const CostParams& params, double size_mb) {
    std::vector<double> out(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) out[s] = size_mb * params.storage_unit(sites[s]);
    return out;
}

inline std::vector<std::vector<double>> content_demand(const DemandMatrix& d, std::size_t content, int slots) {
    std::vector<std::vector<double>> out;
    for (int t = 1; t <= slots; ++t) {
        out.push_back(t <= d.slots() ? d.user_vector(t, content) : std::vector<double>(d.user_count(), 0.0));
    }
    return out;
}

inline double query_cost(const ReplicaSchedule& s, const DemandMatrix& d, const DistanceOracle& oracle,
                         std::vector<std::pair<std::size_t, int>>* disconnected = nullptr) {
    if (d.user_count() != oracle.user_count()) throw std::invalid_argument("demand and oracle disagree on users");
    double total = 0.0;
    for (std::size_t c = 0; c < s.contents(); ++c) {
        for (int t = 1; t <= std::min(s.slots(), d.slots()); ++t) {
            const double q = slot_query_cost(oracle, t, d.user_vector(t, c), s.at(c, t));
            if (q == kInf && disconnected) disconnected->emplace_back(c, t);
            total += q;
        }
    }
    return total;
}

inline double replication_cost(const ReplicaSchedule& s, const DistanceOracle& oracle, double alpha) {
    double total = 0.0;
    for (std::size_t c = 0; c < s.contents(); ++c) {
        SiteSet prev = origin_set(oracle.sites().origin_count());
        for (int t = 1; t <= s.slots(); ++t) {
            total += alpha * slot_replication_distance(oracle, t, prev, s.at(c, t));
            prev = s.at(c, t);
        }
    }
    return total;
}

inline double storage_cost(const ReplicaSchedule& s, const ContentCatalog& catalog, const SiteTable& sites,
                           const CostParams& params) {
    double total = 0.0;
    for (std::size_t c = 0; c < s.contents(); ++c) {
        const auto per_site = storage_per_site(sites, params, catalog.size_mb(c));
        for (int t = 1; t <= s.slots(); ++t) total += slot_storage_cost(s.at(c, t), per_site);
    }
    return total;
}

inline CostBreakdown total_cost(const ReplicaSchedule& s, const DemandMatrix& d, const ContentCatalog& catalog,
                                const DistanceOracle& oracle, const CostParams& params) {
    CostBreakdown b;
    b.query = query_cost(s, d, oracle, &b.disconnected);
    b.replication = replication_cost(s, oracle, params.alpha);
    b.storage = storage_cost(s, catalog, oracle.sites(), params);
    b.total = b.query + b.replication + b.storage;
    return b;
}

}  // namespace satcdn
