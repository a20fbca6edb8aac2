#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "satcdn/cost.hpp"

namespace satcdn {

struct OptimizerConfig {
    int max_iterations = 50;   // M
    int neighbor_limit = 4;    // k
    std::uint64_t seed = 1;
    double relative_tolerance = 1e-9;
    // Empty means the metric-dependent default grid.
    std::vector<double> starfront_thresholds;
    double slot_seconds = 300.0;
    double pch_intra_period_s = 258.0;
    std::optional<double> pch_inter_period_s;  // default 4x intra

    void validate_local_search() const {
        if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
        if (neighbor_limit < 1) throw std::invalid_argument("neighbor_limit must be >= 1");
    }

    void validate_pch() const {
        if (!(slot_seconds > 0.0)) throw std::invalid_argument("slot_seconds must be > 0");
        if (!(pch_intra_period_s > 0.0)) throw std::invalid_argument("PCH intra-orbit period must be > 0");
        if (pch_inter_period_s && !(*pch_inter_period_s > 0.0)) {
            throw std::invalid_argument("PCH inter-orbit period must be > 0");
        }
    }

    void validate() const {
        validate_local_search();
        validate_pch();
    }
};

struct OptimizerStats {
    int iterations = 0;
    // Objective before the first iteration, then after each accepted iteration.
    std::vector<double> iteration_costs;
    // MTLS nearby-set DP transitions.
    std::uint64_t dp_relaxations = 0;
    // MTOLS orbit-selection and replica-selection DP transitions.
    std::uint64_t orbit_relaxations = 0;
    std::uint64_t replica_relaxations = 0;
    // StarFront: chosen threshold and users that no candidate could satisfy.
    std::optional<double> chosen_threshold;
    std::uint64_t unsatisfied_users = 0;

    OptimizerStats& operator+=(const OptimizerStats& o) {
        iterations += o.iterations;
        dp_relaxations += o.dp_relaxations;
        orbit_relaxations += o.orbit_relaxations;
        replica_relaxations += o.replica_relaxations;
        unsatisfied_users += o.unsatisfied_users;
        if (!chosen_threshold) chosen_threshold = o.chosen_threshold;
        return *this;
    }
};

// Single-content view of the placement problem, which is all the optimizers
// see. Users that no site can reach in a slot are dropped from that slot's
// demand: they cost +inf under every schedule and would mask all comparisons.
class ContentProblem {
public:
    ContentProblem(const DistanceOracle& oracle, std::vector<std::vector<double>> demand,
                   std::vector<double> storage, double alpha, std::size_t content = 0)
        : oracle_(&oracle), demand_(std::move(demand)), storage_(std::move(storage)), alpha_(alpha), content_(content) {
        if (static_cast<int>(demand_.size()) > oracle.slots()) {
            throw std::invalid_argument("demand spans more slots than the distance oracle");
        }
        allowed_.assign(oracle.site_count(), 1);
        for (std::size_t o = 0; o < oracle.sites().origin_count(); ++o) allowed_[o] = 0;
        active_.resize(demand_.size());
        for (std::size_t i = 0; i < demand_.size(); ++i) {
            const int t = static_cast<int>(i) + 1;
            for (std::size_t u = 0; u < demand_[i].size(); ++u) {
                if (demand_[i][u] <= 0.0) continue;
                const float* row = oracle.user_row(t, u);
                bool reachable = false;
                for (std::size_t s = 0; s < oracle.site_count() && !reachable; ++s) {
                    reachable = row[s] < std::numeric_limits<float>::infinity();
                }
                if (reachable) {
                    active_[i].push_back(static_cast<int>(u));
                } else {
                    demand_[i][u] = 0.0;
                    ++unreachable_;
                }
            }
        }
    }

    const DistanceOracle& oracle() const { return *oracle_; }
    const SiteTable& sites() const { return oracle_->sites(); }
    int slots() const { return static_cast<int>(demand_.size()); }
    double alpha() const { return alpha_; }
    std::size_t content() const { return content_; }

    const std::vector<double>& demand(int t) const { return demand_[static_cast<std::size_t>(t - 1)]; }
    const std::vector<std::vector<double>>& demand() const { return demand_; }
    // Users with positive, servable demand at slot t.
    const std::vector<int>& active_users(int t) const { return active_[static_cast<std::size_t>(t - 1)]; }
    const std::vector<double>& storage() const { return storage_; }
    double storage(int site) const { return storage_[static_cast<std::size_t>(site)]; }
    std::size_t unreachable_demand_entries() const { return unreachable_; }

    bool allowed(int site) const { return allowed_[static_cast<std::size_t>(site)] != 0; }
    void disallow(int site) { allowed_[static_cast<std::size_t>(site)] = 0; }

    CostBreakdown evaluate(const std::vector<SiteSet>& sets) const {
        return content_cost(*oracle_, demand_, storage_, alpha_, sets, content_);
    }

    std::vector<SiteSet> origin_only() const {
        return std::vector<SiteSet>(demand_.size(), origin_set(sites().origin_count()));
    }

private:
    const DistanceOracle* oracle_;
    std::vector<std::vector<double>> demand_;
    std::vector<double> storage_;
    double alpha_;
    std::size_t content_;
    std::vector<char> allowed_;
    std::vector<std::vector<int>> active_;
    std::size_t unreachable_ = 0;
};

inline ContentProblem make_content_problem(const DistanceOracle& oracle, const DemandMatrix& demand,
                                           const ContentCatalog& catalog, const CostParams& params,
                                           std::size_t content) {
    return ContentProblem(oracle, content_demand(demand, content, oracle.slots()),
                          storage_per_site(oracle.sites(), params, catalog.size_mb(content)), params.alpha, content);
}

// True when `candidate` improves on `incumbent` by more than the relative tolerance.
inline bool improves(double candidate, double incumbent, double rel_tol) {
    if (incumbent == kInf) return candidate < kInf;
    return candidate < incumbent - rel_tol * std::abs(incumbent);
}

}  // namespace satcdn
