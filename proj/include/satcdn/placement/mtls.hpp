#pragma once

// Multi-time local search: repeatedly replace every S_t by the best sequence
// of nearby sets (one addition, deletion, or k-nearest replacement per slot)
// found by the nearby-set DP, until no iteration improves the total cost.

#include <algorithm>
#include <numeric>
#include <vector>

#include "satcdn/placement/nearby_dp.hpp"

namespace satcdn {

// The k allowed candidates nearest to `site` at slot t that are not in `base`,
// ties broken by site index. Unreachable candidates are never returned.
inline std::vector<int> nearest_candidates(const ContentProblem& p, int t, int site, const SiteSet& base, int k) {
    const float* row = p.oracle().site_row(t, static_cast<std::size_t>(site));
    std::vector<int> pool;
    for (std::size_t s = p.sites().origin_count(); s < p.sites().size(); ++s) {
        const int v = static_cast<int>(s);
        if (v == site || !p.allowed(v) || contains(base, v)) continue;
        if (row[v] == std::numeric_limits<float>::infinity()) continue;
        pool.push_back(v);
    }
    auto closer = [row](int a, int b) { return row[a] != row[b] ? row[a] < row[b] : a < b; };
    const auto keep = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(k));
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), closer);
    pool.resize(keep);
    return pool;
}

// keep, then additions in site order, deletions, and k-nearest replacements.
inline std::vector<Move> mtls_moves(const ContentProblem& p, int t, const SiteSet& base, int k) {
    std::vector<Move> moves{Move::keep()};
    for (std::size_t s = p.sites().origin_count(); s < p.sites().size(); ++s) {
        const int v = static_cast<int>(s);
        if (p.allowed(v) && !contains(base, v)) moves.push_back(Move::add_site(v));
    }
    for (int y : base)
        if (!p.sites().is_origin(static_cast<std::size_t>(y))) moves.push_back(Move::remove_site(y));
    for (int y : base) {
        if (p.sites().is_origin(static_cast<std::size_t>(y))) continue;
        for (int x : nearest_candidates(p, t, y, base, k)) moves.push_back(Move::swap_site(y, x));
    }
    return moves;
}

// One DP pass around `current`.
inline DpPassResult mtls_dp_pass(const ContentProblem& p, const std::vector<SiteSet>& current, int k) {
    std::vector<std::vector<Move>> moves;
    moves.reserve(current.size());
    for (int t = 1; t <= p.slots(); ++t) moves.push_back(mtls_moves(p, t, current[static_cast<std::size_t>(t - 1)], k));
    return nearby_dp(p, current, moves);
}

inline std::vector<SiteSet> run_mtls(const ContentProblem& p, const OptimizerConfig& cfg, OptimizerStats& stats,
                                     std::vector<SiteSet> initial = {}) {
    std::vector<SiteSet> current = initial.empty() ? p.origin_only() : std::move(initial);
    double cost = p.evaluate(current).total;
    stats.iteration_costs.push_back(cost);
    for (int m = 0; m < cfg.max_iterations; ++m) {
        DpPassResult pass = mtls_dp_pass(p, current, cfg.neighbor_limit);
        stats.dp_relaxations += pass.relaxations;
        ++stats.iterations;
        const double next = p.evaluate(pass.sets).total;
        if (!improves(next, cost, cfg.relative_tolerance)) break;
        current = std::move(pass.sets);
        cost = next;
        stats.iteration_costs.push_back(cost);
    }
    return current;
}

}  // namespace satcdn
