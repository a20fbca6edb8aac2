#pragma once

// Multi-time orbit-based local search. Each iteration first picks one orbit
// per slot with a DP over g(t, o), where choosing orbit o at slot t means
// adding v_{o,t}, the orbit's satellite with the lowest query cost. A second
// DP then only considers adding one satellite of the chosen orbit per slot.
// Every gateway is a pseudo-orbit of its own.

#include <vector>

#include "satcdn/placement/nearby_dp.hpp"

namespace satcdn {

struct OrbitChoice {
    int group = -1;
    int site = -1;  // v_{o,t}
};

// For every orbit group with an allowed site outside `base`, the site whose
// addition gives the lowest query cost at slot t (ties: lowest site index).
inline std::vector<OrbitChoice> best_site_per_orbit(const ContentProblem& p, int t, const SiteSet& base) {
    const SiteTable& st = p.sites();
    std::vector<Move> adds;
    for (std::size_t s = st.origin_count(); s < st.size(); ++s) {
        const int v = static_cast<int>(s);
        if (p.allowed(v) && !contains(base, v)) adds.push_back(Move::add_site(v));
    }
    const std::vector<double> qc = detail::query_costs(p, t, base, adds);
    std::vector<OrbitChoice> best(static_cast<std::size_t>(st.orbit_group_count()));
    std::vector<double> best_qc(best.size(), kInf);
    for (std::size_t j = 0; j < adds.size(); ++j) {
        const int v = adds[j].add;
        const auto g = static_cast<std::size_t>(st[static_cast<std::size_t>(v)].orbit_group);
        if (best[g].site < 0 || qc[j] < best_qc[g]) {
            best[g] = {static_cast<int>(g), v};
            best_qc[g] = qc[j];
        }
    }
    std::erase_if(best, [](const OrbitChoice& c) { return c.site < 0; });
    return best;
}

struct MtolsIteration {
    std::vector<int> orbits;  // chosen orbit group per slot, -1 when none was available
    DpPassResult orbit_pass;
    DpPassResult replica_pass;
};

inline MtolsIteration mtols_iteration(const ContentProblem& p, const std::vector<SiteSet>& current) {
    const int T = p.slots();
    MtolsIteration it;
    std::vector<std::vector<OrbitChoice>> choices(static_cast<std::size_t>(T));
    std::vector<std::vector<Move>> orbit_moves(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        choices[ti] = best_site_per_orbit(p, t, current[ti]);
        for (const auto& c : choices[ti]) orbit_moves[ti].push_back(Move::add_site(c.site));
        if (orbit_moves[ti].empty()) orbit_moves[ti].push_back(Move::keep());
    }
    it.orbit_pass = nearby_dp(p, current, orbit_moves);

    const SiteTable& st = p.sites();
    std::vector<std::vector<Move>> replica_moves(static_cast<std::size_t>(T));
    it.orbits.assign(static_cast<std::size_t>(T), -1);
    for (int t = 1; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        auto& mv = replica_moves[ti];
        mv.push_back(Move::keep());
        const Move& chosen = it.orbit_pass.chosen[ti];
        if (chosen.add < 0) continue;
        const int group = st[static_cast<std::size_t>(chosen.add)].orbit_group;
        it.orbits[ti] = group;
        for (std::size_t s = st.origin_count(); s < st.size(); ++s) {
            const int v = static_cast<int>(s);
            if (st[s].orbit_group == group && p.allowed(v) && !contains(current[ti], v)) mv.push_back(Move::add_site(v));
        }
    }
    it.replica_pass = nearby_dp(p, current, replica_moves);
    return it;
}

inline std::vector<SiteSet> run_mtols(const ContentProblem& p, const OptimizerConfig& cfg, OptimizerStats& stats,
                                      std::vector<SiteSet> initial = {}) {
    std::vector<SiteSet> current = initial.empty() ? p.origin_only() : std::move(initial);
    double cost = p.evaluate(current).total;
    stats.iteration_costs.push_back(cost);
    for (int m = 0; m < cfg.max_iterations; ++m) {
        MtolsIteration it = mtols_iteration(p, current);
        stats.orbit_relaxations += it.orbit_pass.relaxations;
        stats.replica_relaxations += it.replica_pass.relaxations;
        ++stats.iterations;
        const double next = p.evaluate(it.replica_pass.sets).total;
        if (!improves(next, cost, cfg.relative_tolerance)) break;
        current = std::move(it.replica_pass.sets);
        cost = next;
        stats.iteration_costs.push_back(cost);
    }
    return current;
}

}  // namespace satcdn
