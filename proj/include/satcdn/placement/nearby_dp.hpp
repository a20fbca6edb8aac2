#pragma once

// Dynamic program over per-slot "nearby" replica sets.
//
// Each slot t has a base set B_t and a list of moves (keep, add x, remove y,
// swap y->x); move j at slot t yields the set B_t (+) move_j. The DP picks one
// move per slot minimising
//   sum_t QC(t, S_t) + SC(t, S_t) + RC(t, S_{t-1}, S_t),   S_0 = origins,
// via f(t, j) = QC + SC + min_i [ f(t-1, i) + RC(t, S^i_{t-1}, S^j_t) ].
//
// RC between two nearby sets is evaluated in O(1) per transition from
// per-slot best/second-best tables over the base sets, so one pass costs
// O(sum_t n_{t-1} * n_t) transitions plus O(n_t * users) query evaluations.

#include <cstdint>
#include <limits>
#include <vector>

#include "satcdn/placement/problem.hpp"

namespace satcdn {

struct Move {
    enum class Kind : std::uint8_t { keep, add, remove, swap };
    Kind kind = Kind::keep;
    int add = -1;     // site added (add, swap)
    int remove = -1;  // site removed (remove, swap)

    static Move keep() { return {}; }
    static Move add_site(int x) { return {Kind::add, x, -1}; }
    static Move remove_site(int y) { return {Kind::remove, -1, y}; }
    static Move swap_site(int y, int x) { return {Kind::swap, x, y}; }

    friend bool operator==(const Move&, const Move&) = default;
};

inline SiteSet apply_move(const SiteSet& base, const Move& m) {
    SiteSet out;
    out.reserve(base.size() + 1);
    for (int v : base)
        if (v != m.remove) out.push_back(v);
    if (m.add >= 0) out.insert(std::lower_bound(out.begin(), out.end(), m.add), m.add);
    return out;
}

struct DpPassResult {
    std::vector<SiteSet> sets;
    std::vector<Move> chosen;
    double dp_cost = kInf;
    std::uint64_t relaxations = 0;
};

namespace detail {

// Nearest and second-nearest member of `members` for each of `n` points, where
// dist_row(w) returns distances from member w to every point.
struct NearestTable {
    std::vector<double> best1;
    std::vector<double> best2;
    std::vector<int> arg1;

    template <typename RowFn>
    NearestTable(std::size_t n, const SiteSet& members, RowFn dist_row)
        : best1(n, kInf), best2(n, kInf), arg1(n, -1) {
        for (int w : members) {
            const float* row = dist_row(w);
            for (std::size_t z = 0; z < n; ++z) {
                const double d = row[z];
                if (d < best1[z]) {
                    best2[z] = best1[z];
                    best1[z] = d;
                    arg1[z] = w;
                } else if (d < best2[z]) {
                    best2[z] = d;
                }
            }
        }
    }

    // Distance from z to (members - removed + added).
    double after(std::size_t z, int removed, const float* added_row) const {
        double v = (removed >= 0 && arg1[z] == removed) ? best2[z] : best1[z];
        if (added_row != nullptr) v = std::min(v, static_cast<double>(added_row[z]));
        return v;
    }
};

// QC of base (+) move for every move, over the slot's active users.
inline std::vector<double> query_costs(const ContentProblem& p, int t, const SiteSet& base,
                                       const std::vector<Move>& moves) {
    const DistanceOracle& o = p.oracle();
    const auto& demand = p.demand(t);
    std::vector<double> qc(moves.size(), 0.0);
    for (int u : p.active_users(t)) {
        const float* row = o.user_row(t, static_cast<std::size_t>(u));
        const double w = demand[static_cast<std::size_t>(u)];
        double b1 = kInf, b2 = kInf;
        int a1 = -1;
        for (int v : base) {
            const double d = row[v];
            if (d < b1) {
                b2 = b1;
                b1 = d;
                a1 = v;
            } else if (d < b2) {
                b2 = d;
            }
        }
        for (std::size_t j = 0; j < moves.size(); ++j) {
            const Move& m = moves[j];
            double d = (m.remove >= 0 && a1 == m.remove) ? b2 : b1;
            if (m.add >= 0) d = std::min(d, static_cast<double>(row[m.add]));
            qc[j] += w * d;
        }
    }
    return qc;
}

}  // namespace detail

// One DP pass. `base[t-1]` is B_t and `moves[t-1]` the nearby moves of slot t;
// every slot needs at least one move. Ties resolve to the earliest move, so
// listing keep() first prefers leaving a slot unchanged.
inline DpPassResult nearby_dp(const ContentProblem& p, const std::vector<SiteSet>& base,
                              const std::vector<std::vector<Move>>& moves) {
    const int T = p.slots();
    const DistanceOracle& o = p.oracle();
    const std::size_t S = o.site_count();
    DpPassResult res;
    if (T == 0) {
        res.dp_cost = 0.0;
        return res;
    }

    std::vector<std::vector<int>> back(static_cast<std::size_t>(T));
    const SiteSet origins = origin_set(p.sites().origin_count());
    std::vector<double> f_prev{0.0};
    std::vector<Move> moves_prev{Move::keep()};
    const SiteSet* base_prev = &origins;

    for (int t = 1; t <= T; ++t) {
        const SiteSet& B = base[static_cast<std::size_t>(t - 1)];
        const auto& mv = moves[static_cast<std::size_t>(t - 1)];
        const std::size_t n = mv.size();
        if (n == 0) throw std::logic_error("nearby_dp: slot without moves");

        const std::vector<double> qc = detail::query_costs(p, t, B, mv);
        const double sc_base = slot_storage_cost(B, p.storage());

        // Nearest previous-slot replica for every site, measured at slot t.
        const detail::NearestTable prev_near(S, *base_prev, [&](int w) { return o.site_row(t, static_cast<std::size_t>(w)); });

        std::vector<double> best(n, kInf);
        std::vector<int> arg(n, 0);
        for (std::size_t i = 0; i < moves_prev.size(); ++i) {
            const double fi = f_prev[i];
            if (fi == kInf) continue;
            const Move& pm = moves_prev[i];
            const float* xrow = pm.add >= 0 ? o.site_row(t, static_cast<std::size_t>(pm.add)) : nullptr;
            // Replication distance of B against the i-th predecessor set.
            double F = 0.0;
            int K = 0;
            for (int v : B) {
                const double m = prev_near.after(static_cast<std::size_t>(v), pm.remove, xrow);
                if (m == kInf) ++K; else F += m;
            }
            for (std::size_t j = 0; j < n; ++j) {
                const Move& m = mv[j];
                double Fj = F;
                int Kj = K;
                if (m.remove >= 0) {
                    const double mb = prev_near.after(static_cast<std::size_t>(m.remove), pm.remove, xrow);
                    if (mb == kInf) --Kj; else Fj -= mb;
                }
                if (m.add >= 0) {
                    const double ma = prev_near.after(static_cast<std::size_t>(m.add), pm.remove, xrow);
                    if (ma == kInf) ++Kj; else Fj += ma;
                }
                if (Kj > 0) continue;
                const double c = fi + p.alpha() * Fj;
                if (c < best[j]) {
                    best[j] = c;
                    arg[j] = static_cast<int>(i);
                }
            }
        }
        res.relaxations += static_cast<std::uint64_t>(moves_prev.size()) * n;

        std::vector<double> f(n);
        for (std::size_t j = 0; j < n; ++j) {
            const Move& m = mv[j];
            double sc = sc_base;
            if (m.add >= 0) sc += p.storage(m.add);
            if (m.remove >= 0) sc -= p.storage(m.remove);
            f[j] = (best[j] == kInf || qc[j] == kInf) ? kInf : qc[j] + sc + best[j];
        }
        back[static_cast<std::size_t>(t - 1)] = std::move(arg);
        f_prev = std::move(f);
        moves_prev = mv;
        base_prev = &B;
    }

    std::size_t jbest = 0;
    for (std::size_t j = 1; j < f_prev.size(); ++j)
        if (f_prev[j] < f_prev[jbest]) jbest = j;
    res.dp_cost = f_prev[jbest];
    if (res.dp_cost == kInf) {
        res.sets = base;
        res.chosen.assign(static_cast<std::size_t>(T), Move::keep());
        return res;
    }
    res.chosen.resize(static_cast<std::size_t>(T));
    res.sets.resize(static_cast<std::size_t>(T));
    std::size_t j = jbest;
    for (int t = T; t >= 1; --t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        res.chosen[ti] = moves[ti][j];
        res.sets[ti] = apply_move(base[ti], moves[ti][j]);
        j = static_cast<std::size_t>(back[ti][j]);
    }
    return res;
}

}  // namespace satcdn
