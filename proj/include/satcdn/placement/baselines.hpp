#pragma once

// Reference placement strategies: no replica, three per-slot facility-location
// heuristics (naive greedy, JMS 1.61 greedy, add/delete/swap local search),
// threshold-driven StarFront and rule-based periodic cache handoff (PCH).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "satcdn/placement/nearby_dp.hpp"

namespace satcdn {

inline std::vector<SiteSet> run_no_replica(const ContentProblem& p) { return p.origin_only(); }

// One slot as an uncapacitated facility location instance: clients are the
// demanded users, facilities are the sites. A facility's opening cost is its
// storage plus alpha times its distance to the previous slot's set, so the UFL
// objective of F equals the slot's true cost given that previous set.
class SlotUfl {
public:
    SlotUfl(const ContentProblem& p, int t, const SiteSet& previous) : p_(&p), t_(t) {
        const DistanceOracle& o = p.oracle();
        const std::size_t S = o.site_count();
        opening_.assign(S, 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            if (p.sites().is_origin(s)) continue;
            double rep = 0.0;
            if (!contains(previous, static_cast<int>(s))) {
                rep = kInf;
                const float* row = o.site_row(t, s);
                for (int w : previous) rep = std::min(rep, static_cast<double>(row[w]));
            }
            opening_[s] = p.storage(static_cast<int>(s)) + p.alpha() * rep;
        }
        for (int u : p.active_users(t)) {
            clients_.push_back(u);
            weights_.push_back(p.demand(t)[static_cast<std::size_t>(u)]);
        }
    }

    std::size_t client_count() const { return clients_.size(); }
    double weight(std::size_t j) const { return weights_[j]; }
    double opening(int site) const { return opening_[static_cast<std::size_t>(site)]; }
    double distance(std::size_t j, int site) const {
        return p_->oracle().user_site(t_, static_cast<std::size_t>(clients_[j]), static_cast<std::size_t>(site));
    }
    const float* client_row(std::size_t j) const {
        return p_->oracle().user_row(t_, static_cast<std::size_t>(clients_[j]));
    }

    double cost(const SiteSet& F) const {
        double c = 0.0;
        for (int v : F) c += opening_[static_cast<std::size_t>(v)];
        for (std::size_t j = 0; j < clients_.size(); ++j) {
            const float* row = client_row(j);
            double best = kInf;
            for (int v : F) best = std::min(best, static_cast<double>(row[v]));
            c += weights_[j] * best;
        }
        return c;
    }

    // Nearest/second-nearest open facility per client.
    struct Assignment {
        std::vector<double> best1, best2;
        std::vector<int> arg1;
        double open_cost = 0.0;
    };

    Assignment assign(const SiteSet& F) const {
        Assignment a;
        a.best1.assign(clients_.size(), kInf);
        a.best2.assign(clients_.size(), kInf);
        a.arg1.assign(clients_.size(), -1);
        for (int v : F) a.open_cost += opening_[static_cast<std::size_t>(v)];
        for (std::size_t j = 0; j < clients_.size(); ++j) {
            const float* row = client_row(j);
            for (int v : F) {
                const double d = row[v];
                if (d < a.best1[j]) {
                    a.best2[j] = a.best1[j];
                    a.best1[j] = d;
                    a.arg1[j] = v;
                } else if (d < a.best2[j]) {
                    a.best2[j] = d;
                }
            }
        }
        return a;
    }

    // Cost of F (+) move given F's assignment.
    double cost_after(const Assignment& a, const Move& m) const {
        double c = a.open_cost;
        if (m.add >= 0) c += opening_[static_cast<std::size_t>(m.add)];
        if (m.remove >= 0) c -= opening_[static_cast<std::size_t>(m.remove)];
        for (std::size_t j = 0; j < clients_.size(); ++j) {
            double d = (m.remove >= 0 && a.arg1[j] == m.remove) ? a.best2[j] : a.best1[j];
            if (m.add >= 0) d = std::min(d, static_cast<double>(client_row(j)[m.add]));
            c += weights_[j] * d;
        }
        return c;
    }

private:
    const ContentProblem* p_;
    int t_;
    std::vector<double> opening_;
    std::vector<int> clients_;
    std::vector<double> weights_;
};

namespace detail {

inline std::vector<int> allowed_outside(const ContentProblem& p, const SiteSet& F) {
    std::vector<int> out;
    for (std::size_t s = p.sites().origin_count(); s < p.sites().size(); ++s) {
        const int v = static_cast<int>(s);
        if (p.allowed(v) && !contains(F, v)) out.push_back(v);
    }
    return out;
}

inline SiteSet greedy_slot(const ContentProblem& p, const SlotUfl& ufl, double rel_tol) {
    SiteSet F = origin_set(p.sites().origin_count());
    double cur = ufl.cost(F);
    while (true) {
        const auto a = ufl.assign(F);
        int best_site = -1;
        double best = cur;
        for (int v : allowed_outside(p, F)) {
            const double c = ufl.cost_after(a, Move::add_site(v));
            if (c < best) {
                best = c;
                best_site = v;
            }
        }
        if (best_site < 0 || !improves(best, cur, rel_tol)) break;
        F = apply_move(F, Move::add_site(best_site));
        cur = best;
    }
    return F;
}

inline SiteSet local_search_slot(const ContentProblem& p, const SlotUfl& ufl, SiteSet F, double rel_tol) {
    double cur = ufl.cost(F);
    while (true) {
        const auto a = ufl.assign(F);
        const auto outside = allowed_outside(p, F);
        Move best_move;
        double best = cur;
        auto consider = [&](const Move& m) {
            const double c = ufl.cost_after(a, m);
            if (c < best) {
                best = c;
                best_move = m;
            }
        };
        for (int x : outside) consider(Move::add_site(x));
        for (int y : F) {
            if (p.sites().is_origin(static_cast<std::size_t>(y))) continue;
            consider(Move::remove_site(y));
            for (int x : outside) consider(Move::swap_site(y, x));
        }
        if (best_move.kind == Move::Kind::keep || !improves(best, cur, rel_tol)) break;
        F = apply_move(F, best_move);
        cur = best;
    }
    return F;
}

// Jain-Mahdian-Saberi greedy: repeatedly open the star (facility, prefix of
// unconnected clients by distance) with the smallest cost per newly connected
// demand, where connected clients' savings from switching offset the cost.
// Demand weights act as client multiplicities.
inline SiteSet jms_slot(const ContentProblem& p, const SlotUfl& ufl) {
    const std::size_t nc = ufl.client_count();
    std::vector<int> facilities;
    for (std::size_t s = 0; s < p.sites().size(); ++s) {
        const int v = static_cast<int>(s);
        if (p.sites().is_origin(s) || p.allowed(v)) facilities.push_back(v);
    }
    // Clients of each facility sorted by distance; unreachable ones dropped.
    std::vector<std::vector<int>> order(facilities.size());
    for (std::size_t fi = 0; fi < facilities.size(); ++fi) {
        for (std::size_t j = 0; j < nc; ++j)
            if (ufl.distance(j, facilities[fi]) < kInf) order[fi].push_back(static_cast<int>(j));
        std::stable_sort(order[fi].begin(), order[fi].end(), [&](int a, int b) {
            return ufl.distance(static_cast<std::size_t>(a), facilities[fi]) <
                   ufl.distance(static_cast<std::size_t>(b), facilities[fi]);
        });
    }
    std::vector<double> fcost(facilities.size());
    for (std::size_t fi = 0; fi < facilities.size(); ++fi) fcost[fi] = ufl.opening(facilities[fi]);
    std::vector<char> opened(facilities.size(), 0);
    std::vector<char> connected(nc, 0);
    std::vector<double> conn(nc, kInf);
    std::size_t remaining = nc;

    auto open = [&](std::size_t fi) {
        opened[fi] = 1;
        fcost[fi] = 0.0;
        for (std::size_t j = 0; j < nc; ++j) {
            const double d = ufl.distance(j, facilities[fi]);
            if (connected[j] && d < conn[j]) conn[j] = d;
        }
    };
    auto savings = [&](std::size_t fi) {
        double s = 0.0;
        for (std::size_t j = 0; j < nc; ++j)
            if (connected[j]) s += ufl.weight(j) * std::max(0.0, conn[j] - ufl.distance(j, facilities[fi]));
        return s;
    };

    while (remaining > 0) {
        // Facilities already paid for by switching clients open immediately.
        for (std::size_t fi = 0; fi < facilities.size(); ++fi)
            if (!opened[fi] && fcost[fi] < kInf && savings(fi) > fcost[fi]) open(fi);

        double best_ratio = kInf;
        std::size_t best_f = 0, best_k = 0;
        for (std::size_t fi = 0; fi < facilities.size(); ++fi) {
            if (fcost[fi] == kInf) continue;
            double num = fcost[fi] - savings(fi);
            double w = 0.0;
            std::size_t k = 0;
            for (int j : order[fi]) {
                if (connected[static_cast<std::size_t>(j)]) continue;
                const auto ju = static_cast<std::size_t>(j);
                num += ufl.weight(ju) * ufl.distance(ju, facilities[fi]);
                w += ufl.weight(ju);
                ++k;
                const double r = num / w;
                if (r < best_ratio) {
                    best_ratio = r;
                    best_f = fi;
                    best_k = k;
                }
            }
        }
        if (best_ratio == kInf) break;  // remaining clients cannot reach any facility
        open(best_f);
        std::size_t k = 0;
        for (int j : order[best_f]) {
            const auto ju = static_cast<std::size_t>(j);
            if (connected[ju]) continue;
            if (k++ == best_k) break;
            connected[ju] = 1;
            conn[ju] = ufl.distance(ju, facilities[best_f]);
            --remaining;
        }
    }
    SiteSet F = origin_set(p.sites().origin_count());
    for (std::size_t fi = 0; fi < facilities.size(); ++fi)
        if (opened[fi]) F.push_back(facilities[fi]);
    std::sort(F.begin(), F.end());
    F.erase(std::unique(F.begin(), F.end()), F.end());
    return F;
}

template <typename SlotSolver>
std::vector<SiteSet> per_slot(const ContentProblem& p, SlotSolver solve) {
    std::vector<SiteSet> sets;
    SiteSet prev = origin_set(p.sites().origin_count());
    for (int t = 1; t <= p.slots(); ++t) {
        const SlotUfl ufl(p, t, prev);
        sets.push_back(solve(ufl));
        prev = sets.back();
    }
    return sets;
}

}  // namespace detail

inline std::vector<SiteSet> run_naive_greedy(const ContentProblem& p, const OptimizerConfig& cfg) {
    return detail::per_slot(p, [&](const SlotUfl& ufl) { return detail::greedy_slot(p, ufl, cfg.relative_tolerance); });
}

inline std::vector<SiteSet> run_jms_greedy(const ContentProblem& p, const OptimizerConfig&) {
    return detail::per_slot(p, [&](const SlotUfl& ufl) { return detail::jms_slot(p, ufl); });
}

// Best-improvement add/delete/swap search per slot, seeded with the naive
// greedy solution of the slot.
inline std::vector<SiteSet> run_local_search(const ContentProblem& p, const OptimizerConfig& cfg) {
    return detail::per_slot(p, [&](const SlotUfl& ufl) {
        return detail::local_search_slot(p, ufl, detail::greedy_slot(p, ufl, cfg.relative_tolerance),
                                         cfg.relative_tolerance);
    });
}

inline std::vector<double> default_starfront_thresholds(Metric m) {
    if (m == Metric::hop_count) return {1, 2, 3, 4, 5};
    return {5, 10, 20, 40, 80};
}

struct StarfrontRun {
    double threshold = 0.0;
    std::vector<SiteSet> sets;
    double cost = kInf;
    std::uint64_t unsatisfied = 0;
};

// Replicas persist once placed. Each slot, every demanded user without a
// replica within `threshold` gets the qualifying candidate with the smallest
// storage + replication cost; users are served in order of decreasing demand.
inline StarfrontRun starfront_with_threshold(const ContentProblem& p, double threshold) {
    StarfrontRun run;
    run.threshold = threshold;
    const DistanceOracle& o = p.oracle();
    SiteSet prev = origin_set(p.sites().origin_count());
    for (int t = 1; t <= p.slots(); ++t) {
        SiteSet cur = prev;
        std::vector<int> users = p.active_users(t);
        const auto& d = p.demand(t);
        std::stable_sort(users.begin(), users.end(), [&](int a, int b) {
            return d[static_cast<std::size_t>(a)] > d[static_cast<std::size_t>(b)];
        });
        for (int u : users) {
            const float* row = o.user_row(t, static_cast<std::size_t>(u));
            double nearest = kInf;
            for (int v : cur) nearest = std::min(nearest, static_cast<double>(row[v]));
            if (nearest <= threshold) continue;
            int pick = -1;
            double pick_cost = kInf;
            for (std::size_t s = p.sites().origin_count(); s < p.sites().size(); ++s) {
                const int v = static_cast<int>(s);
                if (!p.allowed(v) || row[v] > threshold) continue;
                const float* vrow = o.site_row(t, s);
                double rep = kInf;
                for (int w : prev) rep = std::min(rep, static_cast<double>(vrow[w]));
                const double c = p.storage(v) + p.alpha() * rep;
                if (c < pick_cost) {
                    pick_cost = c;
                    pick = v;
                }
            }
            if (pick < 0) {
                ++run.unsatisfied;
                continue;
            }
            cur = apply_move(cur, Move::add_site(pick));
        }
        run.sets.push_back(cur);
        prev = cur;
    }
    run.cost = p.evaluate(run.sets).total;
    return run;
}

inline std::vector<StarfrontRun> starfront_sweep(const ContentProblem& p, const std::vector<double>& thresholds) {
    std::vector<StarfrontRun> runs;
    for (double th : thresholds) runs.push_back(starfront_with_threshold(p, th));
    return runs;
}

inline std::vector<SiteSet> run_starfront(const ContentProblem& p, const OptimizerConfig& cfg, OptimizerStats& stats) {
    const auto grid = cfg.starfront_thresholds.empty() ? default_starfront_thresholds(p.oracle().metric())
                                                       : cfg.starfront_thresholds;
    auto runs = starfront_sweep(p, grid);
    if (runs.empty()) return p.origin_only();
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].cost < runs[best].cost) best = i;
    stats.chosen_threshold = runs[best].threshold;
    stats.unsatisfied_users += runs[best].unsatisfied;
    return std::move(runs[best].sets);
}

inline int period_in_slots(double period_s, double slot_s) {
    return std::max(1, static_cast<int>(std::ceil(period_s / slot_s - 1e-9)));
}

// Periodic cache handoff. At the first slot with demand, each demanded user
// gets a replica on its nearest satellite. Every intra-orbit period each
// replica moves to the trailing satellite of its orbit; every inter-orbit
// period it moves to the same-index satellite of an adjacent orbit when that
// satellite is closer to the user it was placed for. `demand` is the real
// demand: the rule never uses predictions.
inline std::vector<SiteSet> run_pch(const ContentProblem& p, const OptimizerConfig& cfg) {
    const SiteTable& st = p.sites();
    const DistanceOracle& o = p.oracle();
    std::map<std::tuple<int, int, int>, int> by_position;
    std::map<int, std::pair<int, int>> shell_dims;  // shell -> (P, Q)
    for (std::size_t s = st.origin_count(); s < st.size(); ++s) {
        const Site& site = st[s];
        if (site.kind != SiteKind::satellite || !p.allowed(static_cast<int>(s))) continue;
        by_position[{site.shell, site.orbit, site.index}] = static_cast<int>(s);
        auto& dims = shell_dims[site.shell];
        dims.first = std::max(dims.first, site.orbit + 1);
        dims.second = std::max(dims.second, site.index + 1);
    }
    auto locate = [&](int shell, int orbit, int index) {
        const auto [P, Q] = shell_dims.at(shell);
        auto it = by_position.find({shell, ((orbit % P) + P) % P, ((index % Q) + Q) % Q});
        return it == by_position.end() ? -1 : it->second;
    };

    const int intra = period_in_slots(cfg.pch_intra_period_s, cfg.slot_seconds);
    const int inter = period_in_slots(cfg.pch_inter_period_s.value_or(4.0 * cfg.pch_intra_period_s), cfg.slot_seconds);

    struct Replica {
        int site;
        int user;
    };
    std::vector<Replica> replicas;
    std::vector<SiteSet> sets;
    int start = -1;
    for (int t = 1; t <= p.slots(); ++t) {
        if (start < 0 && !p.active_users(t).empty() && !by_position.empty()) {
            start = t;
            for (int u : p.active_users(t)) {
                const float* row = o.user_row(t, static_cast<std::size_t>(u));
                int pick = -1;
                for (const auto& [pos, s] : by_position) {
                    (void)pos;
                    if (row[s] == std::numeric_limits<float>::infinity()) continue;
                    if (pick < 0 || row[s] < row[pick] || (row[s] == row[pick] && s < pick)) pick = s;
                }
                if (pick >= 0) replicas.push_back({pick, u});
            }
        } else if (start > 0) {
            const int age = t - start;
            if (age % intra == 0) {
                for (auto& r : replicas) {
                    const Site& s = st[static_cast<std::size_t>(r.site)];
                    const int next = locate(s.shell, s.orbit, s.index - 1);
                    if (next >= 0) r.site = next;
                }
            }
            if (age % inter == 0) {
                for (auto& r : replicas) {
                    const Site& s = st[static_cast<std::size_t>(r.site)];
                    const float* row = o.user_row(t, static_cast<std::size_t>(r.user));
                    int best = r.site;
                    for (int d : {-1, 1}) {
                        const int cand = locate(s.shell, s.orbit + d, s.index);
                        if (cand >= 0 && row[cand] < row[best]) best = cand;
                    }
                    r.site = best;
                }
            }
        }
        SiteSet set = origin_set(st.origin_count());
        for (const auto& r : replicas) set.push_back(r.site);
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace satcdn
