#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace satcdn;

namespace {

// Brute force over every orbit sequence: slot t adds the chosen orbit's best
// single satellite, found by enumeration.
double best_orbit_sequence(const ContentProblem& p, const std::vector<SiteSet>& current, std::vector<int>* orbits) {
    const SiteTable& st = p.sites();
    const int T = p.slots();
    const int G = st.orbit_group_count();
    std::vector<std::vector<int>> pick(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(G), -1));
    for (int t = 1; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        std::vector<double> best(static_cast<std::size_t>(G), kInf);
        for (std::size_t s = st.origin_count(); s < st.size(); ++s) {
            const int v = static_cast<int>(s);
            if (contains(current[ti], v)) continue;
            SiteSet with = current[ti];
            with.push_back(v);
            const double q = slot_query_cost(p.oracle(), t, p.demand(t), with);
            const auto g = static_cast<std::size_t>(st[s].orbit_group);
            if (pick[ti][g] < 0 || q < best[g]) {
                pick[ti][g] = v;
                best[g] = q;
            }
        }
    }
    std::vector<int> seq(static_cast<std::size_t>(T), 0);
    double best = kInf;
    while (true) {
        std::vector<SiteSet> sets = current;
        bool ok = true;
        for (std::size_t ti = 0; ti < seq.size(); ++ti) {
            const int v = pick[ti][static_cast<std::size_t>(seq[ti])];
            if (v < 0) ok = false;
            else sets[ti].push_back(v), std::sort(sets[ti].begin(), sets[ti].end());
        }
        if (ok) {
            const double c = oracles::schedule_cost(p.oracle(), p.demand(), p.storage(), p.alpha(), sets);
            if (c < best) {
                best = c;
                *orbits = seq;
            }
        }
        std::size_t i = 0;
        while (i < seq.size() && ++seq[i] == G) seq[i++] = 0;
        if (i == seq.size()) break;
    }
    return best;
}

}  // namespace

TEST(Mtols, OrbitSequenceMatchesBruteForce) {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const SiteTable sites = oracles::toy_sites(1, 2, 2, trial % 2);
        const int T = 2 + trial % 2;
        const DistanceOracle o = oracles::plane_oracle(sites, 4, T, rng);
        const ContentProblem p(o, oracles::random_demand(4, T, rng, 5.0, 0.2), oracles::toy_storage(sites, 1.0, 0.5),
                               2.0);
        const auto current = p.origin_only();
        std::vector<int> want;
        const double best = best_orbit_sequence(p, current, &want);
        const MtolsIteration it = mtols_iteration(p, current);
        EXPECT_NEAR(it.orbit_pass.dp_cost, best, 1e-9 * best);
        // Orbit choices only differ from brute force on exact cost ties.
        EXPECT_NEAR(oracles::schedule_cost(o, p.demand(), p.storage(), 2.0, it.orbit_pass.sets), best, 1e-9 * best);
        checked += std::vector<int>(it.orbits.begin(), it.orbits.end()) == want;
    }
    EXPECT_GE(checked, 36);
}

TEST(Mtols, DominantOrbitChosenEverySlot) {
    // Orbit 1's satellites sit on the only user; orbit 0 and the gateway are far.
    const SiteTable sites = oracles::toy_sites(1, 3, 3, 1);
    const int T = 5;
    DistanceOracle o(Metric::hop_count, sites, {99}, T);
    for (int t = 1; t <= T; ++t) {
        for (std::size_t a = 0; a < sites.size(); ++a)
            for (std::size_t b = 0; b < sites.size(); ++b) {
                const bool same = a != b && sites[a].orbit_group == sites[b].orbit_group && sites[a].orbit_group >= 0;
                o.mutable_site_row(t, a)[b] = a == b ? 0.0f : same ? 1.0f : 6.0f;
            }
        for (std::size_t s = 0; s < sites.size(); ++s) {
            const int j = (t - 1) % 3;
            const bool over = sites[s].orbit_group == 1 && sites[s].index == j;
            o.mutable_user_row(t, 0)[s] = over ? 1.0f : sites[s].orbit_group == 1 ? 2.0f : 8.0f;
        }
    }
    const ContentProblem p(o, std::vector<std::vector<double>>(T, {50.0}), oracles::toy_storage(sites, 1.0, 1.0), 2.0);
    const MtolsIteration it = mtols_iteration(p, p.origin_only());
    for (int g : it.orbits) EXPECT_EQ(g, 1);
    OptimizerStats stats;
    const auto sets = run_mtols(p, OptimizerConfig{}, stats);
    for (const auto& s : sets) {
        ASSERT_GT(s.size(), 1u);
        for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(sites[static_cast<std::size_t>(s[i])].orbit_group, 1);
    }
}

TEST(Mtols, HoldsOneGatewayWhenTheBestAlternates) {
    // Two gateways take turns being slightly closer to the user. Switching
    // every slot costs a full copy, so one gateway should be kept throughout.
    const SiteTable sites = oracles::toy_sites(1, 1, 2, 2);  // o0, s0_0, s0_1, g0, g1
    const int T = 6;
    DistanceOracle o(Metric::hop_count, sites, {99}, T);
    for (int t = 1; t <= T; ++t) {
        for (std::size_t a = 0; a < sites.size(); ++a)
            for (std::size_t b = 0; b < sites.size(); ++b) o.mutable_site_row(t, a)[b] = a == b ? 0.0f : 2.0f;
        const bool odd = t % 2 == 1;
        const float row[] = {4.0f, 9.0f, 9.0f, odd ? 2.0f : 2.5f, odd ? 2.5f : 2.0f};
        for (std::size_t s = 0; s < sites.size(); ++s) o.mutable_user_row(t, 0)[s] = row[s];
    }
    const ContentProblem p(o, std::vector<std::vector<double>>(T, {10.0}), oracles::toy_storage(sites, 5.0, 0.5), 20.0);
    EXPECT_NE(sites[3].orbit_group, sites[4].orbit_group);
    OptimizerStats stats;
    const auto sets = run_mtols(p, OptimizerConfig{}, stats);
    for (const auto& s : sets) EXPECT_EQ(s, sets[0]);
    ASSERT_EQ(sets[0].size(), 2u);
    EXPECT_EQ(sites[static_cast<std::size_t>(sets[0][1])].kind, SiteKind::gateway);
    EXPECT_EQ(p.evaluate(sets).replication, 40.0);
}

TEST(Mtols, BestSitePerOrbitMinimisesQuery) {
    std::mt19937_64 rng(32);
    const SiteTable sites = oracles::toy_sites(1, 3, 4, 2);
    const DistanceOracle o = oracles::plane_oracle(sites, 6, 2, rng);
    const ContentProblem p(o, oracles::random_demand(6, 2, rng), oracles::toy_storage(sites, 1, 1), 2.0);
    const SiteSet base{0, 2};
    for (const OrbitChoice& c : best_site_per_orbit(p, 1, base)) {
        SiteSet with = base;
        with.push_back(c.site);
        std::sort(with.begin(), with.end());
        const double q = slot_query_cost(o, 1, p.demand(1), with);
        for (std::size_t s = 1; s < sites.size(); ++s) {
            if (sites[s].orbit_group != c.group || contains(base, static_cast<int>(s))) continue;
            SiteSet other = base;
            other.push_back(static_cast<int>(s));
            std::sort(other.begin(), other.end());
            EXPECT_LE(q, slot_query_cost(o, 1, p.demand(1), other) + 1e-9);
        }
    }
}

TEST(Mtols, IterationCostsNonIncreasingAndValid) {
    std::mt19937_64 rng(33);
    std::uniform_int_distribution<int> P(2, 6), Q(2, 6), T(1, 10), U(2, 10);
    for (int trial = 0; trial < 25; ++trial) {
        const SiteTable sites = oracles::toy_sites(1, P(rng), Q(rng), trial % 3);
        const DistanceOracle o = oracles::plane_oracle(sites, static_cast<std::size_t>(U(rng)), T(rng), rng);
        const ContentProblem p(o, oracles::random_demand(o.user_count(), o.slots(), rng),
                               oracles::toy_storage(sites, 0.8, 0.2), 1.5);
        OptimizerStats stats;
        const auto sets = run_mtols(p, OptimizerConfig{}, stats);
        for (std::size_t i = 1; i < stats.iteration_costs.size(); ++i)
            EXPECT_LE(stats.iteration_costs[i], stats.iteration_costs[i - 1]);
        EXPECT_DOUBLE_EQ(stats.iteration_costs.back(), p.evaluate(sets).total);
        ReplicaSchedule s(1, p.slots(), 1);
        s.set_content(0, sets);
        EXPECT_NO_THROW(validate_schedule(s, sites));
        EXPECT_GT(stats.replica_relaxations, 0u);
    }
}

TEST(Mtols, OrbitRelaxationsScaleWithOrbitCount) {
    std::mt19937_64 rng(34);
    auto count = [&](int P) {
        const SiteTable sites = oracles::toy_sites(1, P, 3);
        const DistanceOracle o = oracles::plane_oracle(sites, 3, 4, rng);
        const ContentProblem p(o, oracles::random_demand(3, 4, rng, 5.0, 0.0), oracles::toy_storage(sites, 1, 1), 2.0);
        return mtols_iteration(p, p.origin_only()).orbit_pass.relaxations;
    };
    // One previous state at t=1, then P x P per later slot.
    EXPECT_EQ(count(5), 5u + 3u * 25u);
    EXPECT_EQ(count(10), 10u + 3u * 100u);
}
