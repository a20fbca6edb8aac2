#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "satcdn/parallel.hpp"
#include "satcdn/placement/baselines.hpp"
#include "satcdn/placement/mtls.hpp"
#include "satcdn/placement/mtols.hpp"

namespace satcdn {

enum class Algorithm { no_replica, naive_greedy, jms_greedy, local_search, starfront, pch, mtls, mtols };

inline const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all{Algorithm::no_replica, Algorithm::naive_greedy, Algorithm::jms_greedy,
                                            Algorithm::local_search, Algorithm::starfront,  Algorithm::pch,
                                            Algorithm::mtls,       Algorithm::mtols};
    return all;
}

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::no_replica: return "no_replica";
        case Algorithm::naive_greedy: return "naive_greedy";
        case Algorithm::jms_greedy: return "jms_greedy";
        case Algorithm::local_search: return "local_search";
        case Algorithm::starfront: return "starfront";
        case Algorithm::pch: return "pch";
        case Algorithm::mtls: return "mtls";
        case Algorithm::mtols: return "mtols";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    for (Algorithm a : all_algorithms())
        if (to_string(a) == s) return a;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

// Uses predictions when given; PCH ignores them.
inline bool uses_prediction(Algorithm a) { return a != Algorithm::pch; }

inline std::vector<SiteSet> solve_content(Algorithm a, const ContentProblem& p, const OptimizerConfig& cfg,
                                          OptimizerStats& stats) {
    switch (a) {
        case Algorithm::no_replica: return run_no_replica(p);
        case Algorithm::naive_greedy: return run_naive_greedy(p, cfg);
        case Algorithm::jms_greedy: return run_jms_greedy(p, cfg);
        case Algorithm::local_search: return run_local_search(p, cfg);
        case Algorithm::starfront: return run_starfront(p, cfg, stats);
        case Algorithm::pch: return run_pch(p, cfg);
        case Algorithm::mtls: return run_mtls(p, cfg, stats);
        case Algorithm::mtols: return run_mtols(p, cfg, stats);
    }
    throw std::logic_error("unhandled algorithm");
}

struct OptimizeResult {
    ReplicaSchedule schedule;
    OptimizerStats stats;
    std::vector<OptimizerStats> per_content;
};

// Solves every content independently. `planning` is the demand the algorithm
// sees (actual or predicted); it must match the oracle's users.
inline OptimizeResult optimize(Algorithm a, const DistanceOracle& oracle, const DemandMatrix& planning,
                               const ContentCatalog& catalog, const CostParams& params, const OptimizerConfig& cfg,
                               int threads = 1) {
    if (a == Algorithm::mtls || a == Algorithm::mtols) cfg.validate_local_search();
    if (a == Algorithm::pch) cfg.validate_pch();
    params.validate();
    if (planning.user_count() != oracle.user_count()) throw std::invalid_argument("demand and oracle disagree on users");
    if (planning.content_count() != catalog.size()) throw std::invalid_argument("demand and catalog disagree on contents");
    const int T = oracle.slots();
    OptimizeResult res{ReplicaSchedule(catalog.size(), T, oracle.sites().origin_count()), {}, {}};
    res.per_content.resize(catalog.size());
    std::vector<std::vector<SiteSet>> sets(catalog.size());
    parallel_for(catalog.size(), threads, [&](std::size_t c) {
        const ContentProblem p = make_content_problem(oracle, planning, catalog, params, c);
        sets[c] = solve_content(a, p, cfg, res.per_content[c]);
    });
    for (std::size_t c = 0; c < catalog.size(); ++c) {
        res.schedule.set_content(c, sets[c]);
        res.stats += res.per_content[c];
    }
    return res;
}

}  // namespace satcdn
