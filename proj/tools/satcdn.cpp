// satcdn: scenario runner for replica placement on satellite networks.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "satcdn/satcdn.hpp"

namespace {

using namespace satcdn;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string algorithms;
    std::string metric;
    std::optional<int> threads;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

ScenarioConfig load_with_overrides(const std::string& path, const Overrides& o) {
    ScenarioConfig cfg = load_scenario(path);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.optimizer.seed = *o.seed;
    }
    if (!o.algorithms.empty()) {
        cfg.algorithms.clear();
        for (const auto& a : split_list(o.algorithms)) cfg.algorithms.push_back(parse_algorithm(a));
    }
    if (!o.metric.empty()) {
        const Metric before = cfg.metric;
        cfg.metric = parse_metric(o.metric);
        if (before != cfg.metric && cfg.optimizer.starfront_thresholds == default_starfront_thresholds(before)) {
            cfg.optimizer.starfront_thresholds = default_starfront_thresholds(cfg.metric);
        }
    }
    if (o.threads) cfg.threads = *o.threads;
    return cfg;
}

int cmd_run(const std::string& config, const std::string& out, const Overrides& o) {
    const ScenarioConfig cfg = load_with_overrides(config, o);
    const RunSummary summary = run_scenario(cfg, out);
    int failures = 0;
    for (const auto& r : summary.results) {
        if (r.error) {
            ++failures;
            std::cerr << to_string(r.algorithm) << ": FAILED: " << *r.error << '\n';
            continue;
        }
        std::cout << to_string(r.algorithm) << ": total=" << csv::fmt(r.total.total) << " query=" << csv::fmt(r.total.query)
                  << " replication=" << csv::fmt(r.total.replication) << " storage=" << csv::fmt(r.total.storage)
                  << " (" << r.seconds << " s)\n";
    }
    std::cout << "results written to " << out << '\n';
    return failures == 0 ? 0 : 3;
}

int cmd_gen_demand(const std::string& config, const std::string& out, const Overrides& o) {
    const ScenarioConfig cfg = load_with_overrides(config, o);
    const UserWorkload uw = build_workload(cfg);
    std::filesystem::create_directories(out);
    const std::filesystem::path dir(out);
    save_ground_nodes((dir / "users.csv").string(), uw.users);
    save_catalog((dir / "catalog.csv").string(), uw.workload.catalog);
    save_trace((dir / "trace.csv").string(), uw.workload.demand);
    std::cout << uw.users.size() << " users, " << uw.workload.catalog.size() << " contents, "
              << uw.workload.demand.slots() << " slots, total demand " << csv::fmt(uw.workload.demand.total()) << '\n';
    return 0;
}

int cmd_inspect(const std::string& config, const std::string& out, const Overrides& o) {
    const ScenarioConfig cfg = load_with_overrides(config, o);
    const UserWorkload uw = build_workload(cfg);
    const int T = cfg.slots.value_or(std::max(1, uw.workload.demand.slots()));
    std::vector<GroundNode> ground = cfg.origins;
    const auto gateways = resolve_gateways(cfg);
    ground.insert(ground.end(), gateways.begin(), gateways.end());
    const std::size_t first_user = ground.size();
    ground.insert(ground.end(), uw.users.begin(), uw.users.end());
    const NetworkLayout layout(Constellation(cfg.shells), ground);
    const Constellation& c = layout.constellation();

    for (std::size_t s = 0; s < c.shells().size(); ++s) {
        const ShellSpec& sh = c.shells()[s];
        std::cout << "shell " << sh.name << ": " << sh.orbit_count << " x " << sh.sats_per_orbit << " at "
                  << sh.altitude_km << " km, inclination " << sh.inclination_deg << " deg, period "
                  << c.period_s(s) / 60.0 << " min, isl " << (sh.isl_enabled ? "on" : "off") << '\n';
    }
    std::cout << gateways.size() << " gateways, " << uw.users.size() << " users, " << T << " slots\n";

    SnapshotOptions opt;
    opt.slot_seconds = cfg.slot_seconds;
    opt.epoch_offset_s = cfg.epoch_offset_s;
    opt.origin_satellite_links = gateways.empty();
    std::unique_ptr<csv::Writer> w;
    if (!out.empty()) {
        w = std::make_unique<csv::Writer>(out);
        w->row("slot", "isl_links", "ground_links", "users_covered", "mean_visible_satellites", "min_visible_satellites");
    }
    for (int t = 1; t <= T; ++t) {
        const SnapshotGraph g = snapshot(layout, t, opt);
        std::size_t isl = 0, ground_links = 0;
        for (const Link& l : g.links) {
            if (l.kind == LinkKind::inter_satellite) ++isl;
            if (l.kind == LinkKind::ground_satellite) ++ground_links;
        }
        std::vector<std::size_t> visible(uw.users.size(), 0);
        for (const Link& l : g.links) {
            if (l.kind != LinkKind::ground_satellite) continue;
            const auto gi = static_cast<std::size_t>(l.b - layout.satellite_count());
            if (gi >= first_user) ++visible[gi - first_user];
        }
        std::size_t covered = 0, minv = visible.empty() ? 0 : visible[0];
        double sum = 0.0;
        for (std::size_t v : visible) {
            covered += v > 0;
            minv = std::min(minv, v);
            sum += static_cast<double>(v);
        }
        const double mean = visible.empty() ? 0.0 : sum / static_cast<double>(visible.size());
        std::cout << "slot " << t << ": " << isl << " isl, " << ground_links << " ground links, " << covered << "/"
                  << visible.size() << " users covered, mean visible " << mean << ", min " << minv << '\n';
        if (w) w->row(t, isl, ground_links, covered, mean, minv);
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out) {
    const auto rows = compare_bundles(dirs);
    auto emit = [&](auto&& row) {
        row("bundle", "algorithm", "metric", "query", "replication", "storage", "total");
        for (const auto& r : rows) row(r.bundle, r.algorithm, r.metric, r.query, r.replication, r.storage, r.total);
    };
    if (out.empty()) {
        emit([](const auto&... f) {
            bool first = true;
            ((std::cout << (first ? "" : ",") << f, first = false), ...);
            std::cout << '\n';
        });
    } else {
        csv::Writer w(out);
        emit([&](const auto&... f) { w.row(f...); });
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replica placement simulator for satellite networks"};
    app.require_subcommand(1);

    Overrides o;
    std::string config, out;
    auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
        auto* opt = sub->add_option("--out", out, "Output path");
        if (out_required) opt->required();
        sub->add_option("--seed", o.seed, "Override the RNG seed");
        sub->add_option("--algorithms", o.algorithms, "Comma-separated algorithm list");
        sub->add_option("--metric", o.metric, "hop, ideal or sampled")->check(CLI::IsMember({"hop", "ideal", "sampled"}));
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "Run every configured algorithm and write a result bundle");
    add_common(run, true);
    auto* gen = app.add_subcommand("gen-demand", "Write the scenario's users, catalog and demand trace as CSV");
    add_common(gen, true);
    auto* inspect = app.add_subcommand("inspect-constellation", "Print per-slot coverage and visibility");
    add_common(inspect, false);
    std::vector<std::string> bundles;
    auto* compare = app.add_subcommand("compare", "Join the cost totals of several result bundles");
    compare->add_option("bundles", bundles, "Result directories")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--out", out, "Write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(config, out, o);
        if (gen->parsed()) return cmd_gen_demand(config, out, o);
        if (inspect->parsed()) return cmd_inspect(config, out, o);
        if (compare->parsed()) return cmd_compare(bundles, out);
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
