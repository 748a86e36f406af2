// evplace command-line entry point.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <evplace/evplace.hpp>

namespace fs = std::filesystem;
using namespace evplace;

namespace {

enum exit_code : int {
    ok = 0,
    other = 1,
    usage = 2,
    io = 3,
    parse = 4,
    infeasible = 5,
    coverage = 6,
    numerical = 7,
    not_certified = 8,
};

struct common {
    std::string network;
    std::string catalog = "data/catalog_default.json";
    std::string scenario;
    std::string out = "out";
    std::string preset;
    int workers = 1;

    std::optional<std::string> preset_opt() const {
        if (preset.empty()) return std::nullopt;
        return preset;
    }
};

// Inputs are hashed from their raw text so the summary identifies the exact run.
struct run_meta {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // (role, path)
    std::vector<std::string> args;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
};

std::string read_or_empty(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return {};
    return std::string(std::istreambuf_iterator<char>(f), {});
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write " + path.string());
    f << text;
    if (!f) throw io_error("write failed for " + path.string());
}

void write_outputs(const std::string& out_dir, run_meta meta, const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + out_dir + ": " + ec.message());
    std::uint64_t h = fnv1a(meta.command);
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [role, path] : meta.inputs) {
        const auto text = read_or_empty(path);
        const auto fh = fnv1a(text);
        h = fnv1a(role + ":" + hex64(fh), h);
        inputs.push_back({{"role", role}, {"path", path}, {"fnv1a64", hex64(fh)}});
    }
    for (const auto& a : meta.args) h = fnv1a(a, h);
    for (const auto& [name, text] : files) {
        write_file(fs::path(out_dir) / name, text);
        meta.outputs.push_back(name);
    }
    nlohmann::json summary = {{"tool", "evplace"},
                              {"version", version_string},
                              {"command", meta.command},
                              {"seed", meta.seed},
                              {"parameter_hash", hex64(h)},
                              {"arguments", meta.args},
                              {"inputs", inputs},
                              {"outputs", meta.outputs}};
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
}

int status_exit(solve_status s) {
    switch (s) {
    case solve_status::optimal: return ok;
    case solve_status::infeasible:
    case solve_status::budget_infeasible: return infeasible;
    case solve_status::node_limit: return not_certified;
    }
    return other;
}

void add_inputs(CLI::App* sub, common& c, bool scenario_required = true) {
    sub->add_option("--network", c.network, "network file (JSON)")->required();
    sub->add_option("--catalog", c.catalog, "device catalog file (JSON)");
    auto* s = sub->add_option("--scenario", c.scenario, "scenario file (JSON)");
    if (scenario_required) s->required();
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--region-preset", c.preset, "cost preset overriding the scenario's")
        ->check(CLI::IsMember({"us", "beijing"}));
}

int cmd_solve(const common& c) {
    auto net = load_network(c.network);
    auto cat = load_catalog(c.catalog);
    auto sc = load_scenario(c.scenario, c.preset_opt());
    problem pb(net, cat, sc);
    const auto t0 = std::chrono::steady_clock::now();
    auto r = solve_convex(pb);
    const double secs = seconds_since(t0);
    std::cout << report_text(pb, r);
    std::printf("wall time %.3f s\n", secs);
    run_meta meta{"solve", {{"network", c.network}, {"catalog", c.catalog}, {"scenario", c.scenario}}, {c.preset}, {}, 0};
    write_outputs(c.out, meta,
                  {{"report.json", report_json(pb, r).dump(2) + "\n"}, {"timing.csv", "phase,seconds\nsolve," + fmt(secs, 4) + "\n"}});
    return status_exit(r.status);
}

int cmd_stack(const common& c) {
    auto net = load_network(c.network);
    auto cat = load_catalog(c.catalog);
    auto sc = load_scenario(c.scenario, c.preset_opt());
    auto s = constraint_stack(net, cat, sc);
    const auto csv = stack_csv(s);
    std::cout << csv;
    run_meta meta{"stack", {{"network", c.network}, {"catalog", c.catalog}, {"scenario", c.scenario}}, {c.preset}, {}, 0};
    write_outputs(c.out, meta, {{"stack.csv", csv}});
    for (const auto& row : s.rows)
        if (row.convex.status != solve_status::optimal) return status_exit(row.convex.status);
    return ok;
}

int cmd_sweep(const common& c, const std::string& param, double from, double to, int steps) {
    const auto p = parse_sweep_param(param);
    auto net = load_network(c.network);
    auto cat = load_catalog(c.catalog);
    auto sc = load_scenario(c.scenario, c.preset_opt());
    auto spec = make_sweep(p, from, to, steps);
    auto rows = run_sweep(spec, net, cat, sc, c.workers);
    const auto csv = sweep_csv(spec, rows);
    std::cout << csv;
    run_meta meta{"sweep",
                  {{"network", c.network}, {"catalog", c.catalog}, {"scenario", c.scenario}},
                  {c.preset, param, fmt(from, 6), fmt(to, 6), std::to_string(steps)},
                  {},
                  0};
    write_outputs(c.out, meta, {{"sweep.csv", csv}, {"sweep_timing.csv", sweep_timing_csv(spec, rows)}});
    return ok;
}

int cmd_compare(const common& c, const std::string& battery_path) {
    std::optional<network> net;
    if (!c.network.empty()) net = load_network(c.network);
    auto cat = load_catalog(c.catalog);
    auto battery = load_battery(battery_path, net, c.preset_opt());
    auto cases = convexification_comparison(battery, cat, c.workers);
    auto sum = summarize(cases);
    const auto table = comparison_csv(cases);
    const auto summary = comparison_summary_csv(sum);
    std::cout << summary;
    std::printf("scenarios %d, baseline failures on %d scenario(s)\n", sum.scenarios, sum.scenarios_with_baseline_failure);
    run_meta meta{"compare-convexification", {{"catalog", c.catalog}, {"battery", battery_path}}, {c.preset}, {}, 0};
    if (!c.network.empty()) meta.inputs.push_back({"network", c.network});
    write_outputs(c.out, meta,
                  {{"comparison.csv", table},
                   {"comparison_summary.csv", summary},
                   {"comparison_timing.csv", comparison_timing_csv(cases)}});
    return sum.convex_failures == 0 ? ok : not_certified;
}

int cmd_share(const common& c) {
    auto net = load_network(c.network);
    auto cat = load_catalog(c.catalog);
    auto sc = load_scenario(c.scenario, c.preset_opt());
    problem pb(net, cat, sc);
    auto s = protection_share(pb);
    const auto csv = share_csv(sc.name.empty() ? "scenario" : sc.name, s);
    std::cout << csv;
    run_meta meta{"protection-share", {{"network", c.network}, {"catalog", c.catalog}, {"scenario", c.scenario}}, {c.preset}, {}, 0};
    write_outputs(c.out, meta, {{"protection_share.csv", csv}});
    return status_exit(s.status);
}

int cmd_linearization(const std::string& out, double from, double to, int steps) {
    if (steps < 2) throw domain_error("validate-linearization needs at least 2 steps");
    if (!(from > 0.0 && to < 2.0 && from < to)) throw domain_error("grid must satisfy 0 < from < to < 2");
    std::string csv = "v_pu,error_pct\n";
    double worst = -1.0, at = from;
    for (int i = 0; i < steps; ++i) {
        const double v = from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
        const double e = linearization_error_pct(v);
        csv += fmt(v, 6) + "," + fmt(e, 8) + "\n";
        if (e > worst) {
            worst = e;
            at = v;
        }
    }
    char line[160];
    std::snprintf(line, sizeof line, "max error %.2f%% on [%g,%g] (%.6f%% at v=%.6f, %d points)\n", worst, from, to, worst,
                  at, steps);
    std::cout << line;
    run_meta meta{"validate-linearization", {}, {fmt(from, 6), fmt(to, 6), std::to_string(steps)}, {}, 0};
    write_outputs(out, meta, {{"linearization.csv", csv}, {"linearization_summary.txt", line}});
    return ok;
}

int cmd_validate(const common& c) {
    run_config cfg;
    cfg.network_path = c.network;
    cfg.catalog_path = c.catalog;
    cfg.scenario_path = c.scenario;
    cfg.workers = c.workers;
    cfg.preset = c.preset_opt();
    auto d = validate_config(cfg);
    for (const auto& m : d) std::cout << m << "\n";
    if (d.empty()) std::cout << "ok\n";
    return d.empty() ? ok : parse;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV charging station placement on radial feeders"};
    app.require_subcommand(1);
    common c;
    std::string param, battery;
    double from = 0.0, to = 0.0;
    int steps = 0;

    auto* solve = app.add_subcommand("solve", "solve one scenario to a certified optimum");
    add_inputs(solve, c);
    auto* stack = app.add_subcommand("stack", "add the four cost terms one at a time");
    add_inputs(stack, c);
    auto* sweep = app.add_subcommand("sweep", "solve a one-parameter sweep");
    add_inputs(sweep, c);
    sweep->add_option("--param", param, "ev_per_hour | c4 | c5 | spot_cap")->required();
    sweep->add_option("--from", from)->required();
    sweep->add_option("--to", to)->required();
    sweep->add_option("--steps", steps)->required();
    sweep->add_option("--workers", c.workers)->check(CLI::PositiveNumber);
    auto* compare = app.add_subcommand("compare-convexification", "convex path against the local-search baseline");
    compare->add_option("--battery", battery, "battery file listing scenarios")->required();
    compare->add_option("--network", c.network, "network for entries without their own");
    compare->add_option("--catalog", c.catalog);
    compare->add_option("--out", c.out);
    compare->add_option("--workers", c.workers)->check(CLI::PositiveNumber);
    compare->add_option("--region-preset", c.preset)->check(CLI::IsMember({"us", "beijing"}));
    auto* share = app.add_subcommand("protection-share", "protection cost as a share of the total");
    add_inputs(share, c);
    auto* lin = app.add_subcommand("validate-linearization", "tabulate the 1/V linearization error");
    from = 0.95;
    to = 1.05;
    steps = 10001;
    lin->add_option("--from", from);
    lin->add_option("--to", to);
    lin->add_option("--steps", steps);
    lin->add_option("--out", c.out);
    auto* validate = app.add_subcommand("validate-config", "list every problem in the input files");
    add_inputs(validate, c, false);
    validate->add_option("--workers", c.workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*solve) return cmd_solve(c);
        if (*stack) return cmd_stack(c);
        if (*sweep) return cmd_sweep(c, param, from, to, steps);
        if (*compare) return cmd_compare(c, battery);
        if (*share) return cmd_share(c);
        if (*lin) return cmd_linearization(c.out, from, to, steps);
        if (*validate) return cmd_validate(c);
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return parse;
    } catch (const topology_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return parse;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return infeasible;
    } catch (const catalog_coverage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return coverage;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other;
    }
    return other;
}
