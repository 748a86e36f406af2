#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "baseline.hpp"
#include "enumerate.hpp"
#include "opt.hpp"
#include "report.hpp"
#include "scenario.hpp"

namespace evplace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; results keep index order.
template <class R>
std::vector<R> parallel_map(std::size_t n, int workers, const std::function<R(std::size_t)>& fn) {
    std::vector<R> out(n);
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline long region_spots(const problem& pb, const placement& p) {
    const auto yb = p.y_per_bus(pb.net().bus_count());
    long s = 0;
    for (auto b : pb.region()) s += yb[b];
    return s;
}

// ---------------------------------------------------------------- stacking

struct stack_row {
    std::string label;
    cost_terms terms;
    bool enumerated = false;
    std::string note;
    std::vector<placement> co_optimal; // enumeration
    placement enum_best;
    evaluation enum_exact;
    solve_report convex;
    std::optional<double> reference;

    // Enumeration result when available, else the convex one.
    const evaluation& costs() const { return enumerated ? enum_exact : convex.exact; }
};

struct stack_result {
    std::vector<stack_row> rows;
};

inline std::vector<cost_terms> stack_term_sets() {
    return {{true, false, false, false}, {true, true, false, false}, {true, true, true, false}, {true, true, true, true}};
}

inline stack_result constraint_stack(const network& net, const device_catalog& cat, const scenario& base,
                                     const solve_options& opt = {}) {
    stack_result res;
    const auto sets = stack_term_sets();
    res.rows.resize(sets.size());
    for (std::size_t r = 0; r < sets.size(); ++r) {
        auto& row = res.rows[r];
        scenario sc = base;
        sc.terms = sets[r];
        row.terms = sets[r];
        row.label = sets[r].label();
        problem pb(net, cat, sc);
        row.convex = solve_convex(pb, opt);
        try {
            auto e = enumerate_optimum(pb);
            row.enumerated = e.found;
            row.co_optimal = e.co_optimal;
            row.enum_best = e.best;
            row.enum_exact = e.exact;
        } catch (const domain_error& ex) {
            row.note = std::string("enumeration skipped: ") + ex.what();
        }
        if (r < base.stack_reference.size()) row.reference = base.stack_reference[r];
    }
    return res;
}

inline std::string set_str(const std::vector<placement>& ps) {
    std::string s = "{";
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? " " : "") + ps[i].str();
    return s + "}";
}

inline const char* stack_header() {
    return "terms,enumerated,enum_co_optimal,convex_placement,convex_status,c_sta,c_dis,c_vr,c_prot,total,"
           "total_without_c1,reference_total,residual,residual_without_c1,reference_delta,delta,delta_residual,note";
}

// One CSV line per stacking row. `delta` is the growth over the previous row; the
// residual of the row's newly added component is reference_delta - delta.
inline std::string stack_csv(const stack_result& s) {
    std::string out = std::string(stack_header()) + "\n";
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        const auto& row = s.rows[r];
        const auto& b = row.costs().breakdown;
        std::vector<std::string> c;
        c.push_back(row.label);
        c.push_back(row.enumerated ? "yes" : "no");
        // placements contain commas, so they are quoted
        c.push_back(row.enumerated ? "\"" + set_str(row.co_optimal) + "\"" : "");
        c.push_back(row.convex.status == solve_status::optimal ? "\"" + row.convex.place.str() + "\"" : "");
        c.push_back(to_string(row.convex.status));
        for (double v : {b.c_sta, b.c_dis, b.c_vr, b.c_prot, b.total, b.total_without_c1()}) c.push_back(fmt(v));
        if (row.reference) {
            c.push_back(fmt(*row.reference));
            c.push_back(fmt(*row.reference - b.total));
            c.push_back(fmt(*row.reference - b.total_without_c1()));
        } else {
            c.insert(c.end(), {"", "", ""});
        }
        if (r > 0 && row.reference && s.rows[r - 1].reference) {
            const double ref_delta = *row.reference - *s.rows[r - 1].reference;
            const double delta = b.total - s.rows[r - 1].costs().breakdown.total;
            c.push_back(fmt(ref_delta));
            c.push_back(fmt(delta));
            c.push_back(fmt(ref_delta - delta));
        } else {
            c.insert(c.end(), {"", "", ""});
        }
        c.push_back(row.note.empty() ? "" : "\"" + row.note + "\"");
        for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + c[i];
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------- sweeps

enum class sweep_param { ev_per_hour, c4, c5, spot_cap };

inline const char* to_string(sweep_param p) {
    switch (p) {
    case sweep_param::ev_per_hour: return "ev_per_hour";
    case sweep_param::c4: return "c4";
    case sweep_param::c5: return "c5";
    case sweep_param::spot_cap: return "spot_cap";
    }
    return "?";
}

inline sweep_param parse_sweep_param(const std::string& s) {
    if (s == "ev_per_hour") return sweep_param::ev_per_hour;
    if (s == "c4") return sweep_param::c4;
    if (s == "c5") return sweep_param::c5;
    if (s == "spot_cap") return sweep_param::spot_cap;
    throw domain_error("unknown sweep parameter '" + s + "' (ev_per_hour, c4, c5, spot_cap)");
}

struct sweep_spec {
    sweep_param parameter = sweep_param::ev_per_hour;
    std::vector<double> values;
};

inline std::vector<std::string> sweep_diagnostics(const sweep_spec& s) {
    std::vector<std::string> d;
    if (s.values.size() < 2) d.push_back("sweep needs at least 2 values");
    bool up = true, down = true;
    for (std::size_t i = 1; i < s.values.size(); ++i) {
        up = up && s.values[i] > s.values[i - 1];
        down = down && s.values[i] < s.values[i - 1];
    }
    if (s.values.size() >= 2 && !up && !down) d.push_back("sweep values must be strictly monotone");
    for (double v : s.values) {
        if (!std::isfinite(v) || !(v > 0.0)) d.push_back("sweep values must be positive");
        if (s.parameter == sweep_param::spot_cap && v != std::floor(v)) d.push_back("spot_cap sweep values must be integers");
    }
    return d;
}

// `steps` evenly spaced points from `from` to `to` inclusive.
inline sweep_spec make_sweep(sweep_param p, double from, double to, int steps) {
    sweep_spec s;
    s.parameter = p;
    if (steps < 2) throw domain_error("sweep needs at least 2 steps");
    for (int i = 0; i < steps; ++i) {
        double v = from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
        if (p == sweep_param::spot_cap) v = std::round(v);
        s.values.push_back(v);
    }
    auto d = sweep_diagnostics(s);
    if (!d.empty()) throw domain_error(d.front());
    return s;
}

inline scenario apply_sweep_value(scenario sc, sweep_param p, double v) {
    switch (p) {
    case sweep_param::ev_per_hour:
        sc.ev_per_hour = v;
        sc.occupancy.reset();
        sc.params.s_demand = vehicles_per_day(v);
        break;
    case sweep_param::c4: sc.params.c4 = v; break;
    case sweep_param::c5: sc.params.c5 = v; break;
    case sweep_param::spot_cap: sc.spot_cap = static_cast<int>(std::lround(v)); break;
    }
    return sc;
}

struct sweep_row {
    double value = 0.0;
    std::string status;
    int stations = 0;
    long spots = 0;
    long required = 0;
    double c_sta = 0, c_dis = 0, c_vr = 0, c_prot = 0, total = 0;
    long region = 0;
    double min_v = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
    bool certified = false;
    std::size_t warnings = 0;
    double seconds = 0.0; // kept out of the deterministic CSV
};

inline sweep_row solve_point(const network& net, const device_catalog& cat, const scenario& sc, double value,
                             const solve_options& opt) {
    sweep_row row;
    row.value = value;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        problem pb(net, cat, sc);
        row.required = pb.required_spots();
        auto r = solve_convex(pb, opt);
        row.status = to_string(r.status);
        row.nodes = r.nodes;
        row.lp_iterations = r.lp_iterations;
        row.certified = r.certified;
        if (r.status == solve_status::optimal || r.status == solve_status::node_limit) {
            const auto& b = r.exact.breakdown;
            row.stations = r.place.stations();
            row.spots = r.place.total_spots();
            row.c_sta = b.c_sta;
            row.c_dis = b.c_dis;
            row.c_vr = b.c_vr;
            row.c_prot = b.c_prot;
            row.total = b.total;
            row.region = region_spots(pb, r.place);
            row.min_v = r.exact.min_v;
            row.warnings = r.warnings.size();
        }
    } catch (const error& e) {
        row.status = std::string("error: ") + e.what();
    }
    row.seconds = seconds_since(t0);
    return row;
}

inline std::vector<sweep_row> run_sweep(const sweep_spec& spec, const network& net, const device_catalog& cat,
                                        const scenario& base, int workers = 1, const solve_options& opt = {}) {
    auto d = sweep_diagnostics(spec);
    if (!d.empty()) throw domain_error(d.front());
    return parallel_map<sweep_row>(spec.values.size(), workers, [&](std::size_t i) {
        return solve_point(net, cat, apply_sweep_value(base, spec.parameter, spec.values[i]), spec.values[i], opt);
    });
}

inline const char* sweep_header() {
    return "value,status,stations,spots,required_spots,c_sta,c_dis,c_vr,c_prot,total,region_spots,min_v_pu,nodes,"
           "lp_iterations,certified,warnings";
}

inline std::string sweep_csv(const sweep_spec& spec, const std::vector<sweep_row>& rows) {
    std::string out = std::string(sweep_header()) + "\n";
    for (const auto& r : rows) {
        const bool ok = r.status == "optimal" || r.status == "node-limit";
        out += fmt(r.value, spec.parameter == sweep_param::spot_cap ? 0 : 4) + "," + r.status + ",";
        if (ok) {
            out += std::to_string(r.stations) + "," + std::to_string(r.spots) + "," + std::to_string(r.required) + "," +
                   fmt(r.c_sta) + "," + fmt(r.c_dis) + "," + fmt(r.c_vr) + "," + fmt(r.c_prot) + "," + fmt(r.total) + "," +
                   std::to_string(r.region) + "," + fmt(r.min_v, 6);
        } else {
            out += ",," + std::to_string(r.required) + ",,,,,,,";
        }
        out += "," + std::to_string(r.nodes) + "," + std::to_string(r.lp_iterations) + "," + (r.certified ? "yes" : "no") +
               "," + std::to_string(r.warnings) + "\n";
    }
    return out;
}

inline std::string sweep_timing_csv(const sweep_spec& spec, const std::vector<sweep_row>& rows) {
    std::string out = "value,seconds\n";
    for (const auto& r : rows)
        out += fmt(r.value, spec.parameter == sweep_param::spot_cap ? 0 : 4) + "," + fmt(r.seconds, 4) + "\n";
    return out;
}

// ---------------------------------------------------------------- battery

struct battery_entry {
    std::string name;
    network net;
    scenario sc;
};

// A battery file lists scenario objects; each may name its own network file
// (relative to the battery file), otherwise `default_net` is used.
inline std::vector<battery_entry> load_battery(const std::string& path, const std::optional<network>& default_net,
                                               std::optional<std::string> preset = {}) {
    auto j = detail::parse_json(detail::read_text(path), "battery");
    if (!j.contains("scenarios") || !j["scenarios"].is_array()) throw parse_error("battery: missing scenarios array");
    const auto dir = std::filesystem::path(path).parent_path();
    std::vector<battery_entry> out;
    std::map<std::string, network> cache;
    for (const auto& e : j["scenarios"]) {
        battery_entry b;
        b.sc = scenario_from_json(e, preset);
        b.name = b.sc.name;
        if (e.contains("network")) {
            const auto p = (dir / e["network"].get<std::string>()).string();
            auto it = cache.find(p);
            if (it == cache.end()) it = cache.emplace(p, load_network(p)).first;
            b.net = it->second;
        } else if (default_net) {
            b.net = *default_net;
        } else {
            throw parse_error("battery: scenario '" + b.name + "' has no network and none was given");
        }
        out.push_back(std::move(b));
    }
    return out;
}

// ---------------------------------------------------------------- convexification comparison

struct comparison_case {
    std::string name;
    solve_status convex_status = solve_status::infeasible;
    bool convex_certified = false;
    bool convex_exact_feasible = false;
    double convex_total = lp_inf;
    std::string convex_place;
    long nodes = 0;
    std::optional<double> enum_total; // when enumeration is allowed
    std::vector<std::string> starts;
    std::vector<double> baseline_totals;
    std::vector<std::string> baseline_places;
    std::vector<bool> baseline_failed;
    std::vector<long> baseline_evaluations;
    long convex_start_moves = -1; // moves from the convex optimum (0 = locally optimal)
    double convex_seconds = 0.0;
    std::vector<double> baseline_seconds;
};

struct comparison_summary {
    int scenarios = 0;
    int convex_failures = 0;
    int baseline_cases = 0;
    int baseline_failures = 0;
    int scenarios_with_baseline_failure = 0;
    double convex_failure_pct = 0.0;
    double nonconvex_failure_pct = 0.0;
    double avg_convex_cost = 0.0;
    double avg_nonconvex_cost = 0.0;
    double max_enum_gap_pct = 0.0;
    double avg_convex_seconds = 0.0;
    double avg_nonconvex_seconds = 0.0;
};

inline constexpr double baseline_fail_tol = 1e-3; // relative, 0.1 %

inline comparison_case compare_one(const battery_entry& e, const device_catalog& cat, const solve_options& opt) {
    comparison_case c;
    c.name = e.name;
    problem pb(e.net, cat, e.sc);
    auto t0 = std::chrono::steady_clock::now();
    auto r = solve_convex(pb, opt);
    c.convex_seconds = seconds_since(t0);
    c.convex_status = r.status;
    c.convex_certified = r.status == solve_status::optimal && r.certified;
    c.nodes = r.nodes;
    if (r.status == solve_status::optimal) {
        c.convex_exact_feasible = r.exact.feasible;
        c.convex_total = r.exact.breakdown.total;
        c.convex_place = r.place.str();
    }
    if (enumeration_size(pb) <= 1e6 && pb.candidates().size() <= 6) {
        auto en = enumerate_optimum(pb);
        if (en.found) c.enum_total = en.exact.breakdown.total;
    }
    for (auto st : {baseline_start::all_zeros_repair, baseline_start::spread_uniform}) {
        t0 = std::chrono::steady_clock::now();
        auto b = solve_nonconvex_baseline(pb, st);
        c.baseline_seconds.push_back(seconds_since(t0));
        c.starts.push_back(b.start);
        const double tot = b.exact.feasible ? b.exact.breakdown.total : lp_inf;
        c.baseline_totals.push_back(tot);
        c.baseline_places.push_back(b.place.str());
        c.baseline_evaluations.push_back(b.evaluations);
        c.baseline_failed.push_back(!(tot <= c.convex_total * (1.0 + baseline_fail_tol)));
    }
    if (r.status == solve_status::optimal) c.convex_start_moves = solve_nonconvex_baseline(pb, baseline_start::given, &r.place).moves;
    return c;
}

inline std::vector<comparison_case> convexification_comparison(const std::vector<battery_entry>& battery,
                                                               const device_catalog& cat, int workers = 1,
                                                               const solve_options& opt = {}) {
    return parallel_map<comparison_case>(battery.size(), workers,
                                         [&](std::size_t i) { return compare_one(battery[i], cat, opt); });
}

inline comparison_summary summarize(const std::vector<comparison_case>& cases) {
    comparison_summary s;
    double conv_sum = 0, nonconv_sum = 0, cs = 0, ns = 0;
    int conv_n = 0, nonconv_n = 0;
    for (const auto& c : cases) {
        ++s.scenarios;
        if (!c.convex_certified) ++s.convex_failures;
        if (std::isfinite(c.convex_total)) {
            conv_sum += c.convex_total;
            ++conv_n;
        }
        if (c.enum_total && std::isfinite(c.convex_total))
            s.max_enum_gap_pct = std::max(s.max_enum_gap_pct, 100.0 * (c.convex_total - *c.enum_total) / *c.enum_total);
        cs += c.convex_seconds;
        bool any = false;
        for (std::size_t k = 0; k < c.starts.size(); ++k) {
            ++s.baseline_cases;
            if (c.baseline_failed[k]) {
                ++s.baseline_failures;
                any = true;
            }
            if (std::isfinite(c.baseline_totals[k])) {
                nonconv_sum += c.baseline_totals[k];
                ++nonconv_n;
            }
            ns += c.baseline_seconds[k];
        }
        if (any) ++s.scenarios_with_baseline_failure;
    }
    if (s.scenarios) {
        s.convex_failure_pct = 100.0 * s.convex_failures / s.scenarios;
        s.avg_convex_seconds = cs / s.scenarios;
    }
    if (s.baseline_cases) {
        s.nonconvex_failure_pct = 100.0 * s.baseline_failures / s.baseline_cases;
        s.avg_nonconvex_seconds = ns / s.baseline_cases;
    }
    if (conv_n) s.avg_convex_cost = conv_sum / conv_n;
    if (nonconv_n) s.avg_nonconvex_cost = nonconv_sum / nonconv_n;
    return s;
}

inline const char* comparison_header() {
    return "scenario,convex_status,convex_certified,convex_exact_feasible,convex_placement,convex_total,nodes,"
           "enum_total,enum_gap_pct,start,baseline_placement,baseline_total,baseline_gap_pct,baseline_failed,"
           "baseline_evaluations,convex_start_moves";
}

inline std::string comparison_csv(const std::vector<comparison_case>& cases) {
    std::string out = std::string(comparison_header()) + "\n";
    for (const auto& c : cases)
        for (std::size_t k = 0; k < c.starts.size(); ++k) {
            const std::string gap_e =
                c.enum_total && std::isfinite(c.convex_total) ? fmt(100.0 * (c.convex_total - *c.enum_total) / *c.enum_total, 4) : "";
            const std::string gap_b = std::isfinite(c.baseline_totals[k]) && std::isfinite(c.convex_total)
                                          ? fmt(100.0 * (c.baseline_totals[k] - c.convex_total) / c.convex_total, 4)
                                          : "";
            out += c.name + "," + to_string(c.convex_status) + "," + (c.convex_certified ? "yes" : "no") + "," +
                   (c.convex_exact_feasible ? "yes" : "no") + ",\"" + c.convex_place + "\"," + fmt(c.convex_total) + "," +
                   std::to_string(c.nodes) + "," + (c.enum_total ? fmt(*c.enum_total) : "") + "," + gap_e + "," +
                   c.starts[k] + ",\"" + c.baseline_places[k] + "\"," + fmt(c.baseline_totals[k]) + "," + gap_b + "," +
                   (c.baseline_failed[k] ? "yes" : "no") + "," + std::to_string(c.baseline_evaluations[k]) + "," +
                   std::to_string(c.convex_start_moves) + "\n";
        }
    return out;
}

inline std::string comparison_summary_csv(const comparison_summary& s) {
    std::string out =
        "path,failures_pct,cases,failures,avg_cost,max_enum_gap_pct\n";
    out += "convex," + fmt(s.convex_failure_pct, 1) + "," + std::to_string(s.scenarios) + "," +
           std::to_string(s.convex_failures) + "," + fmt(s.avg_convex_cost) + "," + fmt(s.max_enum_gap_pct, 4) + "\n";
    out += "nonconvex," + fmt(s.nonconvex_failure_pct, 1) + "," + std::to_string(s.baseline_cases) + "," +
           std::to_string(s.baseline_failures) + "," + fmt(s.avg_nonconvex_cost) + ",\n";
    return out;
}

inline std::string comparison_timing_csv(const std::vector<comparison_case>& cases) {
    std::string out = "scenario,path,seconds\n";
    for (const auto& c : cases) {
        out += c.name + ",convex," + fmt(c.convex_seconds, 4) + "\n";
        for (std::size_t k = 0; k < c.starts.size(); ++k) out += c.name + "," + c.starts[k] + "," + fmt(c.baseline_seconds[k], 4) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- protection share

struct share_result {
    solve_status status = solve_status::infeasible;
    double total = 0.0;
    double protection = 0.0;
    double share_pct = 0.0;
    double over_baseline = 0.0;
    double over_baseline_pct = 0.0;
    int stations = 0;
    long spots = 0;
    std::size_t upgrades = 0;
};

inline share_result protection_share(const problem& pb, const solve_options& opt = {}) {
    share_result s;
    auto r = solve_convex(pb, opt);
    s.status = r.status;
    if (r.status != solve_status::optimal) return s;
    const auto& b = r.exact.breakdown;
    s.total = b.total;
    s.protection = b.c_prot;
    s.share_pct = b.total > 0 ? 100.0 * b.c_prot / b.total : 0.0;
    s.over_baseline = b.prot_over_baseline;
    s.over_baseline_pct = b.total > 0 ? 100.0 * b.prot_over_baseline / b.total : 0.0;
    s.stations = r.place.stations();
    s.spots = r.place.total_spots();
    s.upgrades = b.protection.upgrades.size();
    return s;
}

inline std::string share_csv(const std::string& name, const share_result& s) {
    return "scenario,status,stations,spots,total,c_prot,protection_pct,prot_over_baseline,over_baseline_pct,upgrades\n" +
           name + "," + to_string(s.status) + "," + std::to_string(s.stations) + "," + std::to_string(s.spots) + "," +
           fmt(s.total) + "," + fmt(s.protection) + "," + fmt(s.share_pct, 4) + "," + fmt(s.over_baseline) + "," +
           fmt(s.over_baseline_pct, 4) + "," + std::to_string(s.upgrades) + "\n";
}

// ---------------------------------------------------------------- random toy scenarios

// Toy-scale scenarios on the 4-bus chain: 1 to 3 candidates among buses 2..4, at most
// 40 spots; costs, lengths, caps and line weights drawn from a seeded generator.
inline std::vector<scenario> random_toy_scenarios(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) {
        return a + (b - a) * static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    };
    auto pick = [&](int a, int b) { return a + static_cast<int>(rng() % static_cast<std::uint64_t>(b - a + 1)); };
    std::vector<scenario> out;
    for (int n = 0; n < count; ++n) {
        scenario s;
        s.name = "toy-random-" + std::to_string(n);
        s.preset = pick(0, 1) ? "beijing" : "us";
        s.params = regional_preset(s.preset);
        std::vector<int> cands;
        while (cands.empty())
            for (int b = 2; b <= 4; ++b)
                if (pick(0, 1)) cands.push_back(b);
        s.candidates = cands;
        const int spots = pick(5, 40);
        s.params.s_demand = spots * s.params.d_per_spot - uni(0.0, s.params.d_per_spot - 1.0);
        const int k = static_cast<int>(cands.size());
        const int min_cap = (spots + k - 1) / k;
        if (pick(0, 2) > 0) s.spot_cap = pick(min_cap, spots);
        s.params.c5 *= uni(0.5, 20.0);
        for (int b : cands) s.expansion_length_km[b] = uni(0.0, 0.3);
        s.trend_scale["fuse"] = uni(0.3, 1.5);
        s.trend_scale["overcurrent-relay"] = uni(0.3, 1.5);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace evplace
