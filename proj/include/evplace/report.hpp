#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "opt.hpp"
#include "scenario.hpp"

namespace evplace {

inline constexpr const char* version_string = "1.0.0";

// Fixed-point text for CSV cells; non-finite values become "inf"/"nan".
inline std::string fmt(double v, int digits = 2) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s(buf);
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        bool zero = true;
        for (char ch : s)
            if (ch >= '1' && ch <= '9') zero = false;
        if (zero) s.erase(0, 1);
    }
    return s;
}

// Cents-rounded money for JSON so repeated runs agree to the byte.
inline nlohmann::json money(double v) {
    if (!std::isfinite(v)) return fmt(v);
    return std::round(v * 100.0) / 100.0;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json placement_json(const problem& pb, const placement& p) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < p.buses.size(); ++i)
        j.push_back({{"bus", pb.net().buses()[p.buses[i]].id}, {"station", p.x[i]}, {"spots", p.y[i]}});
    return j;
}

inline nlohmann::json breakdown_json(const cost_breakdown& b) {
    nlohmann::json ups = nlohmann::json::array();
    for (const auto& u : b.protection.upgrades)
        ups.push_back({{"branch", u.branch_id},
                       {"type", u.type},
                       {"old_class", u.old_class},
                       {"new_class", u.new_class},
                       {"current_a", std::round(u.current_a * 1e4) / 1e4}});
    return {{"c_sta", money(b.c_sta)},
            {"c_dis", money(b.c_dis)},
            {"c_vr", money(b.c_vr)},
            {"c_prot", money(b.c_prot)},
            {"total", money(b.total)},
            {"total_without_c1", money(b.total_without_c1())},
            {"c1_part", money(b.c1_part)},
            {"prot_over_baseline", money(b.prot_over_baseline)},
            {"substation_expansion_kw", std::round(b.substation_kw * 1e4) / 1e4},
            {"budget_violated", b.budget_violated},
            {"protection",
             {{"acquisition", money(b.protection.acquisition)},
              {"install", money(b.protection.install)},
              {"uninstall", money(b.protection.uninstall)},
              {"maintenance", money(b.protection.maintenance)},
              {"baseline_maintenance", money(b.protection.baseline)},
              {"upgrades", ups}}}};
}

inline nlohmann::json voltages_json(const problem& pb, const evaluation& ev) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index b = 0; b < ev.breakdown.vm.size(); ++b)
        j.push_back({{"bus", pb.net().buses()[static_cast<std::size_t>(b)].id},
                     {"v_pu", std::round(ev.breakdown.vm(b) * 1e8) / 1e8}});
    return j;
}

inline nlohmann::json evaluation_json(const problem& pb, const evaluation& ev) {
    return {{"feasible", ev.feasible},
            {"violations", ev.violations},
            {"breakdown", breakdown_json(ev.breakdown)},
            {"min_v_pu", std::round(ev.min_v * 1e8) / 1e8},
            {"max_v_pu", std::round(ev.max_v * 1e8) / 1e8},
            {"newton_iterations", ev.newton_iterations},
            {"newton_mismatch_below_1e-8", ev.newton_mismatch < 1e-8},
            {"voltages", voltages_json(pb, ev)}};
}

inline nlohmann::json bound_json(double v) {
    if (!std::isfinite(v)) return nullptr;
    return money(v);
}

inline nlohmann::json report_json(const problem& pb, const solve_report& r) {
    nlohmann::json regimes = nlohmann::json::array();
    for (const auto& rr : r.regimes)
        regimes.push_back({{"regime", to_string(rr.regime)},
                           {"rows", rr.rows},
                           {"cols", rr.cols},
                           {"root_status", to_string(rr.bnb.root_status)},
                           {"found", rr.bnb.found},
                           {"model_objective", bound_json(rr.bnb.objective)},
                           {"exact_total", rr.exact ? money(rr.exact->breakdown.total) : nlohmann::json(nullptr)},
                           {"nodes", rr.bnb.nodes},
                           {"certified", rr.bnb.certified}});
    nlohmann::json j = {{"scenario", pb.sc().name},
                        {"status", to_string(r.status)},
                        {"message", r.message},
                        {"stations", r.place.stations()},
                        {"spots", r.place.total_spots()},
                        {"required_spots", pb.required_spots()},
                        {"placement", placement_json(pb, r.place)},
                        {"relaxation_bound", bound_json(r.relaxation_bound)},
                        {"model_objective", bound_json(r.model_objective)},
                        {"best_bound", bound_json(r.best_bound)},
                        {"nodes", r.nodes},
                        {"lp_iterations", r.lp_iterations},
                        {"certified", r.certified},
                        {"regime", r.regime},
                        {"warnings", r.warnings},
                        {"regimes", regimes}};
    if (r.status == solve_status::optimal || r.status == solve_status::node_limit)
        j["evaluation"] = evaluation_json(pb, r.exact);
    return j;
}

// Human-readable summary with the four cost components.
inline std::string report_text(const problem& pb, const solve_report& r) {
    std::string s = "status: " + std::string(to_string(r.status)) + "\n";
    if (!r.message.empty()) s += "message: " + r.message + "\n";
    if (r.status != solve_status::optimal && r.status != solve_status::node_limit) return s;
    std::string pl;
    for (std::size_t i = 0; i < r.place.buses.size(); ++i)
        if (r.place.y[i] > 0)
            pl += (pl.empty() ? "" : " ") + std::to_string(pb.net().buses()[r.place.buses[i]].id) + ":" +
                  std::to_string(r.place.y[i]);
    const auto& b = r.exact.breakdown;
    s += "placement " + r.place.str() + "\n";
    s += "stations " + std::to_string(r.place.stations()) + ", spots " + std::to_string(r.place.total_spots()) +
         " (bus:spots " + pl + ")\n";
    s += "C_sta  " + fmt(b.c_sta) + "\n";
    s += "C_dis  " + fmt(b.c_dis) + "\n";
    s += "C_vr   " + fmt(b.c_vr) + "\n";
    s += "C_prot " + fmt(b.c_prot) + " (over baseline " + fmt(b.prot_over_baseline) + ")\n";
    s += "total  " + fmt(b.total) + " (without c1 " + fmt(b.total_without_c1()) + ")\n";
    s += "voltage range [" + fmt(r.exact.min_v, 5) + ", " + fmt(r.exact.max_v, 5) + "] p.u.\n";
    s += "relaxation bound " + fmt(r.relaxation_bound) + ", nodes " + std::to_string(r.nodes) +
         (r.certified ? ", certified" : ", not certified") + "\n";
    for (const auto& w : r.warnings) s += "warning: " + w + "\n";
    return s;
}

} // namespace evplace
