#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "catalog.hpp"
#include "costs.hpp"
#include "errors.hpp"
#include "network.hpp"
#include "powerflow.hpp"

namespace evplace {

inline cost_parameters regional_preset(const std::string& name) {
    cost_parameters p;
    if (name == "us") return p;
    if (name == "beijing") {
        p.c1 = 50640.0;
        p.c2 = 7122.0;
        p.c3 = 43.0;
        p.c4 = 102.0;
        return p;
    }
    throw domain_error("unknown region preset '" + name + "'");
}

struct scenario {
    std::string name;
    std::string preset = "us";
    cost_parameters params;
    // Demand source: exactly one is used, priority occupancy > ev_per_hour > vehicles/day.
    std::optional<double> ev_per_hour;
    std::optional<double> occupancy;
    std::optional<int> spot_cap; // unset: unlimited
    std::optional<std::vector<int>> candidates;
    std::map<int, double> expansion_length_km;
    cost_terms terms;
    std::map<std::string, double> trend_scale; // multiplier on a type's in-model cost line
    double catalog_price_scale = 1.0;
    std::string region_name;
    std::vector<int> region_buses;
    double v_min = 0.95;
    double v_max = 1.05;
    std::vector<double> stack_reference; // externally reported totals for the stacking rows
};

// Vehicles per day from an hourly EV flow.
inline double vehicles_per_day(double ev_per_hour) { return ev_per_hour * 24.0; }

inline std::vector<std::string> scenario_diagnostics(const scenario& s) {
    std::vector<std::string> d = s.params.diagnostics();
    if (s.spot_cap && *s.spot_cap < 1) d.push_back("spot_cap must be >= 1");
    if (s.occupancy && !s.spot_cap) d.push_back("occupancy demand requires a finite spot_cap");
    if (s.occupancy && !(*s.occupancy > 0.0)) d.push_back("occupancy must be positive");
    if (s.ev_per_hour && !(*s.ev_per_hour > 0.0)) d.push_back("ev_per_hour must be positive");
    if (!(s.v_min > 0.0 && s.v_min < s.v_max)) d.push_back("voltage band must satisfy 0 < v_min < v_max");
    if (!(s.catalog_price_scale > 0.0)) d.push_back("catalog_price_scale must be positive");
    for (const auto& [k, v] : s.trend_scale)
        if (!(v >= 0.0)) d.push_back("trend_scale." + k + " must be non-negative");
    for (const auto& [b, l] : s.expansion_length_km)
        if (!(l >= 0.0)) d.push_back("expansion_length_km." + std::to_string(b) + " must be non-negative");
    return d;
}

inline scenario scenario_from_json(const nlohmann::json& j, std::optional<std::string> preset_override = {}) {
    if (!j.is_object()) throw parse_error("scenario: expected an object");
    scenario s;
    try {
        s.name = j.value("name", std::string());
        s.preset = preset_override ? *preset_override : j.value("preset", std::string("us"));
        s.params = regional_preset(s.preset);
        if (j.contains("params")) {
            const auto& p = j["params"];
            auto rd = [&](const char* k, double& dst) {
                if (p.contains(k) && !p[k].is_null()) dst = p[k].get<double>();
            };
            rd("c1", s.params.c1);
            rd("c2", s.params.c2);
            rd("c3", s.params.c3);
            rd("c4", s.params.c4);
            rd("c5", s.params.c5);
            rd("p_ev_kw", s.params.p_ev_kw);
            rd("p_sur_kw", s.params.p_sur_kw);
            rd("d_per_spot", s.params.d_per_spot);
            rd("i_ev_a", s.params.i_ev_a);
            rd("horizon_years", s.params.horizon_years);
            rd("budget", s.params.budget);
        }
        if (j.contains("demand")) {
            const auto& d = j["demand"];
            if (d.contains("vehicles_per_day")) s.params.s_demand = d["vehicles_per_day"].get<double>();
            if (d.contains("ev_per_hour")) s.ev_per_hour = d["ev_per_hour"].get<double>();
            if (d.contains("occupancy")) s.occupancy = d["occupancy"].get<double>();
        }
        if (s.ev_per_hour) s.params.s_demand = vehicles_per_day(*s.ev_per_hour);
        if (j.contains("spot_cap") && !j["spot_cap"].is_null()) s.spot_cap = j["spot_cap"].get<int>();
        if (j.contains("candidates") && !j["candidates"].is_null())
            s.candidates = j["candidates"].get<std::vector<int>>();
        if (j.contains("expansion_length_km"))
            for (const auto& [k, v] : j["expansion_length_km"].items()) s.expansion_length_km[std::stoi(k)] = v.get<double>();
        if (j.contains("terms")) {
            const auto& t = j["terms"];
            s.terms.station = t.value("station", true);
            s.terms.distribution = t.value("distribution", true);
            s.terms.voltage = t.value("voltage", true);
            s.terms.protection = t.value("protection", true);
        }
        if (j.contains("trend_scale"))
            for (const auto& [k, v] : j["trend_scale"].items()) s.trend_scale[k] = v.get<double>();
        s.catalog_price_scale = j.value("catalog_price_scale", 1.0);
        if (j.contains("region")) {
            s.region_name = j["region"].value("name", std::string("region"));
            s.region_buses = j["region"].value("buses", std::vector<int>{});
        }
        if (j.contains("stack_reference")) s.stack_reference = j["stack_reference"].get<std::vector<double>>();
        if (j.contains("voltage_band")) {
            auto vb = j["voltage_band"].get<std::vector<double>>();
            if (vb.size() != 2) throw parse_error("scenario: voltage_band needs two values");
            s.v_min = vb[0];
            s.v_max = vb[1];
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("scenario: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw parse_error("scenario: non-integer bus key");
    }
    return s;
}

inline scenario parse_scenario(const std::string& text, std::optional<std::string> preset = {}) {
    return scenario_from_json(detail::parse_json(text, "scenario"), preset);
}

inline scenario load_scenario(const std::string& path, std::optional<std::string> preset = {}) {
    return parse_scenario(detail::read_text(path), preset);
}

// A network, catalog and scenario bound together and resolved for solving:
// base currents filled, devices sized, demand converted, candidates fixed.
class problem {
public:
    problem(network net, device_catalog cat, scenario sc) : net_(std::move(net)), cat_(std::move(cat)), sc_(std::move(sc)) {
        auto diag = scenario_diagnostics(sc_);
        if (!diag.empty()) throw parse_error("scenario: " + diag.front());
        auto cdiag = validate_catalog(cat_);
        if (!cdiag.empty()) throw parse_error("catalog: " + cdiag.front());
        if (sc_.catalog_price_scale != 1.0) cat_.scale_prices(sc_.catalog_price_scale);
        fill_base_currents(net_);
        devices_ = resolve_devices(net_, cat_);
        if (sc_.candidates) {
            std::set<std::size_t> idx;
            for (int id : *sc_.candidates) {
                if (!net_.has_bus(id)) throw parse_error("scenario: candidate bus " + std::to_string(id) + " not in network");
                const auto b = net_.index_of(id);
                if (b == 0) throw parse_error("scenario: slack bus cannot host a station");
                idx.insert(b);
            }
            candidates_.assign(idx.begin(), idx.end());
        } else {
            candidates_ = net_.candidate_indices();
        }
        if (candidates_.empty()) throw parse_error("scenario: no candidate buses");
        for (std::size_t b : candidates_) {
            expansion_line l;
            const auto k = *net_.feeding_branch(b);
            l.length_km = net_.branches()[k].length_km;
            l.capacity_kva = net_.branches()[k].capacity_kva;
            auto it = sc_.expansion_length_km.find(net_.buses()[b].id);
            if (it != sc_.expansion_length_km.end()) l.length_km = it->second;
            lines_.push_back(l);
        }
        params_ = sc_.params;
        if (sc_.occupancy)
            params_.s_demand = *sc_.occupancy * static_cast<double>(candidates_.size()) * *sc_.spot_cap * params_.d_per_spot;
        for (int id : sc_.region_buses)
            if (net_.has_bus(id)) region_.push_back(net_.index_of(id));
        pf_ = std::make_shared<power_flow>(net_);
        base_inj_ = base_injections(net_);
    }

    const network& net() const { return net_; }
    const device_catalog& catalog() const { return cat_; }
    const scenario& sc() const { return sc_; }
    const cost_parameters& params() const { return params_; }
    const cost_terms& terms() const { return sc_.terms; }
    const std::vector<std::optional<device_ref>>& devices() const { return devices_; }
    const std::vector<std::size_t>& candidates() const { return candidates_; }
    const std::vector<expansion_line>& lines() const { return lines_; }
    const power_flow& pf() const { return *pf_; }
    const injection_set& base_injection() const { return base_inj_; }
    const std::vector<std::size_t>& region() const { return region_; }

    long required_spots() const { return params_.required_spots(); }
    // Per-station cap used for bounds; unlimited caps fall back to the demand itself.
    int effective_cap() const {
        const long need = std::max(1L, required_spots());
        if (!sc_.spot_cap) return static_cast<int>(need);
        return *sc_.spot_cap;
    }

    placement empty_placement() const {
        placement p;
        p.buses = candidates_;
        p.x.assign(candidates_.size(), 0);
        p.y.assign(candidates_.size(), 0);
        return p;
    }

    injection_set injections_for(const placement& p) const {
        injection_set inj = base_inj_;
        add_spot_load(inj, net_, p.y_per_bus(net_.bus_count()), params_.p_ev_kw);
        return inj;
    }

    // Scenario with every candidate multiplied out (for reports).
    std::vector<int> candidate_ids() const {
        std::vector<int> ids;
        for (auto b : candidates_) ids.push_back(net_.buses()[b].id);
        return ids;
    }

private:
    network net_;
    device_catalog cat_;
    scenario sc_;
    cost_parameters params_;
    std::vector<std::optional<device_ref>> devices_;
    std::vector<std::size_t> candidates_;
    std::vector<expansion_line> lines_;
    std::vector<std::size_t> region_;
    std::shared_ptr<power_flow> pf_;
    injection_set base_inj_;
};

// Exact (non-convex) evaluation of a placement: Newton voltages, step protection
// costs, and every feasibility check.
struct evaluation {
    cost_breakdown breakdown;
    bool feasible = true;
    std::vector<std::string> violations;
    std::vector<double> branch_current_a;
    double min_v = 1.0;
    double max_v = 1.0;
    int newton_iterations = 0;
    double newton_mismatch = 0.0;
};

inline evaluation evaluate(const problem& pb, const placement& p, const Eigen::VectorXcd* warm = nullptr) {
    evaluation ev;
    const auto& c = pb.params();
    const auto& t = pb.terms();
    auto& bd = ev.breakdown;

    for (const auto& d : placement_diagnostics(p, pb.sc().spot_cap)) ev.violations.push_back(d);
    if (c.d_per_spot * static_cast<double>(p.total_spots()) < c.s_demand - 1e-9)
        ev.violations.push_back("serviceability: D*sum(y) below demand");

    bd.c1_part = t.station ? c.c1 * p.stations() : 0.0;
    bd.c_sta = t.station ? station_cost(p, c) : 0.0;
    bd.substation_kw = substation_expansion_kw(p.total_spots(), c);
    bd.c_dis = t.distribution ? distribution_cost(p, pb.lines(), c) : 0.0;

    newton_options opt;
    if (warm) opt.initial = *warm;
    try {
        auto sol = pb.pf().newton(pb.injections_for(p), opt);
        ev.newton_iterations = sol.iterations;
        ev.newton_mismatch = sol.mismatch;
        bd.vm = sol.magnitudes();
        ev.branch_current_a = branch_currents_a(pb.net(), sol.full());
    } catch (const convergence_error& e) {
        ev.violations.push_back(std::string("power flow: ") + e.what());
        ev.feasible = false;
        bd.c_vr = bd.c_prot = std::numeric_limits<double>::infinity();
        bd.total = std::numeric_limits<double>::infinity();
        return ev;
    }
    ev.min_v = bd.vm.minCoeff();
    ev.max_v = bd.vm.maxCoeff();
    const auto& sc = pb.sc();
    for (Eigen::Index b = 1; b < bd.vm.size(); ++b)
        if (bd.vm(b) < sc.v_min - 1e-9 || bd.vm(b) > sc.v_max + 1e-9) {
            ev.violations.push_back("voltage band at bus " + std::to_string(pb.net().buses()[static_cast<std::size_t>(b)].id));
        }
    for (std::size_t k = 0; k < pb.net().branch_count(); ++k)
        if (ev.branch_current_a[k] > pb.net().branches()[k].rated_current_a * (1.0 + 1e-9))
            ev.violations.push_back("current rating on branch " + std::to_string(pb.net().branches()[k].id));
    bd.c_vr = t.voltage ? voltage_regulation_cost(bd.vm, c) : 0.0;

    try {
        bd.protection = protection_cost(pb.net(), pb.devices(), pb.catalog(), c, p.y_per_bus(pb.net().bus_count()));
        bd.prot_over_baseline = bd.protection.cost - bd.protection.baseline;
        bd.c_prot = t.protection ? bd.protection.cost : 0.0;
        if (!t.protection) bd.prot_over_baseline = 0.0;
    } catch (const catalog_coverage_error& e) {
        ev.violations.push_back(std::string("catalog coverage: ") + e.what());
        bd.c_prot = std::numeric_limits<double>::infinity();
    }
    bd.total = bd.c_sta + bd.c_dis + bd.c_vr + bd.c_prot;
    if (std::isfinite(c.budget) && bd.total > c.budget) {
        bd.budget_violated = true;
        ev.violations.push_back("budget exceeded");
    }
    ev.feasible = ev.violations.empty();
    return ev;
}

} // namespace evplace
