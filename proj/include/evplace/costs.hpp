#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "catalog.hpp"
#include "errors.hpp"
#include "network.hpp"

namespace evplace {

struct cost_parameters {
    double c1 = 163000.0;   // $/station
    double c2 = 31640.0;    // $/spot
    double c3 = 120.0;      // $/(kVA km)
    double c4 = 788.0;      // $/kVA
    double c5 = 50000.0;    // $/p.u.^2
    double p_ev_kw = 44.0;  // kW per spot
    double p_sur_kw = 1000.0;
    double d_per_spot = 68.0; // vehicles/day per spot
    double s_demand = 2040.0; // vehicles/day
    double i_ev_a = 2.0;      // A per spot
    double budget = std::numeric_limits<double>::infinity();
    double horizon_years = 1.0;

    std::vector<std::string> diagnostics() const {
        std::vector<std::string> d;
        auto pos = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) d.push_back(std::string(name) + " must be positive");
        };
        pos(c1, "c1");
        pos(c2, "c2");
        pos(c3, "c3");
        pos(c4, "c4");
        pos(c5, "c5");
        pos(p_ev_kw, "p_ev_kw");
        pos(p_sur_kw, "p_sur_kw");
        pos(s_demand, "s_demand");
        pos(i_ev_a, "i_ev_a");
        pos(horizon_years, "horizon_years");
        if (!(d_per_spot >= 1.0) || !std::isfinite(d_per_spot)) d.push_back("d_per_spot must be ≥ 1");
        if (!(budget > 0.0)) d.push_back("budget must be positive");
        return d;
    }

    // Spots needed to cover demand S with D vehicles per spot.
    long required_spots() const { return static_cast<long>(std::ceil(s_demand / d_per_spot - 1e-9)); }
    // Smallest spot count whose load reaches the substation surplus.
    long surplus_threshold_spots() const { return static_cast<long>(std::ceil(p_sur_kw / p_ev_kw - 1e-12)); }
};

// Which objective terms are active (constraint-stacking toggles).
struct cost_terms {
    bool station = true;
    bool distribution = true;
    bool voltage = true;
    bool protection = true;

    std::string label() const {
        std::string s;
        auto add = [&](bool on, const char* n) {
            if (!on) return;
            if (!s.empty()) s += "+";
            s += n;
        };
        add(station, "C_sta");
        add(distribution, "C_dis");
        add(voltage, "C_vr");
        add(protection, "C_prot");
        return s.empty() ? "none" : s;
    }
};

// Decision variables over the candidate buses (internal bus indices in `buses`).
struct placement {
    std::vector<std::size_t> buses;
    std::vector<int> x;
    std::vector<int> y;

    long total_spots() const {
        long s = 0;
        for (int v : y) s += v;
        return s;
    }
    int stations() const {
        int s = 0;
        for (int v : x) s += v;
        return s;
    }
    std::vector<int> y_per_bus(std::size_t bus_count) const {
        std::vector<int> out(bus_count, 0);
        for (std::size_t i = 0; i < buses.size(); ++i) out[buses[i]] = y[i];
        return out;
    }
    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
        os << ")";
        return os.str();
    }
    bool operator==(const placement& o) const { return buses == o.buses && x == o.x && y == o.y; }
    bool operator<(const placement& o) const { return std::tie(y, x) < std::tie(o.y, o.x); }

    // x_i = [y_i > 0].
    static placement from_spots(std::vector<std::size_t> buses, std::vector<int> y) {
        placement p;
        p.buses = std::move(buses);
        p.y = std::move(y);
        p.x.resize(p.y.size());
        for (std::size_t i = 0; i < p.y.size(); ++i) p.x[i] = p.y[i] > 0 ? 1 : 0;
        return p;
    }
};

inline std::vector<std::string> placement_diagnostics(const placement& p, std::optional<int> cap) {
    std::vector<std::string> d;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
        if (p.x[i] != 0 && p.x[i] != 1) d.push_back("x must be binary");
        if (p.y[i] < 0) d.push_back("y must be non-negative");
        if (p.y[i] > 0 && p.x[i] == 0) d.push_back("spots at a closed station");
        if (cap && p.y[i] > *cap) d.push_back("spot cap exceeded");
    }
    return d;
}

inline double station_cost(const placement& p, const cost_parameters& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) s += c.c1 * p.x[i] + c.c2 * p.y[i];
    return s;
}

inline double substation_expansion_kw(long total_spots, const cost_parameters& c) {
    const double load = c.p_ev_kw * static_cast<double>(total_spots);
    return load < c.p_sur_kw ? 0.0 : load;
}

// Per-candidate expansion data: line length l_i and existing line capacity P_line_0,i.
struct expansion_line {
    double length_km = 0.0;
    double capacity_kva = 0.0;
};

inline double distribution_cost(const placement& p, const std::vector<expansion_line>& lines, const cost_parameters& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
        if (p.x[i]) s += c.c3 * lines[i].length_km * lines[i].capacity_kva;
        s += c.c3 * lines[i].length_km * c.p_ev_kw * p.y[i];
    }
    return s + c.c4 * substation_expansion_kw(p.total_spots(), c);
}

// c5 · Σ(|V_i| − 1)² over every bus.
inline double voltage_regulation_cost(const Eigen::VectorXd& vm, const cost_parameters& c) {
    return c.c5 * (vm.array() - 1.0).square().sum();
}

struct device_upgrade {
    int branch_id = 0;
    std::string type;
    std::string old_class;
    std::string new_class;
    double current_a = 0.0;
};

struct protection_result {
    double cost = 0.0;
    double acquisition = 0.0;
    double install = 0.0;
    double uninstall = 0.0;
    double maintenance = 0.0;
    double baseline = 0.0; // maintenance of the untouched base devices
    std::vector<device_upgrade> upgrades;
};

// Step-cost protection upgrade on every protected branch with current I_0 + n_dn·i_ev.
// Acquisition counts net new devices per (type, class); negative cells contribute 0.
inline protection_result protection_cost(const network& net, const std::vector<std::optional<device_ref>>& devices,
                                         const device_catalog& cat, const cost_parameters& c,
                                         const std::vector<int>& y_per_bus) {
    auto n_dn = downstream_ev_count(net, y_per_bus);
    protection_result r;
    std::map<std::pair<std::size_t, std::size_t>, long> a;
    for (std::size_t k = 0; k < net.branch_count(); ++k) {
        if (!devices[k]) continue;
        const auto& br = net.branches()[k];
        const auto& ref = *devices[k];
        const auto& t = cat.types[ref.type];
        const double current = br.base_current_a.value_or(0.0) + static_cast<double>(n_dn[k]) * c.i_ev_a;
        std::size_t need;
        try {
            need = cat.required_class(ref.type, current);
        } catch (const catalog_coverage_error& e) {
            throw catalog_coverage_error("branch " + std::to_string(br.id) + ": " + e.what(), br.id);
        }
        r.baseline += c.horizon_years * t.classes[ref.base_class].maintenance;
        if (need > ref.base_class) {
            a[{ref.type, need}] += 1;
            a[{ref.type, ref.base_class}] -= 1;
            r.install += t.classes[need].install;
            r.uninstall += t.classes[ref.base_class].uninstall;
            r.maintenance += c.horizon_years * t.classes[need].maintenance;
            r.upgrades.push_back({br.id, t.name, t.classes[ref.base_class].label(), t.classes[need].label(), current});
        } else {
            r.maintenance += c.horizon_years * t.classes[ref.base_class].maintenance;
        }
    }
    for (const auto& [key, count] : a)
        if (count > 0) r.acquisition += cat.types[key.first].classes[key.second].acquisition * static_cast<double>(count);
    r.cost = r.acquisition + r.install + r.uninstall + r.maintenance;
    return r;
}

struct cost_breakdown {
    double c_sta = 0.0;
    double c_dis = 0.0;
    double c_vr = 0.0;
    double c_prot = 0.0;
    double total = 0.0;
    double c1_part = 0.0;          // c1·Σx inside c_sta
    double prot_over_baseline = 0.0; // c_prot minus do-nothing maintenance
    double substation_kw = 0.0;
    bool budget_violated = false;
    protection_result protection;
    Eigen::VectorXd vm; // voltage magnitudes used for c_vr, all buses

    double total_without_c1() const { return total - c1_part; }
};

} // namespace evplace
