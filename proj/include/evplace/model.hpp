#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "costs.hpp"
#include "lp.hpp"
#include "powerflow.hpp"
#include "scenario.hpp"

namespace evplace {

// Which branch of the substation-expansion rule the model encodes.
enum class expansion_regime { below_surplus, above_surplus };

inline const char* to_string(expansion_regime r) {
    return r == expansion_regime::below_surplus ? "below_surplus" : "above_surplus";
}

struct model_options {
    int tangent_cuts = 8;
    double cut_span = 0.05;   // tangent points on [-span, span] of |V| - 1
    double t_scale = 1e4;     // t_b carries 1e4·(|V_b| - 1)^2
    bool include_budget = true;
};

// Affine voltage/current response of the tangent linear power flow to spot counts.
struct sensitivity {
    Eigen::VectorXcd v0;              // reference voltages, non-slack buses
    Eigen::VectorXd vm0;              // |V| at the reference, non-slack buses
    Eigen::MatrixXd g;                // d|V_b|/dy_k, (n-1) × candidates
    std::vector<cd> i0;               // branch currents at the reference, p.u.
    Eigen::MatrixXcd di;              // dI_l/dy_k, branches × candidates
};

inline sensitivity spot_sensitivity(const problem& pb) {
    const auto& pf = pb.pf();
    const auto& ref = pb.base_injection();
    sensitivity s;
    auto sol = pf.linear(ref);
    s.v0 = sol.v;
    s.vm0 = s.v0.cwiseAbs();
    const auto n = s.v0.size();
    const auto& cand = pb.candidates();
    const auto k = static_cast<Eigen::Index>(cand.size());
    auto op = pf.make_tangent_operator(ref);
    const double p = pb.params().p_ev_kw / (1000.0 * pb.net().base_mva());
    const double h = ref.h;
    Eigen::MatrixXcd dv(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
        const auto i = static_cast<Eigen::Index>(cand[static_cast<std::size_t>(c)]) - 1;
        rhs(i) = -2.0 * h * p + h * h * p * std::conj(s.v0(i));
        dv.col(c) = op.solve(rhs);
    }
    s.g.resize(n, k);
    for (Eigen::Index b = 0; b < n; ++b) {
        const cd u = s.v0(b) / std::abs(s.v0(b));
        for (Eigen::Index c = 0; c < k; ++c) s.g(b, c) = (std::conj(u) * dv(b, c)).real();
    }
    Eigen::VectorXcd full0 = sol.full();
    s.i0 = branch_currents_pu(pb.net(), full0);
    const auto m = static_cast<Eigen::Index>(pb.net().branch_count());
    s.di.resize(m, k);
    for (Eigen::Index l = 0; l < m; ++l) {
        const auto up = pb.net().upstream(static_cast<std::size_t>(l));
        const auto dn = pb.net().downstream(static_cast<std::size_t>(l));
        const cd z = pb.net().z_pu(static_cast<std::size_t>(l));
        for (Eigen::Index c = 0; c < k; ++c) {
            const cd a = up == 0 ? cd(0.0) : dv(static_cast<Eigen::Index>(up) - 1, c);
            const cd b = dv(static_cast<Eigen::Index>(dn) - 1, c);
            s.di(l, c) = (a - b) / z;
        }
    }
    return s;
}

struct convex_model {
    lp_problem lp;
    std::vector<int> x_var, y_var; // per candidate
    std::vector<int> t_var;        // per non-slack bus (-1 when the voltage term is off)
    std::vector<int> integer_vars;
    expansion_regime regime = expansion_regime::above_surplus;
    int cap = 0;
    int dropped_rows = 0; // redundant over the variable box
    int cut_rows = 0;
};

namespace detail {

// Range of Σ coef_k·y_k over y ∈ [0, cap]^K.
inline std::pair<double, double> box_range(const std::vector<double>& coef, int cap) {
    double lo = 0.0, hi = 0.0;
    for (double c : coef) (c < 0 ? lo : hi) += c * cap;
    return {lo, hi};
}

} // namespace detail

// Convexified MILP: linear voltage/current response, tangent cuts for the quadratic
// regulation cost, per-branch trend lines for protection, and one branch of the
// substation-expansion rule.
inline convex_model build_convex_model(const problem& pb, expansion_regime regime, const model_options& opt = {},
                                       const sensitivity* sens_in = nullptr) {
    const auto& c = pb.params();
    const auto& t = pb.terms();
    const auto& cand = pb.candidates();
    const auto& net = pb.net();
    const auto& sc = pb.sc();
    const int kc = static_cast<int>(cand.size());
    const int cap = pb.effective_cap();
    const long need = pb.required_spots();
    if (sc.spot_cap && static_cast<double>(cap) * kc * c.d_per_spot < c.s_demand - 1e-9)
        throw infeasible_error("demand exceeds D * spot_cap * candidates");

    sensitivity sens_local;
    if (!sens_in) sens_local = spot_sensitivity(pb);
    const sensitivity& sens = sens_in ? *sens_in : sens_local;

    convex_model m;
    m.regime = regime;
    m.cap = cap;
    auto& lp = m.lp;
    for (int k = 0; k < kc; ++k) {
        const auto& line = pb.lines()[static_cast<std::size_t>(k)];
        double cx = 0.0, cy = 0.0;
        if (t.station) {
            cx += c.c1;
            cy += c.c2;
        }
        if (t.distribution) {
            cx += c.c3 * line.length_km * line.capacity_kva;
            cy += c.c3 * line.length_km * c.p_ev_kw;
            if (regime == expansion_regime::above_surplus) cy += c.c4 * c.p_ev_kw;
        }
        m.x_var.push_back(lp.add_var(cx, 0.0, 1.0));
        m.y_var.push_back(lp.add_var(cy, 0.0, cap));
        m.integer_vars.push_back(m.x_var.back());
        m.integer_vars.push_back(m.y_var.back());
    }

    // Protection trend lines on every protected branch.
    if (t.protection) {
        for (std::size_t l = 0; l < net.branch_count(); ++l) {
            const auto& dev = pb.devices()[l];
            if (!dev) continue;
            const auto& type = pb.catalog().types[dev->type];
            trend_line line = type.stored_line ? *type.stored_line : fit_device_line(type);
            double scale = 1.0;
            if (auto it = sc.trend_scale.find(type.name); it != sc.trend_scale.end()) scale = it->second;
            const double i0 = net.branches()[l].base_current_a.value_or(0.0);
            lp.c0 += scale * (line.slope * i0 + line.intercept);
            const auto& sub = net.subtree(l);
            for (int k = 0; k < kc; ++k)
                if (std::binary_search(sub.begin(), sub.end(), cand[static_cast<std::size_t>(k)]))
                    lp.c[static_cast<std::size_t>(m.y_var[static_cast<std::size_t>(k)])] += scale * line.slope * c.i_ev_a;
        }
    }

    std::vector<std::pair<int, double>> sum_y;
    for (int k = 0; k < kc; ++k) sum_y.push_back({m.y_var[static_cast<std::size_t>(k)], 1.0});

    // Serviceability D * sum(y) >= S, rounded up to whole spots (all coefficients equal).
    lp.add_row(sum_y, static_cast<double>(need), lp_inf, "serviceability");
    // Spots only at open stations.
    for (int k = 0; k < kc; ++k)
        lp.add_row({{m.y_var[static_cast<std::size_t>(k)], 1.0}, {m.x_var[static_cast<std::size_t>(k)], -static_cast<double>(cap)}},
                   -lp_inf, 0.0, "link");
    // Station count implied by integral spots and the cap.
    {
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < kc; ++k) row.push_back({m.x_var[static_cast<std::size_t>(k)], 1.0});
        const long floor_spots = regime == expansion_regime::above_surplus ? std::max(need, c.surplus_threshold_spots()) : need;
        const double min_stations = std::ceil(static_cast<double>(floor_spots) / cap - 1e-9);
        if (min_stations > 0) lp.add_row(row, min_stations, lp_inf, "station_count");
    }
    const long tau = c.surplus_threshold_spots();
    if (regime == expansion_regime::below_surplus)
        lp.add_row(sum_y, -lp_inf, static_cast<double>(tau - 1), "below_surplus");
    else
        lp.add_row(sum_y, static_cast<double>(tau), lp_inf, "above_surplus");

    // Voltage band.
    const Eigen::Index nb = sens.g.rows();
    for (Eigen::Index b = 0; b < nb; ++b) {
        std::vector<double> coef(static_cast<std::size_t>(kc));
        for (int k = 0; k < kc; ++k) coef[static_cast<std::size_t>(k)] = sens.g(b, k);
        auto [lo, hi] = detail::box_range(coef, cap);
        const double vlo = sc.v_min - sens.vm0(b), vhi = sc.v_max - sens.vm0(b);
        if (lo >= vlo && hi <= vhi) {
            ++m.dropped_rows;
            continue;
        }
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < kc; ++k) row.push_back({m.y_var[static_cast<std::size_t>(k)], coef[static_cast<std::size_t>(k)]});
        lp.add_row(row, vlo, vhi, "voltage_band " + std::to_string(net.buses()[static_cast<std::size_t>(b + 1)].id));
    }
    // Branch ampacity along the direction of the loaded current.
    for (std::size_t l = 0; l < net.branch_count(); ++l) {
        cd full = sens.i0[l];
        for (int k = 0; k < kc; ++k) full += sens.di(static_cast<Eigen::Index>(l), k) * static_cast<double>(cap);
        const cd w = std::abs(full) > 0 ? full / std::abs(full) : cd(1.0, 0.0);
        const double base = (std::conj(w) * sens.i0[l]).real();
        std::vector<double> coef(static_cast<std::size_t>(kc));
        for (int k = 0; k < kc; ++k) coef[static_cast<std::size_t>(k)] = (std::conj(w) * sens.di(static_cast<Eigen::Index>(l), k)).real();
        const double limit = net.branches()[l].rated_current_a / net.branch_i_base_a(l) - base;
        auto [lo, hi] = detail::box_range(coef, cap);
        (void)lo;
        if (hi <= limit) {
            ++m.dropped_rows;
            continue;
        }
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < kc; ++k) row.push_back({m.y_var[static_cast<std::size_t>(k)], coef[static_cast<std::size_t>(k)]});
        lp.add_row(row, -lp_inf, limit, "ampacity " + std::to_string(net.branches()[l].id));
    }
    // Installed devices must stay inside their catalog.
    for (std::size_t l = 0; l < net.branch_count(); ++l) {
        const auto& dev = pb.devices()[l];
        if (!dev) continue;
        const double room = pb.catalog().max_current(dev->type) - net.branches()[l].base_current_a.value_or(0.0);
        const auto& sub = net.subtree(l);
        std::vector<std::pair<int, double>> row;
        double hi = 0.0;
        for (int k = 0; k < kc; ++k)
            if (std::binary_search(sub.begin(), sub.end(), cand[static_cast<std::size_t>(k)])) {
                row.push_back({m.y_var[static_cast<std::size_t>(k)], c.i_ev_a});
                hi += c.i_ev_a * cap;
            }
        if (hi <= room) {
            ++m.dropped_rows;
            continue;
        }
        lp.add_row(row, -lp_inf, room, "device_coverage " + std::to_string(net.branches()[l].id));
    }

    // Regulation cost: t_b >= scale·(2p·d_b(y) − p²) at tangent points p.
    m.t_var.assign(static_cast<std::size_t>(nb), -1);
    if (t.voltage) {
        const double vs = std::abs(pb.pf().slack_voltage());
        lp.c0 += c.c5 * (vs - 1.0) * (vs - 1.0);
        std::vector<double> pts;
        for (int i = 0; i < opt.tangent_cuts; ++i)
            pts.push_back(-opt.cut_span + 2.0 * opt.cut_span * i / std::max(1, opt.tangent_cuts - 1));
        const double dmax = std::max(std::abs(sc.v_min - 1.0), std::abs(sc.v_max - 1.0)) + 1.0;
        for (Eigen::Index b = 0; b < nb; ++b) {
            m.t_var[static_cast<std::size_t>(b)] = lp.add_var(c.c5 / opt.t_scale, 0.0, opt.t_scale * dmax * dmax);
            std::vector<double> coef(static_cast<std::size_t>(kc));
            for (int k = 0; k < kc; ++k) coef[static_cast<std::size_t>(k)] = sens.g(b, k);
            auto [lo, hi] = detail::box_range(coef, cap);
            const double d0 = sens.vm0(b) - 1.0;
            const double dlo = std::max(d0 + lo, sc.v_min - 1.0), dhi = std::min(d0 + hi, sc.v_max - 1.0);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                // The cut at pts[i] is the active tangent between the neighbouring midpoints.
                const double left = i == 0 ? -lp_inf : 0.5 * (pts[i - 1] + pts[i]);
                const double right = i + 1 == pts.size() ? lp_inf : 0.5 * (pts[i] + pts[i + 1]);
                if (right < dlo || left > dhi) continue;
                const double p = pts[i];
                if (p == 0.0) continue; // t_b >= 0 is the variable bound
                std::vector<std::pair<int, double>> row;
                for (int k = 0; k < kc; ++k)
                    if (coef[static_cast<std::size_t>(k)] != 0.0)
                        row.push_back({m.y_var[static_cast<std::size_t>(k)], opt.t_scale * 2.0 * p * coef[static_cast<std::size_t>(k)]});
                row.push_back({m.t_var[static_cast<std::size_t>(b)], -1.0});
                lp.add_row(row, -lp_inf, opt.t_scale * (p * p - 2.0 * p * d0), "vr_cut");
                ++m.cut_rows;
            }
        }
    }

    if (opt.include_budget && std::isfinite(c.budget)) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < lp.cols(); ++j)
            if (lp.c[static_cast<std::size_t>(j)] != 0.0) row.push_back({j, lp.c[static_cast<std::size_t>(j)]});
        lp.add_row(row, -lp_inf, c.budget - lp.c0, "budget");
    }
    return m;
}

// Placement read from an integral model solution.
inline placement model_placement(const problem& pb, const convex_model& m, const std::vector<double>& x) {
    placement p = pb.empty_placement();
    for (std::size_t k = 0; k < p.y.size(); ++k) {
        p.x[k] = static_cast<int>(std::lround(x[static_cast<std::size_t>(m.x_var[k])]));
        p.y[k] = static_cast<int>(std::lround(x[static_cast<std::size_t>(m.y_var[k])]));
        if (p.y[k] == 0) p.x[k] = 0;
    }
    return p;
}

} // namespace evplace
