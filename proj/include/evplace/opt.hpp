#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bnb.hpp"
#include "costs.hpp"
#include "model.hpp"
#include "scenario.hpp"

namespace evplace {

enum class solve_status { optimal, infeasible, budget_infeasible, node_limit };

inline const char* to_string(solve_status s) {
    switch (s) {
    case solve_status::optimal: return "optimal";
    case solve_status::infeasible: return "infeasible";
    case solve_status::budget_infeasible: return "budget-infeasible";
    case solve_status::node_limit: return "node-limit";
    }
    return "?";
}

struct regime_result {
    expansion_regime regime = expansion_regime::above_surplus;
    bnb_result bnb;
    std::optional<placement> place;
    std::optional<evaluation> exact;
    int rows = 0;
    int cols = 0;
};

struct solve_report {
    solve_status status = solve_status::infeasible;
    placement place;
    evaluation exact;            // exact non-convex re-evaluation of the placement
    double model_objective = lp_inf; // convex objective at the placement
    double relaxation_bound = lp_inf; // LP relaxation (min over regimes)
    double best_bound = lp_inf;
    long nodes = 0;
    long lp_iterations = 0;
    bool certified = false;
    std::string regime;
    std::vector<std::string> warnings; // exact re-evaluation violations (convexification gap)
    std::vector<regime_result> regimes;
    std::string message;
};

struct solve_options {
    model_options model;
    bnb_options bnb;
};

inline std::vector<expansion_regime> regimes_for(const problem& pb) {
    const auto& c = pb.params();
    const long tau = c.surplus_threshold_spots();
    const long need = pb.required_spots();
    const long most = static_cast<long>(pb.effective_cap()) * static_cast<long>(pb.candidates().size());
    if (need >= tau) return {expansion_regime::above_surplus};
    if (most < tau) return {expansion_regime::below_surplus};
    return {expansion_regime::below_surplus, expansion_regime::above_surplus};
}

// Convex path: build the MILP for each admissible expansion regime, solve each to
// proven optimality, re-evaluate the placements exactly and keep the cheaper one.
inline solve_report solve_convex(const problem& pb, const solve_options& opt = {}) {
    solve_report rep;
    rep.place = pb.empty_placement();
    const auto& c = pb.params();
    const int cap = pb.effective_cap();
    if (pb.sc().spot_cap && static_cast<double>(cap) * static_cast<double>(pb.candidates().size()) * c.d_per_spot <
                                c.s_demand - 1e-9) {
        rep.status = solve_status::infeasible;
        rep.certified = true;
        rep.message = "demand exceeds D * spot_cap * candidates";
        return rep;
    }
    const sensitivity sens = spot_sensitivity(pb);
    bool any_feasible = false;
    bool all_certified = true;
    std::optional<std::size_t> best;
    for (auto regime : regimes_for(pb)) {
        regime_result rr;
        rr.regime = regime;
        auto m = build_convex_model(pb, regime, opt.model, &sens);
        rr.rows = m.lp.row_count();
        rr.cols = m.lp.cols();
        rr.bnb = branch_and_bound(m.lp, m.integer_vars, opt.bnb);
        rep.nodes += rr.bnb.nodes;
        rep.lp_iterations += rr.bnb.lp_iterations;
        if (rr.bnb.root_status == lp_status::optimal)
            rep.relaxation_bound = std::min(rep.relaxation_bound, rr.bnb.root_bound);
        all_certified = all_certified && rr.bnb.certified;
        if (rr.bnb.found) {
            any_feasible = true;
            rr.place = model_placement(pb, m, rr.bnb.x);
            rr.exact = evaluate(pb, *rr.place);
            rep.best_bound = std::min(rep.best_bound, rr.bnb.best_bound);
        } else if (rr.bnb.node_limit_hit) {
            rep.best_bound = std::min(rep.best_bound, rr.bnb.best_bound);
        }
        rep.regimes.push_back(std::move(rr));
    }
    // Keep the cheaper exact result; exact-feasible placements win over infeasible ones.
    for (std::size_t i = 0; i < rep.regimes.size(); ++i) {
        const auto& rr = rep.regimes[i];
        if (!rr.exact) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = *rep.regimes[*best].exact;
        const auto& e = *rr.exact;
        if ((e.feasible && !b.feasible) || (e.feasible == b.feasible && e.breakdown.total < b.breakdown.total)) best = i;
    }
    if (!any_feasible) {
        bool limit = false;
        for (const auto& rr : rep.regimes) limit = limit || rr.bnb.node_limit_hit;
        rep.status = limit ? solve_status::node_limit : solve_status::infeasible;
        rep.certified = all_certified;
        if (!limit && std::isfinite(c.budget)) {
            solve_options relaxed = opt;
            relaxed.model.include_budget = false;
            for (auto regime : regimes_for(pb)) {
                auto m = build_convex_model(pb, regime, relaxed.model, &sens);
                auto r = branch_and_bound(m.lp, m.integer_vars, relaxed.bnb);
                if (r.found) {
                    rep.status = solve_status::budget_infeasible;
                    rep.message = "no placement meets the budget";
                    break;
                }
            }
        }
        return rep;
    }
    const auto& chosen = rep.regimes[*best];
    rep.place = *chosen.place;
    rep.exact = *chosen.exact;
    rep.model_objective = chosen.bnb.objective;
    rep.regime = to_string(chosen.regime);
    rep.certified = all_certified;
    rep.status = all_certified ? solve_status::optimal : solve_status::node_limit;
    for (const auto& v : rep.exact.violations) rep.warnings.push_back("convexification gap: " + v);
    return rep;
}

} // namespace evplace
