#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "lp.hpp"

namespace evplace {

struct bnb_options {
    double int_tol = 1e-6;
    double gap_tol = 1e-6; // relative
    long node_limit = 500000;
    std::size_t max_stored_tableaux = 48;
    bool dive = true;
};

struct bnb_result {
    lp_status root_status = lp_status::optimal;
    bool found = false;
    std::vector<double> x;
    double objective = lp_inf;
    double root_bound = lp_inf;     // LP relaxation
    double best_bound = lp_inf;     // proven lower bound at termination
    long nodes = 0;                 // nodes processed beyond the root
    long lp_iterations = 0;
    bool certified = false;         // search completed, bound gap closed
    bool node_limit_hit = false;
    std::vector<double> root_x;
    std::vector<double> root_certificate; // when the root LP is infeasible
};

namespace detail {

struct bb_node {
    double bound = 0.0;
    long seq = 0;
    std::vector<std::pair<int, std::pair<double, double>>> fixes; // (var, (lo, hi)) relative to root
    std::shared_ptr<const dual_simplex> warm;
};

struct bb_order {
    bool operator()(const std::shared_ptr<bb_node>& a, const std::shared_ptr<bb_node>& b) const {
        if (a->bound != b->bound) return a->bound > b->bound;
        return a->seq > b->seq;
    }
};

// Most fractional integer variable; ties go to the earliest variable.
inline int branching_var(const std::vector<double>& x, const std::vector<int>& ints, double tol) {
    int best = -1;
    double best_score = -1.0;
    for (int j : ints) {
        const double v = x[static_cast<std::size_t>(j)];
        const double f = v - std::floor(v);
        if (f <= tol || f >= 1.0 - tol) continue;
        const double score = std::min(f, 1.0 - f);
        if (score > best_score + 1e-12) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

} // namespace detail

// Best-bound branch and bound over an LP with designated integer columns. Children
// warm start from the parent's optimal tableau while storage allows, otherwise from
// the root tableau with the branching bounds re-applied.
inline bnb_result branch_and_bound(const lp_problem& lp, const std::vector<int>& ints, const bnb_options& opt = {}) {
    bnb_result res;
    auto root = std::make_shared<dual_simplex>(lp);
    auto r0 = root->solve();
    res.lp_iterations += r0.iterations;
    res.root_status = r0.status;
    if (r0.status != lp_status::optimal) {
        res.root_certificate = r0.certificate;
        res.certified = r0.status == lp_status::infeasible;
        return res;
    }
    res.root_bound = r0.objective;
    res.root_x = r0.x;
    auto gap_ok = [&](double bound) {
        return res.found && bound >= res.objective - opt.gap_tol * std::max(1.0, std::abs(res.objective));
    };
    auto accept = [&](const std::vector<double>& x, double obj) {
        if (res.found && obj >= res.objective) return;
        res.found = true;
        res.objective = obj;
        res.x = x;
        for (int j : ints) res.x[static_cast<std::size_t>(j)] = std::round(res.x[static_cast<std::size_t>(j)]);
    };

    const int first = detail::branching_var(r0.x, ints, opt.int_tol);
    if (first < 0) {
        accept(r0.x, r0.objective);
        res.best_bound = r0.objective;
        res.certified = true;
        return res;
    }

    // Dive: repeatedly round the most fractional variable to its nearest integer.
    if (opt.dive) {
        dual_simplex s = *root;
        std::vector<double> x = r0.x;
        for (std::size_t depth = 0; depth < ints.size() * 2 + 4; ++depth) {
            const int j = detail::branching_var(x, ints, opt.int_tol);
            if (j < 0) break;
            const double v = x[static_cast<std::size_t>(j)];
            const double near = std::floor(v + 0.5);
            dual_simplex trial = s;
            trial.set_bounds(j, near, near);
            auto r = trial.solve();
            res.lp_iterations += r.iterations;
            if (r.status != lp_status::optimal) {
                const double other = near > v ? std::floor(v) : std::ceil(v);
                trial = s;
                trial.set_bounds(j, other, other);
                r = trial.solve();
                res.lp_iterations += r.iterations;
                if (r.status != lp_status::optimal) break;
            }
            s = std::move(trial);
            x = r.x;
            if (detail::branching_var(x, ints, opt.int_tol) < 0) {
                accept(x, r.objective);
                break;
            }
        }
    }

    std::priority_queue<std::shared_ptr<detail::bb_node>, std::vector<std::shared_ptr<detail::bb_node>>, detail::bb_order> open;
    long seq = 0;
    std::size_t stored = 0;
    auto push_children = [&](const detail::bb_node& parent, const std::vector<double>& x, double obj, int j,
                             const std::shared_ptr<const dual_simplex>& solver) {
        const double v = x[static_cast<std::size_t>(j)];
        auto bounds_of = [&](int var) {
            for (auto it = parent.fixes.rbegin(); it != parent.fixes.rend(); ++it)
                if (it->first == var) return it->second;
            return std::make_pair(lp.lb[static_cast<std::size_t>(var)], lp.ub[static_cast<std::size_t>(var)]);
        };
        auto [lo, hi] = bounds_of(j);
        const bool keep = solver && stored + 2 <= opt.max_stored_tableaux;
        for (int dir = 0; dir < 2; ++dir) {
            auto child = std::make_shared<detail::bb_node>();
            child->bound = obj;
            child->seq = seq++;
            child->fixes = parent.fixes;
            if (dir == 0)
                child->fixes.push_back({j, {lo, std::floor(v)}});
            else
                child->fixes.push_back({j, {std::ceil(v), hi}});
            if (keep) {
                child->warm = solver;
                ++stored;
            }
            open.push(child);
        }
    };

    detail::bb_node root_node;
    push_children(root_node, r0.x, r0.objective, first, root);

    while (!open.empty()) {
        auto node = open.top();
        open.pop();
        if (node->warm) --stored;
        if (gap_ok(node->bound)) continue;
        if (res.nodes >= opt.node_limit) {
            res.node_limit_hit = true;
            res.best_bound = std::min(node->bound, res.objective);
            while (!open.empty()) {
                res.best_bound = std::min(res.best_bound, open.top()->bound);
                open.pop();
            }
            return res;
        }
        ++res.nodes;
        auto solver = std::make_shared<dual_simplex>(node->warm ? *node->warm : *root);
        node->warm.reset();
        if (solver.get() && node->fixes.size())
            for (const auto& [var, b] : node->fixes) solver->set_bounds(var, b.first, b.second);
        auto r = solver->solve();
        res.lp_iterations += r.iterations;
        if (r.status != lp_status::optimal) continue;
        if (gap_ok(r.objective)) continue;
        const int j = detail::branching_var(r.x, ints, opt.int_tol);
        if (j < 0) {
            accept(r.x, r.objective);
            continue;
        }
        push_children(*node, r.x, r.objective, j, solver);
    }
    res.best_bound = res.found ? res.objective : lp_inf;
    res.certified = true;
    return res;
}

} // namespace evplace
