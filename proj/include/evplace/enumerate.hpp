#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scenario.hpp"

namespace evplace {

struct enumeration_options {
    std::size_t max_candidates = 6;
    double max_points = 1e6;
    bool ranked = false; // keep every feasible point (disables pruning)
};

struct ranked_point {
    placement place;
    double total = 0.0;
};

struct enumeration_result {
    placement best;
    evaluation exact;
    bool found = false;
    std::vector<placement> co_optimal; // within co_optimal_tol of the best total
    std::vector<ranked_point> ranked;
    double points = 0.0;
    long evaluated = 0;
};

inline double co_optimal_tol(double best) { return std::max(1e-6 * std::abs(best), 0.01); }

inline double enumeration_size(const problem& pb) {
    return std::pow(static_cast<double>(pb.effective_cap()) + 1.0, static_cast<double>(pb.candidates().size()));
}

// Exhaustive search over y in [0, cap]^K with x = [y > 0], scored by the exact cost.
// The cheap station and expansion terms give a lower bound used for pruning.
inline enumeration_result enumerate_optimum(const problem& pb, const enumeration_options& opt = {}) {
    enumeration_result res;
    const std::size_t k = pb.candidates().size();
    const int cap = pb.effective_cap();
    res.points = enumeration_size(pb);
    if (k > opt.max_candidates || res.points > opt.max_points)
        throw domain_error("enumeration refused: " + std::to_string(k) + " candidates, about " +
                           std::to_string(static_cast<long long>(res.points)) + " points");
    const auto& c = pb.params();
    const auto& t = pb.terms();
    double floor_extra = 0.0; // terms that are never negative contribute at least 0; protection at least baseline
    if (t.protection) {
        try {
            floor_extra = protection_cost(pb.net(), pb.devices(), pb.catalog(), c, std::vector<int>(pb.net().bus_count(), 0)).cost;
        } catch (const catalog_coverage_error&) {
            floor_extra = 0.0;
        }
    }
    const long need = pb.required_spots();
    std::vector<int> y(k, 0);
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<ranked_point> near; // candidates for the co-optimal set
    for (;;) {
        long sum = 0;
        for (int v : y) sum += v;
        if (sum >= need) {
            const auto p = placement::from_spots(pb.candidates(), y);
            const double cheap = (t.station ? station_cost(p, c) : 0.0) +
                                 (t.distribution ? distribution_cost(p, pb.lines(), c) : 0.0) + floor_extra;
            const bool skip = !opt.ranked && cheap > best_total + co_optimal_tol(best_total);
            if (!skip) {
                auto ev = evaluate(pb, p);
                ++res.evaluated;
                if (ev.feasible) {
                    const double tot = ev.breakdown.total;
                    if (opt.ranked) res.ranked.push_back({p, tot});
                    if (tot <= best_total + co_optimal_tol(best_total)) near.push_back({p, tot});
                    if (tot < best_total) {
                        best_total = tot;
                        res.best = p;
                        res.exact = std::move(ev);
                        res.found = true;
                    }
                }
            }
        }
        std::size_t i = 0;
        while (i < k && y[i] == cap) y[i++] = 0;
        if (i == k) break;
        ++y[i];
    }
    if (res.found) {
        const double tol = co_optimal_tol(best_total);
        for (auto& r : near)
            if (r.total <= best_total + tol) res.co_optimal.push_back(r.place);
        std::sort(res.co_optimal.begin(), res.co_optimal.end());
    }
    if (opt.ranked)
        std::stable_sort(res.ranked.begin(), res.ranked.end(), [](const ranked_point& a, const ranked_point& b) {
            if (a.total != b.total) return a.total < b.total;
            return a.place < b.place;
        });
    return res;
}

} // namespace evplace
