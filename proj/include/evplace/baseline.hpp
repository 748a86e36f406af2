#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "scenario.hpp"

namespace evplace {

enum class baseline_start { all_zeros_repair, spread_uniform, given };

inline const char* to_string(baseline_start s) {
    switch (s) {
    case baseline_start::all_zeros_repair: return "all-zeros-repair";
    case baseline_start::spread_uniform: return "spread-uniform";
    case baseline_start::given: return "given";
    }
    return "?";
}

struct baseline_result {
    std::string start;
    placement start_place;
    placement place;
    evaluation exact;
    long moves = 0;       // accepted improving moves
    long evaluations = 0; // exact evaluations performed
};

namespace detail {

// Lexicographic score: number of violations first, then exact total.
inline std::pair<std::size_t, double> baseline_score(const evaluation& ev) {
    return {ev.violations.size(), ev.breakdown.total};
}

inline bool better(const std::pair<std::size_t, double>& a, const std::pair<std::size_t, double>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second - 1e-9 * std::max(1.0, std::abs(b.second));
}

} // namespace detail

// Greedy repair from the empty placement: add one spot at a time where the exact
// total grows least until the demand is served.
inline placement repair_from_zeros(const problem& pb, long* evaluations = nullptr) {
    auto p = pb.empty_placement();
    const int cap = pb.effective_cap();
    const long need = pb.required_spots();
    while (p.total_spots() < need) {
        std::size_t pick = p.y.size();
        std::pair<std::size_t, double> best{~std::size_t{0}, 0.0};
        for (std::size_t i = 0; i < p.y.size(); ++i) {
            if (p.y[i] >= cap) continue;
            auto q = p;
            ++q.y[i];
            q.x[i] = 1;
            auto ev = evaluate(pb, q);
            if (evaluations) ++*evaluations;
            // During repair the serviceability shortfall is expected; score ignores it.
            std::pair<std::size_t, double> s{ev.violations.size() - (q.total_spots() < need ? 1 : 0), ev.breakdown.total};
            if (pick == p.y.size() || detail::better(s, best)) {
                best = s;
                pick = i;
            }
        }
        if (pick == p.y.size()) break;
        ++p.y[pick];
        p.x[pick] = 1;
    }
    return p;
}

// Spots spread evenly over all candidates (lower indices take the remainder).
inline placement spread_uniform(const problem& pb) {
    auto p = pb.empty_placement();
    const long k = static_cast<long>(p.y.size());
    const long need = pb.required_spots();
    const int cap = pb.effective_cap();
    long left = need;
    for (long i = 0; i < k && left > 0; ++i) {
        const long share = (need + k - 1 - i) / k;
        const int v = static_cast<int>(std::min<long>({share, cap, left}));
        p.y[static_cast<std::size_t>(i)] = v;
        left -= v;
    }
    for (std::size_t i = 0; i < p.y.size() && left > 0; ++i) {
        const int add = static_cast<int>(std::min<long>(cap - p.y[i], left));
        p.y[i] += add;
        left -= add;
    }
    for (std::size_t i = 0; i < p.y.size(); ++i) p.x[i] = p.y[i] > 0 ? 1 : 0;
    return p;
}

// Integer local search on the exact objective: single-coordinate y +-1 moves and
// station closing (y_i -> 0), taking the best improving move each sweep until none improves.
inline baseline_result local_search(const problem& pb, const placement& start, std::string start_name = "given",
                                    long max_moves = 100000) {
    baseline_result res;
    res.start = std::move(start_name);
    res.start_place = start;
    const int cap = pb.effective_cap();
    auto cur = start;
    for (std::size_t i = 0; i < cur.y.size(); ++i) cur.x[i] = cur.y[i] > 0 ? 1 : 0;
    auto cur_ev = evaluate(pb, cur);
    ++res.evaluations;
    auto cur_s = detail::baseline_score(cur_ev);
    while (res.moves < max_moves) {
        std::optional<placement> best_q;
        evaluation best_ev;
        auto best_s = cur_s;
        auto consider = [&](placement q) {
            for (std::size_t i = 0; i < q.y.size(); ++i) q.x[i] = q.y[i] > 0 ? 1 : 0;
            auto ev = evaluate(pb, q);
            ++res.evaluations;
            auto s = detail::baseline_score(ev);
            if (detail::better(s, best_s)) {
                best_s = s;
                best_q = std::move(q);
                best_ev = std::move(ev);
            }
        };
        for (std::size_t i = 0; i < cur.y.size(); ++i) {
            if (cur.y[i] < cap) {
                auto q = cur;
                ++q.y[i];
                consider(std::move(q));
            }
            if (cur.y[i] > 0) {
                auto q = cur;
                --q.y[i];
                consider(std::move(q));
            }
            if (cur.y[i] > 1) {
                auto q = cur;
                q.y[i] = 0;
                consider(std::move(q));
            }
        }
        if (!best_q) break;
        cur = std::move(*best_q);
        cur_ev = std::move(best_ev);
        cur_s = best_s;
        ++res.moves;
    }
    res.place = std::move(cur);
    res.exact = std::move(cur_ev);
    return res;
}

inline baseline_result solve_nonconvex_baseline(const problem& pb, baseline_start how,
                                                const placement* given = nullptr) {
    long evals = 0;
    placement start;
    switch (how) {
    case baseline_start::all_zeros_repair: start = repair_from_zeros(pb, &evals); break;
    case baseline_start::spread_uniform: start = spread_uniform(pb); break;
    case baseline_start::given:
        if (!given) throw domain_error("baseline: given start requires a placement");
        start = *given;
        break;
    }
    auto r = local_search(pb, start, to_string(how));
    r.evaluations += evals;
    return r;
}

} // namespace evplace
