#include "catch_amalgamated.hpp"

#include <chrono>

#include "support.hpp"

using namespace evplace;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

problem toy_with(cost_terms terms) {
    auto sc = testing::toy_scenario();
    sc.terms = terms;
    return problem(testing::toy_net(), testing::default_catalog(), sc);
}

scenario feeder_scenario(double ev_per_hour, int cap) {
    scenario s;
    s.name = "feeder";
    s.ev_per_hour = ev_per_hour;
    s.params.s_demand = vehicles_per_day(ev_per_hour);
    s.spot_cap = cap;
    return s;
}

// Brute-force integer optimum of a small pure-integer LP over its (finite) box.
std::optional<double> brute_force(const lp_problem& p) {
    const std::size_t n = p.c.size();
    std::vector<int> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<int>(p.lb[j]);
    std::optional<double> best;
    for (;;) {
        bool ok = true;
        for (const auto& r : p.rows) {
            double a = 0;
            for (auto [j, v] : r.coef) a += v * x[static_cast<std::size_t>(j)];
            ok = ok && a >= r.lo - 1e-9 && a <= r.hi + 1e-9;
        }
        if (ok) {
            double obj = p.c0;
            for (std::size_t j = 0; j < n; ++j) obj += p.c[j] * x[j];
            if (!best || obj < *best) best = obj;
        }
        std::size_t i = 0;
        while (i < n && x[i] == static_cast<int>(p.ub[i])) {
            x[i] = static_cast<int>(p.lb[i]);
            ++i;
        }
        if (i == n) break;
        ++x[i];
    }
    return best;
}

} // namespace

TEST_CASE("single-row LP", "[opt][lp]") {
    lp_problem p;
    int y = p.add_var(1.0, 0.0, lp_inf);
    p.add_row({{y, 1.0}}, 7.5, lp_inf);
    auto r = solve_lp(p);
    REQUIRE(r.status == lp_status::optimal);
    CHECK_THAT(r.x[0], WithinAbs(7.5, 1e-9));
    CHECK_THAT(r.objective, WithinAbs(7.5, 1e-9));
}

TEST_CASE("infeasible LP carries a checkable certificate", "[opt][lp]") {
    lp_problem p;
    int y = p.add_var(1.0, 0.0, lp_inf);
    p.add_row({{y, 1.0}}, -lp_inf, 1.0, "le1");
    p.add_row({{y, 1.0}}, 2.0, lp_inf, "ge2");
    auto r = solve_lp(p);
    REQUIRE(r.status == lp_status::infeasible);
    REQUIRE(r.certificate.size() == 2);
    CHECK(certificate_proves_infeasible(p, r.certificate));
    // a wrong certificate is rejected
    CHECK_FALSE(certificate_proves_infeasible(p, {1.0, 0.0}));
}

TEST_CASE("ties resolve to the lowest index", "[opt][lp]") {
    for (int n : {2, 3, 5}) {
        lp_problem p;
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < n; ++j) row.push_back({p.add_var(1.0, 0.0, 10.0), 1.0});
        p.add_row(row, 1.0, lp_inf);
        auto r = solve_lp(p);
        REQUIRE(r.status == lp_status::optimal);
        CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-12));
        for (int j = 1; j < n; ++j) CHECK(r.x[static_cast<std::size_t>(j)] == 0.0);
    }
}

TEST_CASE("equal-cost candidate buses: lowest index takes the spots", "[opt][lp]") {
    auto pb = toy_with({true, false, false, false});
    auto r = solve_convex(pb);
    REQUIRE(r.status == solve_status::optimal);
    CHECK(r.place.y == std::vector<int>{30, 0});
}

TEST_CASE("random small LPs: relaxation bounds the integer optimum", "[opt][lp][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        lp_problem p;
        for (int j = 0; j < 3; ++j) p.add_var(u(rng), 0.0, 5.0);
        for (int i = 0; i < 3; ++i) {
            std::vector<std::pair<int, double>> row;
            for (int j = 0; j < 3; ++j) row.push_back({j, u(rng)});
            const double mid = u(rng) * 3;
            p.add_row(row, mid - 4.0, mid + 4.0);
        }
        auto oracle = brute_force(p);
        auto lp = solve_lp(p);
        if (lp.status == lp_status::infeasible) {
            CHECK(certificate_proves_infeasible(p, lp.certificate));
            CHECK_FALSE(oracle.has_value());
            continue;
        }
        REQUIRE(lp.status == lp_status::optimal);
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
            double a = 0;
            for (auto [j, v] : p.rows[i].coef) a += v * lp.x[static_cast<std::size_t>(j)];
            CHECK(a >= p.rows[i].lo - 1e-7);
            CHECK(a <= p.rows[i].hi + 1e-7);
        }
        auto bb = branch_and_bound(p, {0, 1, 2});
        CHECK(bb.found == oracle.has_value());
        if (oracle) {
            CHECK(lp.objective <= *oracle + 1e-7);
            CHECK_THAT(bb.objective, WithinAbs(*oracle, 1e-6));
            CHECK(bb.certified);
            CHECK(bb.root_bound <= bb.objective + 1e-7);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("integral relaxation needs no branching", "[opt][bnb]") {
    lp_problem p;
    int y = p.add_var(1.0, 0.0, 100.0);
    p.add_row({{y, 1.0}}, 7.0, lp_inf);
    auto r = branch_and_bound(p, {y});
    CHECK(r.nodes == 0);
    CHECK(r.certified);
    CHECK_THAT(r.objective, WithinAbs(7.0, 1e-9));

    lp_problem q;
    int z = q.add_var(1.0, 0.0, 100.0);
    q.add_row({{z, 2.0}}, 15.0, lp_inf);
    auto s = branch_and_bound(q, {z});
    CHECK_THAT(s.root_bound, WithinAbs(7.5, 1e-9));
    CHECK_THAT(s.objective, WithinAbs(8.0, 1e-9));
    CHECK(s.nodes > 0);
}

TEST_CASE("toy model shape", "[opt][model]") {
    auto pb = toy_with({});
    auto m = build_convex_model(pb, expansion_regime::above_surplus);
    CHECK(m.integer_vars.size() == 4);
    CHECK(m.x_var.size() == 2);
    CHECK(m.y_var.size() == 2);
    bool has_service = false;
    for (const auto& r : m.lp.rows)
        if (r.name == "serviceability") {
            has_service = true;
            CHECK(r.lo == 30.0);
        }
    CHECK(has_service);
    // demand forces 30 >= 23 spots: only the linear expansion branch is built
    CHECK(regimes_for(pb) == std::vector<expansion_regime>{expansion_regime::above_surplus});
}

TEST_CASE("spot cap bounds every y", "[opt][model]") {
    problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(200, 25));
    auto m = build_convex_model(pb, regimes_for(pb).front());
    REQUIRE(m.y_var.size() == 122);
    for (int v : m.y_var) CHECK(m.lp.ub[static_cast<std::size_t>(v)] == 25.0);
    for (int v : m.x_var) CHECK(m.lp.ub[static_cast<std::size_t>(v)] == 1.0);
}

TEST_CASE("small demand builds both expansion regimes", "[opt][model]") {
    auto sc = testing::toy_scenario();
    sc.ev_per_hour = 40; // 15 spots < 23
    sc.params.s_demand = vehicles_per_day(40);
    sc.spot_cap = 15;
    problem pb(testing::toy_net(), testing::default_catalog(), sc);
    CHECK(regimes_for(pb).size() == 2);
    auto r = solve_convex(pb);
    REQUIRE(r.status == solve_status::optimal);
    CHECK(r.regimes.size() == 2);
    CHECK(r.regime == "below_surplus");
    CHECK(r.place.total_spots() == 15);
}

TEST_CASE("toy full stack solves to (30,0)", "[opt][bnb]") {
    auto pb = toy_with({});
    auto r = solve_convex(pb);
    REQUIRE(r.status == solve_status::optimal);
    CHECK(r.place.y == std::vector<int>{30, 0});
    CHECK(r.place.x == std::vector<int>{1, 0});
    CHECK(r.certified);
    CHECK(r.warnings.empty());
    CHECK(r.relaxation_bound <= r.model_objective + 1e-6 * std::abs(r.model_objective));
    CHECK(r.best_bound <= r.model_objective + 1e-6 * std::abs(r.model_objective));
}

TEST_CASE("enumeration oracle on the toy stack", "[opt][enum]") {
    auto sta = enumerate_optimum(toy_with({true, false, false, false}));
    REQUIRE(sta.found);
    REQUIRE(sta.co_optimal.size() == 2);
    CHECK(sta.co_optimal[0].y == std::vector<int>{0, 30});
    CHECK(sta.co_optimal[1].y == std::vector<int>{30, 0});

    auto vr = enumerate_optimum(toy_with({true, true, true, false}));
    REQUIRE(vr.co_optimal.size() == 1);
    CHECK(vr.best.y == std::vector<int>{0, 30});

    auto full = enumerate_optimum(toy_with({}));
    REQUIRE(full.co_optimal.size() == 1);
    CHECK(full.best.y == std::vector<int>{30, 0});

    enumeration_options all;
    all.ranked = true;
    auto ranked = enumerate_optimum(toy_with({}), all);
    REQUIRE(!ranked.ranked.empty());
    CHECK(ranked.ranked.front().place == full.best);
    for (std::size_t i = 1; i < ranked.ranked.size(); ++i) CHECK(ranked.ranked[i - 1].total <= ranked.ranked[i].total);
}

TEST_CASE("enumeration refuses large search spaces", "[opt][enum]") {
    problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(100, 10));
    REQUIRE_THROWS_WITH(enumerate_optimum(pb), ContainsSubstring("enumeration refused"));
    REQUIRE_THROWS_WITH(enumerate_optimum(pb), ContainsSubstring("122 candidates"));
}

TEST_CASE("convex path matches enumeration on 25 random toy scenarios", "[opt][enum][property]") {
    auto scs = random_toy_scenarios(2024, 25);
    REQUIRE(scs.size() == 25);
    for (const auto& sc : scs) {
        INFO(sc.name);
        problem pb(testing::toy_net(), testing::default_catalog(), sc);
        REQUIRE(pb.candidates().size() <= 3);
        const auto t0 = std::chrono::steady_clock::now();
        auto r = solve_convex(pb);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        auto e = enumerate_optimum(pb);
        REQUIRE(e.found);
        REQUIRE(r.status == solve_status::optimal);
        CHECK(r.certified);
        CHECK(r.place.total_spots() <= 40);
        CHECK(r.exact.breakdown.total <= e.exact.breakdown.total * 1.01);
        CHECK(r.exact.breakdown.total >= e.exact.breakdown.total - co_optimal_tol(e.exact.breakdown.total));
        CHECK(secs < 5.0);
    }
}

TEST_CASE("baseline from the convex optimum makes no move", "[opt][baseline]") {
    auto pb = toy_with({});
    auto r = solve_convex(pb);
    auto b = solve_nonconvex_baseline(pb, baseline_start::given, &r.place);
    CHECK(b.moves == 0);
    CHECK(b.place == r.place);
    CHECK(b.exact.breakdown.total == r.exact.breakdown.total);
    REQUIRE_THROWS_AS(solve_nonconvex_baseline(pb, baseline_start::given), domain_error);
}

TEST_CASE("greedy repair from zeros is trapped at (0,30) on the toy", "[opt][baseline]") {
    auto pb = toy_with({});
    auto b = solve_nonconvex_baseline(pb, baseline_start::all_zeros_repair);
    auto e = enumerate_optimum(pb);
    CHECK(b.start_place.total_spots() == 30);
    CHECK(b.place.y == std::vector<int>{0, 30});
    CHECK(e.best.y == std::vector<int>{30, 0});
    CHECK(b.exact.breakdown.total > e.exact.breakdown.total * (1.0 + baseline_fail_tol));
    // the convex gap on the same toy stays within 1%
    auto r = solve_convex(pb);
    CHECK(r.exact.breakdown.total <= e.exact.breakdown.total * 1.01);
}

TEST_CASE("spread-uniform start covers demand", "[opt][baseline]") {
    problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(150, 10));
    auto p = spread_uniform(pb);
    CHECK(p.total_spots() == pb.required_spots());
    CHECK(placement_diagnostics(p, 10).empty());
}

TEST_CASE("infeasible demand is reported before solving", "[opt]") {
    auto sc = testing::toy_scenario();
    sc.spot_cap = 10;
    problem pb(testing::toy_net(), testing::default_catalog(), sc);
    auto r = solve_convex(pb);
    CHECK(r.status == solve_status::infeasible);
    CHECK(r.nodes == 0);
    CHECK_THAT(r.message, ContainsSubstring("demand exceeds"));
    REQUIRE_THROWS_AS(build_convex_model(pb, expansion_regime::above_surplus), infeasible_error);
}

TEST_CASE("budget below every placement is budget-infeasible", "[opt]") {
    auto sc = testing::toy_scenario();
    sc.params.budget = 1e5;
    problem pb(testing::toy_net(), testing::default_catalog(), sc);
    auto r = solve_convex(pb);
    CHECK(r.status == solve_status::budget_infeasible);
    CHECK(std::string(to_string(r.status)) == "budget-infeasible");

    sc.params.budget = 3e6;
    problem ok(testing::toy_net(), testing::default_catalog(), sc);
    auto s = solve_convex(ok);
    CHECK(s.status == solve_status::optimal);
    CHECK(s.exact.breakdown.total <= 3e6);
}

TEST_CASE("feeder solves are exact-feasible and serve demand", "[opt][property]") {
    for (auto [flow, cap] : {std::pair{100.0, 10}, {200.0, 10}, {400.0, 25}}) {
        problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(flow, cap));
        auto r = solve_convex(pb);
        INFO("flow " << flow << " cap " << cap);
        REQUIRE(r.status == solve_status::optimal);
        CHECK(r.certified);
        CHECK(pb.params().d_per_spot * testing::total_spots(r.place) >= pb.params().s_demand);
        for (std::size_t i = 0; i < r.place.y.size(); ++i) {
            CHECK(r.place.y[i] <= cap);
            CHECK((r.place.y[i] > 0) == (r.place.x[i] == 1));
        }
        CHECK(r.exact.feasible);
        CHECK(r.warnings.empty());
        CHECK(r.exact.min_v >= 0.95);
        for (std::size_t k = 0; k < pb.net().branch_count(); ++k)
            CHECK(r.exact.branch_current_a[k] <= pb.net().branches()[k].rated_current_a);
        CHECK(r.relaxation_bound <= r.model_objective + 1e-6 * r.model_objective);
    }
}

TEST_CASE("optimal total never decreases with demand", "[opt][property]") {
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double flow = 50.0 + 50.0 * i;
        problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(flow, 10));
        auto r = solve_convex(pb);
        REQUIRE(r.status == solve_status::optimal);
        INFO("flow " << flow);
        CHECK(r.exact.breakdown.total >= prev);
        prev = r.exact.breakdown.total;
    }
    prev = 0.0;
    for (int i = 0; i < 10; ++i) {
        auto sc = testing::toy_scenario();
        sc.ev_per_hour = 20.0 + 10.0 * i;
        sc.params.s_demand = vehicles_per_day(*sc.ev_per_hour);
        problem pb(testing::toy_net(), testing::default_catalog(), sc);
        auto r = solve_convex(pb);
        REQUIRE(r.status == solve_status::optimal);
        CHECK(r.exact.breakdown.total >= prev);
        prev = r.exact.breakdown.total;
    }
}

TEST_CASE("identical inputs give byte-identical reports", "[opt][determinism]") {
    auto run = [] {
        problem pb(testing::feeder_net(), testing::default_catalog(), feeder_scenario(300, 10));
        return report_json(pb, solve_convex(pb)).dump(2);
    };
    const auto a = run();
    CHECK(a == run());
    auto toy = [] {
        auto pb = toy_with({});
        return report_json(pb, solve_convex(pb)).dump(2) + report_text(pb, solve_convex(pb));
    };
    CHECK(toy() == toy());
}
