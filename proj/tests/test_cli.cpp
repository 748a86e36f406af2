#include "catch_amalgamated.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>

#include "support.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("evplace_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
}

struct run_result {
    int rc = -1;
    std::string out;
    std::string err;
};

// Runs the CLI with stdout and stderr captured to files under the scratch dir.
run_result run(const std::string& args) {
    static int n = 0;
    const auto so = scratch() / ("stdout_" + std::to_string(n) + ".txt");
    const auto se = scratch() / ("stderr_" + std::to_string(n) + ".txt");
    ++n;
    const std::string cmd = std::string("\"") + EVPLACE_CLI_PATH + "\" " + args + " >\"" + so.string() + "\" 2>\"" + se.string() + "\"";
    const int status = std::system(cmd.c_str());
    run_result r;
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string inputs(const std::string& net, const std::string& scen) {
    return "--network " + q(testing::data(net)) + " --catalog " + q(testing::data("catalog_default.json")) +
           (scen.empty() ? std::string() : " --scenario " + q(scen));
}

std::string toy_inputs() { return inputs("ieee4.json", testing::data("scenarios/toy_full.json")); }

fs::path edited_scenario(const std::string& name, const std::function<void(nlohmann::json&)>& edit) {
    auto j = nlohmann::json::parse(slurp(testing::data("scenarios/toy_full.json")));
    edit(j);
    const auto p = scratch() / name;
    spit(p, j.dump(1));
    return p;
}

} // namespace

TEST_CASE("solve writes the toy optimum", "[cli]") {
    const auto out = scratch() / "solve";
    auto r = run("solve " + toy_inputs() + " --out " + q(out));
    INFO(r.err);
    REQUIRE(r.rc == 0);
    REQUIRE(fs::exists(out / "report.json"));
    REQUIRE(fs::exists(out / "summary.json"));
    auto rep = nlohmann::json::parse(slurp(out / "report.json"));
    REQUIRE(rep["placement"].size() == 2);
    for (const auto& b : rep["placement"]) CHECK(b["spots"] == (b["bus"] == 2 ? 30 : 0));
    CHECK(rep["status"] == "optimal");
    auto sum = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(sum["command"] == "solve");
    CHECK(sum["inputs"].size() == 3);
}

TEST_CASE("validate-linearization reports the error bound", "[cli]") {
    const auto out = scratch() / "lin";
    auto r = run("validate-linearization --out " + q(out));
    REQUIRE(r.rc == 0);
    CHECK_THAT(r.out, ContainsSubstring("max error 0.26% on [0.95,1.05]"));
    REQUIRE(fs::exists(out / "linearization.csv"));
    const auto csv = slurp(out / "linearization.csv");
    CHECK(csv.rfind("v_pu,error_pct\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10002);
}

TEST_CASE("exit codes", "[cli]") {
    SECTION("missing network file is an io error and writes nothing") {
        const auto out = scratch() / "missing";
        auto r = run("solve --network /nonexistent/net.json --catalog " + q(testing::data("catalog_default.json")) +
                     " --scenario " + q(testing::data("scenarios/toy_full.json")) + " --out " + q(out));
        CHECK(r.rc == 3);
        CHECK_FALSE(fs::exists(out));
        CHECK_THAT(r.err, ContainsSubstring("error:"));
    }
    SECTION("malformed scenario is a parse error") {
        const auto bad = scratch() / "bad.json";
        spit(bad, "{\"name\": \"x\", ");
        auto r = run("solve " + inputs("ieee4.json", bad.string()) + " --out " + q(scratch() / "bad"));
        CHECK(r.rc == 4);
    }
    SECTION("demand beyond the cap is infeasible") {
        const auto p = edited_scenario("cap10.json", [](nlohmann::json& j) { j["spot_cap"] = 10; });
        auto r = run("solve " + inputs("ieee4.json", p.string()) + " --out " + q(scratch() / "cap10"));
        CHECK(r.rc == 5);
    }
    SECTION("unknown subcommand is a usage error") {
        CHECK(run("frobnicate").rc == 2);
        CHECK(run("").rc == 2);
        CHECK(run("sweep " + toy_inputs()).rc == 2);
    }
}

TEST_CASE("validate-config diagnostics", "[cli]") {
    SECTION("good bundle") {
        auto r = run("validate-config " + toy_inputs());
        CHECK(r.rc == 0);
        CHECK(r.out == "ok\n");
    }
    SECTION("d_per_spot below 1") {
        const auto p = edited_scenario("dps0.json", [](nlohmann::json& j) { j["params"]["d_per_spot"] = 0; });
        auto r = run("validate-config " + inputs("ieee4.json", p.string()));
        CHECK(r.rc == 4);
        CHECK_THAT(r.out, ContainsSubstring("d_per_spot must be"));
    }
    SECTION("overlapping fuse classes") {
        auto cat = nlohmann::json::parse(slurp(testing::data("catalog_default.json")));
        for (auto& d : cat["devices"])
            if (d["type"] == "fuse") d["classes"][1]["low_a"] = 15;
        const auto p = scratch() / "overlap.json";
        spit(p, cat.dump(1));
        auto r = run("validate-config --network " + q(testing::data("ieee4.json")) + " --catalog " + q(p));
        CHECK(r.rc == 4);
        CHECK_THAT(r.out, ContainsSubstring("fuse classes 0-20 and 15-50 overlap"));
    }
}

TEST_CASE("repeated runs give identical artifacts", "[cli]") {
    const auto a = scratch() / "rep_a", b = scratch() / "rep_b";
    const auto args = "stack " + toy_inputs();
    auto ra1 = run(args + " --out " + q(a));
    auto first = slurp(a / "stack.csv");
    auto sum1 = slurp(a / "summary.json");
    auto ra2 = run(args + " --out " + q(a));
    REQUIRE(ra1.rc == 0);
    REQUIRE(ra2.rc == 0);
    CHECK(slurp(a / "stack.csv") == first);
    CHECK(slurp(a / "summary.json") == sum1);
    CHECK(ra1.out == ra2.out);
    REQUIRE(run(args + " --out " + q(b)).rc == 0);
    CHECK(slurp(b / "stack.csv") == first);
}

TEST_CASE("sweep writes its table", "[cli]") {
    const auto out = scratch() / "sweep";
    auto r = run("sweep " + toy_inputs() + " --param ev_per_hour --from 20 --to 80 --steps 4 --workers 2 --out " + q(out));
    INFO(r.err);
    REQUIRE(r.rc == 0);
    const auto csv = slurp(out / "sweep.csv");
    CHECK(csv.rfind(evplace::sweep_header(), 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(fs::exists(out / "sweep_timing.csv"));
    CHECK(r.out == csv);
}

TEST_CASE("protection-share and compare run end to end", "[cli]") {
    auto r = run("protection-share " + toy_inputs() + " --out " + q(scratch() / "share"));
    REQUIRE(r.rc == 0);
    CHECK(r.out.rfind("scenario,status,", 0) == 0);

    auto bat = nlohmann::json::parse(slurp(testing::data("scenarios/battery.json")));
    nlohmann::json toys = nlohmann::json::array();
    for (auto& e : bat["scenarios"])
        if (!e.contains("network") || e["network"].get<std::string>().find("ieee4") != std::string::npos) {
            e.erase("network");
            toys.push_back(e);
        }
    REQUIRE_FALSE(toys.empty());
    const auto p = scratch() / "toy_battery.json";
    spit(p, nlohmann::json{{"scenarios", toys}}.dump(1));
    const auto out = scratch() / "cmp";
    auto rc = run("compare-convexification --battery " + q(p) + " --network " + q(testing::data("ieee4.json")) + " --catalog " +
                  q(testing::data("catalog_default.json")) + " --out " + q(out));
    INFO(rc.err);
    CHECK(rc.rc == 0);
    CHECK_THAT(rc.out, ContainsSubstring("baseline failures on"));
    CHECK(fs::exists(out / "comparison.csv"));
}
