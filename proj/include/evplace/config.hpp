#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "network.hpp"
#include "scenario.hpp"

namespace evplace {

struct run_config {
    std::string network_path;
    std::string catalog_path;
    std::string scenario_path;
    std::string out_dir = ".";
    int workers = 1;
    std::optional<std::string> preset;
};

// Every problem found in the configured files; empty means the bundle is runnable.
// Cross-file checks (candidates, device classes, coverage at base current) run only
// when the individual files parse.
inline std::vector<std::string> validate_config(const run_config& cfg) {
    std::vector<std::string> d;
    if (cfg.workers < 1) d.push_back("workers must be >= 1");
    std::optional<network> net;
    std::optional<device_catalog> cat;
    std::optional<scenario> sc;
    auto guard = [&](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const error& e) {
            d.push_back(std::string(what) + ": " + e.what());
        }
    };
    if (cfg.network_path.empty())
        d.push_back("network: no file given");
    else
        guard("network", [&] { net = load_network(cfg.network_path); });
    if (!cfg.catalog_path.empty())
        guard("catalog", [&] {
            cat = load_catalog(cfg.catalog_path);
            for (const auto& m : validate_catalog(*cat)) d.push_back("catalog: " + m);
        });
    if (!cfg.scenario_path.empty())
        guard("scenario", [&] {
            sc = load_scenario(cfg.scenario_path, cfg.preset);
            for (const auto& m : scenario_diagnostics(*sc)) d.push_back("scenario: " + m);
        });
    if (net && cat && sc && d.empty()) guard("bundle", [&] {
        problem pb(*net, *cat, *sc);
        for (std::size_t k = 0; k < pb.net().branch_count(); ++k) {
            const auto& dev = pb.devices()[k];
            if (!dev) continue;
            const auto& br = pb.net().branches()[k];
            try {
                pb.catalog().required_class(dev->type, *br.base_current_a);
            } catch (const catalog_coverage_error&) {
                d.push_back("bundle: branch " + std::to_string(br.id) + " base current outside the catalog");
            }
        }
    });
    return d;
}

} // namespace evplace
