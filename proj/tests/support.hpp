#pragma once

#include <random>
#include <string>
#include <vector>

#include "evplace/evplace.hpp"

namespace testing {

inline std::string data(const std::string& rel) { return std::string(EVPLACE_DATA_DIR) + "/" + rel; }

inline const evplace::network& toy_net() {
    static const evplace::network n = evplace::load_network(data("ieee4.json"));
    return n;
}

inline const evplace::network& feeder_net() {
    static const evplace::network n = evplace::load_network(data("ieee123.json"));
    return n;
}

inline const evplace::device_catalog& default_catalog() {
    static const evplace::device_catalog c = evplace::load_catalog(data("catalog_default.json"));
    return c;
}

inline evplace::scenario toy_scenario() { return evplace::load_scenario(data("scenarios/toy_full.json")); }

inline evplace::placement toy_place(const evplace::problem& pb, int y2, int y3) {
    return evplace::placement::from_spots(pb.candidates(), {y2, y3});
}

// Random radial network on n buses: chain, star or random tree, with shuffled ids.
inline evplace::network random_radial(std::mt19937_64& rng, int n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = 10 * i + 1;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<evplace::bus> buses;
    for (int i = 0; i < n; ++i) {
        evplace::bus b;
        b.id = ids[static_cast<std::size_t>(i)];
        b.kind = i == 0 ? evplace::bus_kind::slack : evplace::bus_kind::load;
        b.nominal_kv = 12.47;
        b.candidate = i != 0;
        b.load.sp = {std::uniform_real_distribution<double>(0, 50)(rng), 10.0};
        buses.push_back(b);
    }
    const int shape = static_cast<int>(rng() % 3);
    std::vector<evplace::branch> branches;
    for (int i = 1; i < n; ++i) {
        int parent = shape == 0 ? i - 1 : shape == 1 ? 0 : static_cast<int>(rng() % static_cast<std::uint64_t>(i));
        evplace::branch br;
        br.id = 100 + i;
        // orient half the branches away from the slack to exercise orientation handling
        br.from = ids[static_cast<std::size_t>(rng() % 2 ? parent : i)];
        br.to = ids[static_cast<std::size_t>(br.from == ids[static_cast<std::size_t>(parent)] ? i : parent)];
        br.z_ohm = {std::uniform_real_distribution<double>(0.05, 1.0)(rng), std::uniform_real_distribution<double>(0.05, 2.0)(rng)};
        br.length_km = 0.3;
        br.capacity_kva = 5000;
        br.rated_current_a = 400;
        branches.push_back(br);
    }
    std::shuffle(branches.begin(), branches.end(), rng);
    return evplace::network(buses, branches, 1.0);
}

// Independent read of a placement's spot vector for checks against the library.
inline long total_spots(const evplace::placement& p) {
    long s = 0;
    for (int v : p.y) s += v;
    return s;
}

} // namespace testing
