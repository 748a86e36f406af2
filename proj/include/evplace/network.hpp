#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "errors.hpp"

namespace evplace {

using cd = std::complex<double>;

enum class bus_kind { slack, load };

// ZIP load triple in kVA (consumption positive).
struct zip_load {
    cd sz{0.0, 0.0};
    cd si{0.0, 0.0};
    cd sp{0.0, 0.0};
};

struct bus {
    int id = 0;
    bus_kind kind = bus_kind::load;
    double nominal_kv = 0.0;
    zip_load load;
    bool candidate = false;
    double voltage_pu = 1.0; // slack setpoint; ignored for load buses
};

struct installed_device {
    std::string type;
    std::string cls; // class label such as "0-50", a 1-based index, or "auto"
};

struct branch {
    int id = 0;
    int from = 0;
    int to = 0;
    cd z_ohm{0.0, 0.0};
    double length_km = 0.0;
    double capacity_kva = 0.0;
    double rated_current_a = 0.0;
    std::optional<installed_device> device;
    std::optional<double> base_current_a;
};

// Radial distribution network. Buses are stored slack first, then by ascending id,
// and every matrix partition uses that order. Immutable after construction except
// for fill_base_currents().
class network {
public:
    network() = default;
    network(std::vector<bus> buses, std::vector<branch> branches, double base_mva, std::string name = {})
        : name_(std::move(name)), base_mva_(base_mva), buses_(std::move(buses)), branches_(std::move(branches)) {
        build();
    }

    const std::string& name() const { return name_; }
    double base_mva() const { return base_mva_; }
    const std::vector<bus>& buses() const { return buses_; }
    const std::vector<branch>& branches() const { return branches_; }
    std::vector<branch>& mutable_branches() { return branches_; }
    std::size_t bus_count() const { return buses_.size(); }
    std::size_t branch_count() const { return branches_.size(); }

    std::size_t index_of(int bus_id) const {
        auto it = index_.find(bus_id);
        if (it == index_.end()) throw topology_error("unknown bus id " + std::to_string(bus_id));
        return it->second;
    }
    bool has_bus(int bus_id) const { return index_.count(bus_id) != 0; }
    std::size_t branch_index_of(int branch_id) const {
        for (std::size_t k = 0; k < branches_.size(); ++k)
            if (branches_[k].id == branch_id) return k;
        throw topology_error("unknown branch id " + std::to_string(branch_id));
    }

    // Bus index on the slack side / far side of branch k.
    std::size_t upstream(std::size_t k) const { return up_[k]; }
    std::size_t downstream(std::size_t k) const { return down_[k]; }
    // Branch feeding bus index b (none for the slack).
    std::optional<std::size_t> feeding_branch(std::size_t b) const {
        if (b == 0) return std::nullopt;
        return feed_[b];
    }
    // Bus indices in the subtree beyond branch k (including its downstream bus).
    const std::vector<std::size_t>& subtree(std::size_t k) const { return subtree_[k]; }
    // Branch indices on the path from the slack to bus b.
    std::vector<std::size_t> path_to(std::size_t b) const {
        std::vector<std::size_t> p;
        while (b != 0) {
            p.push_back(feed_[b]);
            b = up_[feed_[b]];
        }
        std::reverse(p.begin(), p.end());
        return p;
    }

    double z_base(std::size_t k) const {
        double kv = buses_[up_[k]].nominal_kv;
        return kv * kv / base_mva_;
    }
    cd z_pu(std::size_t k) const { return branches_[k].z_ohm / z_base(k); }
    // Current base in amps for bus b (line current of a balanced three-phase system).
    double i_base_a(std::size_t b) const { return base_mva_ * 1000.0 / (std::sqrt(3.0) * buses_[b].nominal_kv); }
    double branch_i_base_a(std::size_t k) const { return i_base_a(up_[k]); }

    std::vector<std::size_t> candidate_indices() const {
        std::vector<std::size_t> c;
        for (std::size_t b = 1; b < buses_.size(); ++b)
            if (buses_[b].candidate) c.push_back(b);
        return c;
    }

    bool base_currents_filled() const {
        return std::all_of(branches_.begin(), branches_.end(), [](const branch& br) { return br.base_current_a.has_value(); });
    }

private:
    void build() {
        if (base_mva_ <= 0.0 || !std::isfinite(base_mva_)) throw parse_error("base_mva must be positive");
        std::set<int> bus_ids, branch_ids;
        int slack_count = 0;
        for (const auto& b : buses_) {
            if (!bus_ids.insert(b.id).second) throw parse_error("duplicate bus id " + std::to_string(b.id));
            if (!(b.nominal_kv > 0.0) || !std::isfinite(b.nominal_kv))
                throw parse_error("bus " + std::to_string(b.id) + ": nominal_kv must be positive");
            for (cd s : {b.load.sz, b.load.si, b.load.sp})
                if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                    throw parse_error("bus " + std::to_string(b.id) + ": non-finite zip_load");
            if (b.kind == bus_kind::slack) {
                ++slack_count;
                if (!(b.voltage_pu > 0.5 && b.voltage_pu < 1.5))
                    throw parse_error("bus " + std::to_string(b.id) + ": slack voltage_pu out of range");
            }
        }
        if (slack_count == 0) throw topology_error("missing slack bus");
        if (slack_count > 1) throw topology_error("multiple slack buses");
        std::stable_sort(buses_.begin(), buses_.end(), [](const bus& a, const bus& b) {
            if ((a.kind == bus_kind::slack) != (b.kind == bus_kind::slack)) return a.kind == bus_kind::slack;
            return a.id < b.id;
        });
        buses_[0].candidate = false;
        for (std::size_t i = 0; i < buses_.size(); ++i) index_[buses_[i].id] = i;

        for (const auto& br : branches_) {
            const std::string tag = "branch " + std::to_string(br.id);
            if (!branch_ids.insert(br.id).second) throw parse_error("duplicate branch id " + std::to_string(br.id));
            if (!index_.count(br.from) || !index_.count(br.to))
                throw topology_error(tag + ": references unknown bus");
            if (br.from == br.to) throw topology_error(tag + ": self loop");
            if (!(std::abs(br.z_ohm) > 0.0) || !std::isfinite(std::abs(br.z_ohm)))
                throw parse_error(tag + ": impedance must have nonzero magnitude");
            if (br.z_ohm.real() < 0.0) throw parse_error(tag + ": negative resistance");
            if (!(br.length_km >= 0.0)) throw parse_error(tag + ": negative length_km");
            if (!(br.capacity_kva > 0.0)) throw parse_error(tag + ": capacity_kva must be positive");
            if (!(br.rated_current_a > 0.0)) throw parse_error(tag + ": rated_current_a must be positive");
            if (br.base_current_a && !(*br.base_current_a >= 0.0))
                throw parse_error(tag + ": negative base_current_a");
            if (std::abs(buses_[index_[br.from]].nominal_kv - buses_[index_[br.to]].nominal_kv) > 1e-9)
                throw topology_error(tag + ": connects different nominal voltages; refer impedances to one base");
        }
        const std::size_t n = buses_.size();
        if (branches_.size() != n - 1)
            throw topology_error("non-radial topology: " + std::to_string(branches_.size()) + " branches for " +
                                 std::to_string(n) + " buses");

        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            std::size_t a = index_[branches_[k].from], b = index_[branches_[k].to];
            adj[a].push_back({b, k});
            adj[b].push_back({a, k});
        }
        for (auto& a : adj) std::sort(a.begin(), a.end());
        up_.assign(branches_.size(), 0);
        down_.assign(branches_.size(), 0);
        feed_.assign(n, 0);
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> order;
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            order.push_back(u);
            for (auto [v, k] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                up_[k] = u;
                down_[k] = v;
                feed_[v] = k;
                q.push(v);
            }
        }
        for (std::size_t b = 0; b < n; ++b)
            if (!seen[b])
                throw topology_error("disconnected topology: bus " + std::to_string(buses_[b].id) +
                                     " unreachable from slack");

        // Subtrees by reverse BFS order accumulation.
        std::vector<std::vector<std::size_t>> below(n);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            std::size_t b = *it;
            below[b].push_back(b);
            if (b != 0) {
                auto& parent = below[up_[feed_[b]]];
                parent.insert(parent.end(), below[b].begin(), below[b].end());
            }
        }
        subtree_.assign(branches_.size(), {});
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            subtree_[k] = below[down_[k]];
            std::sort(subtree_[k].begin(), subtree_[k].end());
        }
    }

    std::string name_;
    double base_mva_ = 1.0;
    std::vector<bus> buses_;
    std::vector<branch> branches_;
    std::map<int, std::size_t> index_;
    std::vector<std::size_t> up_, down_, feed_;
    std::vector<std::vector<std::size_t>> subtree_;
};

namespace detail {

inline cd read_pq(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw parse_error(where + ": expected {p_kw, q_kvar}");
    return {j.value("p_kw", 0.0), j.value("q_kvar", 0.0)};
}

template <class T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw parse_error(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(where + ": field '" + key + "': " + e.what());
    }
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(what + ": " + e.what());
    }
}

} // namespace detail

inline network network_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("network: expected an object");
    double base_mva = detail::require<double>(j, "base_mva", "network");
    if (!j.contains("buses") || !j["buses"].is_array()) throw parse_error("network: missing buses[]");
    if (!j.contains("branches") || !j["branches"].is_array()) throw parse_error("network: missing branches[]");
    std::vector<bus> buses;
    bool any_candidate_flag = false;
    for (const auto& jb : j["buses"]) {
        bus b;
        b.id = detail::require<int>(jb, "id", "bus");
        const std::string where = "bus " + std::to_string(b.id);
        std::string kind = jb.value("kind", std::string("load"));
        if (kind == "slack")
            b.kind = bus_kind::slack;
        else if (kind == "load")
            b.kind = bus_kind::load;
        else
            throw parse_error(where + ": unknown kind '" + kind + "'");
        b.nominal_kv = detail::require<double>(jb, "nominal_kv", where);
        if (jb.contains("zip_load")) {
            const auto& z = jb["zip_load"];
            if (z.contains("sz")) b.load.sz = detail::read_pq(z["sz"], where);
            if (z.contains("si")) b.load.si = detail::read_pq(z["si"], where);
            if (z.contains("sp")) b.load.sp = detail::read_pq(z["sp"], where);
        }
        if (jb.contains("candidate")) {
            any_candidate_flag = true;
            b.candidate = jb["candidate"].get<bool>();
        }
        b.voltage_pu = jb.value("voltage_pu", 1.0);
        buses.push_back(b);
    }
    if (!any_candidate_flag)
        for (auto& b : buses) b.candidate = b.kind != bus_kind::slack;

    std::vector<branch> branches;
    for (const auto& jr : j["branches"]) {
        branch br;
        br.id = detail::require<int>(jr, "id", "branch");
        const std::string where = "branch " + std::to_string(br.id);
        br.from = detail::require<int>(jr, "from", where);
        br.to = detail::require<int>(jr, "to", where);
        br.z_ohm = {detail::require<double>(jr, "r_ohm", where), detail::require<double>(jr, "x_ohm", where)};
        br.length_km = detail::require<double>(jr, "length_km", where);
        br.capacity_kva = detail::require<double>(jr, "capacity_kva", where);
        br.rated_current_a = detail::require<double>(jr, "rated_current_a", where);
        if (jr.contains("device") && !jr["device"].is_null()) {
            const auto& d = jr["device"];
            installed_device dev;
            dev.type = detail::require<std::string>(d, "type", where + " device");
            if (d.contains("class")) {
                if (d["class"].is_number_integer())
                    dev.cls = std::to_string(d["class"].get<int>());
                else
                    dev.cls = d["class"].get<std::string>();
            } else {
                dev.cls = "auto";
            }
            br.device = dev;
        }
        if (jr.contains("base_current_a") && !jr["base_current_a"].is_null())
            br.base_current_a = jr["base_current_a"].get<double>();
        branches.push_back(br);
    }
    return network(std::move(buses), std::move(branches), base_mva, j.value("name", std::string()));
}

inline network parse_network(const std::string& text) {
    return network_from_json(detail::parse_json(text, "network"));
}

inline network load_network(const std::string& path) { return parse_network(detail::read_text(path)); }

struct y_partitions {
    Eigen::MatrixXcd ss, sn, ns, nn;
};

inline Eigen::MatrixXcd admittance_matrix(const network& net) {
    const auto n = static_cast<Eigen::Index>(net.bus_count());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < net.branch_count(); ++k) {
        const auto a = static_cast<Eigen::Index>(net.upstream(k));
        const auto b = static_cast<Eigen::Index>(net.downstream(k));
        const cd yk = 1.0 / net.z_pu(k);
        y(a, a) += yk;
        y(b, b) += yk;
        y(a, b) -= yk;
        y(b, a) -= yk;
    }
    return y;
}

inline y_partitions admittance_partitions(const network& net) {
    Eigen::MatrixXcd y = admittance_matrix(net);
    const Eigen::Index n = y.rows();
    y_partitions p{y.block(0, 0, 1, 1), y.block(0, 1, 1, n - 1), y.block(1, 0, n - 1, 1), y.block(1, 1, n - 1, n - 1)};
    if (n > 1) {
        // exact singular-value ratio; LU's rcond estimate is unreliable for complex Y
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(p.nn);
        const auto& sv = svd.singularValues();
        const double lo = sv(sv.size() - 1), hi = sv(0);
        if (!std::isfinite(hi) || !(lo > 1e-14 * hi)) throw numerical_error("ill-conditioned network: Y_NN is singular");
    }
    return p;
}

// y_per_bus is indexed by internal bus index.
inline std::vector<long> downstream_ev_count(const network& net, const std::vector<int>& y_per_bus) {
    if (y_per_bus.size() != net.bus_count()) throw domain_error("placement size does not match bus count");
    std::vector<long> out(net.branch_count(), 0);
    for (std::size_t k = 0; k < net.branch_count(); ++k)
        for (std::size_t b : net.subtree(k)) out[k] += y_per_bus[b];
    return out;
}

} // namespace evplace
