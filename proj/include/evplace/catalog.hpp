#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "network.hpp"

namespace evplace {

struct device_class {
    double low_a = 0.0;
    double high_a = 0.0;
    double acquisition = 0.0;
    double install = 0.0;
    double uninstall = 0.0;
    double maintenance = 0.0; // per year

    std::string label() const {
        auto fmt = [](double v) {
            std::string s = std::to_string(v);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        };
        return fmt(low_a) + "-" + fmt(high_a);
    }
};

struct trend_line {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct device_type {
    std::string name;
    std::vector<device_class> classes;
    std::optional<trend_line> stored_line; // catalogued cost-vs-current line
};

class device_catalog {
public:
    std::vector<device_type> types;

    std::size_t type_index(const std::string& name) const {
        for (std::size_t i = 0; i < types.size(); ++i)
            if (types[i].name == name) return i;
        throw catalog_coverage_error("catalog has no device type '" + name + "'");
    }
    const device_type& type(const std::string& name) const { return types[type_index(name)]; }

    // Current I belongs to class c iff high_{c-1} < I <= high_c (the first class starts at 0).
    std::size_t required_class(std::size_t type_idx, double current_a) const {
        const auto& cls = types.at(type_idx).classes;
        if (!(current_a >= 0.0) || !std::isfinite(current_a)) throw domain_error("device current must be non-negative");
        for (std::size_t c = 0; c < cls.size(); ++c)
            if (current_a <= cls[c].high_a) return c;
        throw catalog_coverage_error("no device class covers current " + std::to_string(current_a) + " A for " +
                                     types[type_idx].name);
    }
    std::size_t required_class(const std::string& type_name, double current_a) const {
        return required_class(type_index(type_name), current_a);
    }

    double max_current(std::size_t type_idx) const { return types.at(type_idx).classes.back().high_a; }

    // Multiplies every price field by k.
    void scale_prices(double k) {
        for (auto& t : types) {
            for (auto& c : t.classes) {
                c.acquisition *= k;
                c.install *= k;
                c.uninstall *= k;
                c.maintenance *= k;
            }
            if (t.stored_line) {
                t.stored_line->slope *= k;
                t.stored_line->intercept *= k;
            }
        }
    }
};

// Schema and consistency diagnostics; empty when the catalog is usable.
inline std::vector<std::string> validate_catalog(const device_catalog& cat) {
    std::vector<std::string> d;
    if (cat.types.empty()) d.push_back("catalog: no device types");
    for (const auto& t : cat.types) {
        if (t.classes.empty()) {
            d.push_back(t.name + ": no capacity classes");
            continue;
        }
        for (std::size_t c = 0; c < t.classes.size(); ++c) {
            const auto& k = t.classes[c];
            const std::string tag = t.name + " class " + k.label();
            if (!(k.high_a > k.low_a)) d.push_back(tag + ": empty current range");
            if (k.acquisition < 0 || k.install < 0 || k.uninstall < 0 || k.maintenance < 0)
                d.push_back(tag + ": negative cost field");
            if (c == 0) {
                if (k.low_a < 0) d.push_back(tag + ": negative lower bound");
                continue;
            }
            const auto& p = t.classes[c - 1];
            const std::string pair = t.name + " classes " + p.label() + " and " + k.label();
            if (k.low_a < p.high_a)
                d.push_back(pair + " overlap");
            else if (k.low_a > p.high_a + 1.0)
                d.push_back(pair + " leave a gap");
            if (k.acquisition < p.acquisition) d.push_back(pair + ": acquisition cost decreases with class");
        }
    }
    return d;
}

inline device_catalog catalog_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("devices") || !j["devices"].is_array())
        throw parse_error("catalog: missing devices[]");
    device_catalog cat;
    for (const auto& jd : j["devices"]) {
        device_type t;
        t.name = detail::require<std::string>(jd, "type", "catalog device");
        if (!jd.contains("classes") || !jd["classes"].is_array()) throw parse_error(t.name + ": missing classes[]");
        for (const auto& jc : jd["classes"]) {
            device_class c;
            const std::string where = t.name + " class";
            c.low_a = detail::require<double>(jc, "low_a", where);
            c.high_a = detail::require<double>(jc, "high_a", where);
            c.acquisition = detail::require<double>(jc, "acquisition", where);
            c.install = detail::require<double>(jc, "install", where);
            c.uninstall = detail::require<double>(jc, "uninstall", where);
            c.maintenance = detail::require<double>(jc, "maintenance", where);
            t.classes.push_back(c);
        }
        if (jd.contains("trend_line")) {
            const auto& l = jd["trend_line"];
            t.stored_line = trend_line{l.at("slope").get<double>(), l.at("intercept").get<double>(), l.value("r2", 0.0)};
        }
        cat.types.push_back(std::move(t));
    }
    return cat;
}

inline device_catalog parse_catalog(const std::string& text) { return catalog_from_json(detail::parse_json(text, "catalog")); }

inline device_catalog load_catalog(const std::string& path) { return parse_catalog(detail::read_text(path)); }

// Abscissa used when regressing acquisition cost on class current.
enum class fit_convention { midpoint, upper, lower, endpoints, step_sampled };

inline const char* to_string(fit_convention c) {
    switch (c) {
    case fit_convention::midpoint: return "midpoint";
    case fit_convention::upper: return "upper";
    case fit_convention::lower: return "lower";
    case fit_convention::endpoints: return "endpoints";
    case fit_convention::step_sampled: return "step_sampled";
    }
    return "?";
}

inline std::vector<fit_convention> all_fit_conventions() {
    return {fit_convention::midpoint, fit_convention::upper, fit_convention::lower, fit_convention::endpoints,
            fit_convention::step_sampled};
}

inline trend_line least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw domain_error("degenerate fit: all currents identical");
    trend_line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    l.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return l;
}

inline trend_line fit_device_line(const device_type& t, fit_convention conv = fit_convention::midpoint) {
    if (t.classes.size() < 2) throw domain_error(t.name + ": need at least two classes to fit");
    std::vector<double> xs, ys;
    for (const auto& c : t.classes) {
        switch (conv) {
        case fit_convention::midpoint:
            xs.push_back(0.5 * (c.low_a + c.high_a));
            ys.push_back(c.acquisition);
            break;
        case fit_convention::upper:
            xs.push_back(c.high_a);
            ys.push_back(c.acquisition);
            break;
        case fit_convention::lower:
            xs.push_back(c.low_a);
            ys.push_back(c.acquisition);
            break;
        case fit_convention::endpoints:
            xs.push_back(c.low_a);
            ys.push_back(c.acquisition);
            xs.push_back(c.high_a);
            ys.push_back(c.acquisition);
            break;
        case fit_convention::step_sampled:
            for (double a = std::max(1.0, std::ceil(c.low_a)); a <= c.high_a; a += 1.0) {
                if (!xs.empty() && a <= xs.back()) continue;
                xs.push_back(a);
                ys.push_back(c.acquisition);
            }
            break;
        }
    }
    return least_squares(xs, ys);
}

inline trend_line fit_device_line(const device_catalog& cat, const std::string& type_name,
                                  fit_convention conv = fit_convention::midpoint) {
    return fit_device_line(cat.type(type_name), conv);
}

// Worst normalized deviation of a fit from a reference line: 1.0 sits exactly on the
// tolerance (±2% on coefficients, ±0.02 on R²).
inline double fit_deviation(const trend_line& fit, const trend_line& ref) {
    auto rel = [](double a, double b) { return std::abs(a - b) / (0.02 * std::max(std::abs(b), 1e-12)); };
    return std::max({rel(fit.slope, ref.slope), rel(fit.intercept, ref.intercept), std::abs(fit.r2 - ref.r2) / 0.02});
}

struct fit_calibration {
    fit_convention convention = fit_convention::midpoint;
    double worst_deviation = 0.0; // max over types of fit_deviation
    std::vector<std::pair<std::string, trend_line>> fits;
};

// Tries every convention in order (midpoint first) and keeps the one whose worst
// deviation from the stored lines is smallest. A convention that meets the tolerance
// on every type wins at the first hit.
inline fit_calibration calibrate_fit_convention(const device_catalog& cat) {
    std::optional<fit_calibration> best;
    for (auto conv : all_fit_conventions()) {
        fit_calibration c;
        c.convention = conv;
        for (const auto& t : cat.types) {
            if (!t.stored_line || t.classes.size() < 2) continue;
            auto l = fit_device_line(t, conv);
            c.fits.emplace_back(t.name, l);
            c.worst_deviation = std::max(c.worst_deviation, fit_deviation(l, *t.stored_line));
        }
        if (!best || c.worst_deviation < best->worst_deviation) best = c;
        if (best->worst_deviation <= 1.0) break;
    }
    return *best;
}

// Base device of a protected branch resolved against a catalog.
struct device_ref {
    std::size_t type = 0;
    std::size_t base_class = 0;
};

// Resolves every branch device to (type, class). "auto" sizes the class to the base current.
inline std::vector<std::optional<device_ref>> resolve_devices(const network& net, const device_catalog& cat) {
    std::vector<std::optional<device_ref>> out(net.branch_count());
    for (std::size_t k = 0; k < net.branch_count(); ++k) {
        const auto& br = net.branches()[k];
        if (!br.device) continue;
        device_ref r;
        try {
            r.type = cat.type_index(br.device->type);
        } catch (const catalog_coverage_error& e) {
            throw catalog_coverage_error("branch " + std::to_string(br.id) + ": " + e.what(), br.id);
        }
        const auto& cls = cat.types[r.type].classes;
        const std::string& c = br.device->cls;
        if (c == "auto") {
            if (!br.base_current_a) throw domain_error("branch " + std::to_string(br.id) + ": base current unknown");
            try {
                r.base_class = cat.required_class(r.type, *br.base_current_a);
            } catch (const catalog_coverage_error& e) {
                throw catalog_coverage_error("branch " + std::to_string(br.id) + ": " + e.what(), br.id);
            }
        } else if (!c.empty() && std::all_of(c.begin(), c.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            std::size_t idx = std::stoul(c);
            if (idx < 1 || idx > cls.size())
                throw catalog_coverage_error("branch " + std::to_string(br.id) + ": class index out of range", br.id);
            r.base_class = idx - 1;
        } else {
            auto it = std::find_if(cls.begin(), cls.end(), [&](const device_class& k) { return k.label() == c; });
            if (it == cls.end())
                throw catalog_coverage_error("branch " + std::to_string(br.id) + ": unknown class '" + c + "'", br.id);
            r.base_class = static_cast<std::size_t>(it - cls.begin());
        }
        out[k] = r;
    }
    return out;
}

} // namespace evplace
