#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "errors.hpp"
#include "network.hpp"

namespace evplace {

// Per-unit ZIP injections at the non-slack buses (index b-1 for internal bus b).
// Injection sign: consumption enters as a negative injection.
struct injection_set {
    Eigen::VectorXcd sz, si, sp;
    double h = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(sp.size()); }
};

enum class pf_method { linear, tangent, newton };

struct voltage_solution {
    Eigen::VectorXcd v; // non-slack buses
    cd slack_v{1.0, 0.0};
    pf_method method = pf_method::linear;
    bool outside_trust_region = false;
    int iterations = 0;
    double mismatch = 0.0; // max |ΔS| in p.u. (newton only)

    // Voltages for every bus in internal order (slack first).
    Eigen::VectorXcd full() const {
        Eigen::VectorXcd out(v.size() + 1);
        out(0) = slack_v;
        out.tail(v.size()) = v;
        return out;
    }
    Eigen::VectorXd magnitudes() const { return full().cwiseAbs(); }
};

inline injection_set zero_injections(const network& net) {
    const auto m = static_cast<Eigen::Index>(net.bus_count() - 1);
    return {Eigen::VectorXcd::Zero(m), Eigen::VectorXcd::Zero(m), Eigen::VectorXcd::Zero(m), 1.0};
}

inline injection_set base_injections(const network& net) {
    injection_set inj = zero_injections(net);
    const double scale = 1.0 / (1000.0 * net.base_mva());
    for (std::size_t b = 1; b < net.bus_count(); ++b) {
        const auto& ld = net.buses()[b].load;
        const auto i = static_cast<Eigen::Index>(b - 1);
        inj.sz(i) = -ld.sz * scale;
        inj.si(i) = -ld.si * scale;
        inj.sp(i) = -ld.sp * scale;
    }
    return inj;
}

// Adds y_b spots of p_ev_kw each (unity power factor, constant power) at every bus.
inline void add_spot_load(injection_set& inj, const network& net, const std::vector<int>& y_per_bus, double p_ev_kw) {
    const double p = p_ev_kw / (1000.0 * net.base_mva());
    for (std::size_t b = 1; b < net.bus_count(); ++b)
        if (y_per_bus[b] != 0) inj.sp(static_cast<Eigen::Index>(b - 1)) -= p * y_per_bus[b];
}

inline double linearization_error_pct(double v) {
    if (!(v > 0.0 && v < 2.0)) throw domain_error("linearization error defined on 0 < v < 2");
    return 100.0 * std::abs(1.0 / v - (2.0 - v));
}

struct newton_options {
    double tolerance = 1e-8;
    int max_iterations = 50;
    std::optional<Eigen::VectorXcd> initial;
};

// Power-flow engine for one network. Holds the partitioned admittance data.
class power_flow {
public:
    explicit power_flow(const network& net) : n_(static_cast<Eigen::Index>(net.bus_count() - 1)) {
        vs_ = cd(net.buses()[0].voltage_pu, 0.0);
        yns_ = Eigen::VectorXcd::Zero(n_);
        parent_.assign(static_cast<std::size_t>(n_), -1);
        yup_.assign(static_cast<std::size_t>(n_), cd{});
        std::vector<Eigen::Triplet<cd>> t;
        for (std::size_t k = 0; k < net.branch_count(); ++k) {
            const cd y = 1.0 / net.z_pu(k);
            const auto a = static_cast<Eigen::Index>(net.upstream(k)) - 1;
            const auto b = static_cast<Eigen::Index>(net.downstream(k)) - 1;
            t.emplace_back(b, b, y);
            parent_[static_cast<std::size_t>(b)] = a;
            yup_[static_cast<std::size_t>(b)] = -y;
            if (a < 0) {
                yns_(b) -= y;
            } else {
                t.emplace_back(a, a, y);
                t.emplace_back(a, b, -y);
                t.emplace_back(b, a, -y);
            }
        }
        ynn_.resize(n_, n_);
        ynn_.setFromTriplets(t.begin(), t.end());
        ynn_.makeCompressed();
        ydiag_ = ynn_.diagonal();
        // Top-down order (parents before children) for the tree solve.
        std::vector<std::vector<Eigen::Index>> kids(static_cast<std::size_t>(n_));
        for (Eigen::Index b = 0; b < n_; ++b) {
            const auto p = parent_[static_cast<std::size_t>(b)];
            if (p < 0)
                order_.push_back(b);
            else
                kids[static_cast<std::size_t>(p)].push_back(b);
        }
        for (std::size_t q = 0; q < order_.size(); ++q)
            for (auto c : kids[static_cast<std::size_t>(order_[q])]) order_.push_back(c);
    }

    Eigen::Index size() const { return n_; }
    cd slack_voltage() const { return vs_; }
    const Eigen::SparseMatrix<cd>& ynn() const { return ynn_; }
    const Eigen::VectorXcd& yns() const { return yns_; }

    // Rectangular closed form A + B·conj(V) + C·V = 0 with
    // A = Y_NS·V_S − 2h·conj(S_P) − h·conj(S_I), B = h²·diag(conj(S_P)), C = Y_NN − h²·diag(conj(S_Z)).
    voltage_solution linear(const injection_set& inj) const {
        check(inj);
        const double h = inj.h;
        Eigen::VectorXcd a = yns_ * vs_ - 2.0 * h * inj.sp.conjugate() - h * inj.si.conjugate();
        Eigen::VectorXcd bdiag = h * h * inj.sp.conjugate();
        return solve_closed_form(inj, a, bdiag, pf_method::linear);
    }

    // Linear form with the bilinear B·conj(V) term expanded to first order about a
    // reference (ref_inj, ref_v). Exactly affine in the injections; equals linear()
    // at the reference.
    voltage_solution tangent(const injection_set& inj, const injection_set& ref_inj, const Eigen::VectorXcd& ref_v) const {
        check(inj);
        const double h = inj.h;
        Eigen::VectorXcd a = yns_ * vs_ - 2.0 * h * inj.sp.conjugate() - h * inj.si.conjugate() +
                             h * h * (inj.sp - ref_inj.sp).conjugate().cwiseProduct(ref_v.conjugate());
        Eigen::VectorXcd bdiag = h * h * ref_inj.sp.conjugate();
        return solve_closed_form(inj, a, bdiag, pf_method::tangent);
    }

    voltage_solution newton(const injection_set& inj, const newton_options& opt = {}) const {
        check(inj);
        const double h = inj.h;
        Eigen::VectorXcd v = opt.initial ? *opt.initial : Eigen::VectorXcd::Constant(n_, vs_);
        Eigen::VectorXcd cz = -h * h * inj.sz.conjugate();
        Eigen::VectorXcd ic = yns_ * vs_ - h * inj.si.conjugate();
        double mis = 0.0;
        if (n_ == 0) return voltage_solution{v, vs_, pf_method::newton, false, 1, 0.0};
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        bool analyzed = false;
        for (int it = 1; it <= opt.max_iterations; ++it) {
            Eigen::VectorXcd f = current_mismatch(inj, v, cz, ic);
            mis = (v.array() * f.conjugate().array()).abs().maxCoeff();
            if (!std::isfinite(mis)) break;
            if (mis < opt.tolerance) {
                voltage_solution s{v, vs_, pf_method::newton, false, it, mis};
                s.outside_trust_region = out_of_region(v);
                return s;
            }
            if (mis > 1e6) break;
            // dF/dconj(V) = diag(conj(S_P) / conj(V)^2)
            Eigen::VectorXcd bdiag = inj.sp.conjugate().cwiseQuotient(v.conjugate().cwiseProduct(v.conjugate()));
            Eigen::VectorXcd step;
            if (tree_solve(cz, bdiag, -f, step)) {
                v += step;
                continue;
            }
            Eigen::SparseMatrix<double> jac = real_form(cz, bdiag);
            Eigen::VectorXd rhs(2 * n_);
            rhs << -f.real(), -f.imag();
            // The sparsity pattern is fixed, so the symbolic analysis is done once.
            if (!analyzed) {
                lu.analyzePattern(jac);
                analyzed = true;
            }
            lu.factorize(jac);
            if (lu.info() != Eigen::Success) throw convergence_error("newton: singular jacobian", mis);
            Eigen::VectorXd dx = lu.solve(rhs);
            for (Eigen::Index i = 0; i < n_; ++i) v(i) += cd(dx(i), dx(i + n_));
        }
        throw convergence_error("newton power flow did not converge (last mismatch " + std::to_string(mis) + " p.u.)", mis);
    }

    // Max |ΔS| in p.u. of V against the ZIP model.
    double power_mismatch(const injection_set& inj, const Eigen::VectorXcd& v) const {
        if (n_ == 0) return 0.0;
        Eigen::VectorXcd cz = -inj.h * inj.h * inj.sz.conjugate();
        Eigen::VectorXcd ic = yns_ * vs_ - inj.h * inj.si.conjugate();
        Eigen::VectorXcd f = current_mismatch(inj, v, cz, ic);
        return (v.array() * f.conjugate().array()).abs().maxCoeff();
    }

    // Factorized real operator of the tangent form about a reference, for repeated
    // sensitivity solves. rhs(k) is the complex right-hand side change at bus k+1.
    class tangent_operator {
    public:
        Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
            const Eigen::Index n = rhs.size();
            Eigen::VectorXd r(2 * n);
            r << rhs.real(), rhs.imag();
            Eigen::VectorXd x = lu_.solve(r);
            Eigen::VectorXcd out(n);
            for (Eigen::Index i = 0; i < n; ++i) out(i) = cd(x(i), x(i + n));
            return out;
        }

    private:
        friend class power_flow;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    };

    tangent_operator make_tangent_operator(const injection_set& ref_inj) const {
        Eigen::VectorXcd cz = -ref_inj.h * ref_inj.h * ref_inj.sz.conjugate();
        Eigen::VectorXcd bdiag = ref_inj.h * ref_inj.h * ref_inj.sp.conjugate();
        tangent_operator op;
        op.lu_.compute(Eigen::MatrixXd(real_form(cz, bdiag)));
        return op;
    }

private:
    void check(const injection_set& inj) const {
        if (inj.sp.size() != n_ || inj.si.size() != n_ || inj.sz.size() != n_)
            throw domain_error("injection set size does not match network");
        if (!(inj.h > 0.0)) throw domain_error("injection scale h must be positive");
    }

    bool out_of_region(const Eigen::VectorXcd& v) const {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double m = std::abs(v(i));
            if (!(m > 0.0 && m < 2.0)) return true;
        }
        return false;
    }

    // F(V) = Y_NS·V_S + Y_NN·V − I_zip(V)
    Eigen::VectorXcd current_mismatch(const injection_set& inj, const Eigen::VectorXcd& v, const Eigen::VectorXcd& cz,
                                      const Eigen::VectorXcd& ic) const {
        Eigen::VectorXcd f = ynn_ * v + ic + cz.cwiseProduct(v);
        for (Eigen::Index i = 0; i < n_; ++i) f(i) -= std::conj(inj.sp(i)) / std::conj(v(i));
        return f;
    }

    // Real form of  C·V + diag(bdiag)·conj(V), C = Y_NN + diag(cdiag):
    //   [Cr + Br, −Ci + Bi; Ci + Bi, Cr − Br]
    Eigen::SparseMatrix<double> real_form(const Eigen::VectorXcd& cdiag, const Eigen::VectorXcd& bdiag) const {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(ynn_.nonZeros()) * 4 + static_cast<std::size_t>(n_) * 8);
        for (Eigen::Index col = 0; col < ynn_.outerSize(); ++col)
            for (Eigen::SparseMatrix<cd>::InnerIterator it(ynn_, col); it; ++it) {
                const auto i = it.row(), j = it.col();
                const cd c = it.value();
                t.emplace_back(i, j, c.real());
                t.emplace_back(i, j + n_, -c.imag());
                t.emplace_back(i + n_, j, c.imag());
                t.emplace_back(i + n_, j + n_, c.real());
            }
        for (Eigen::Index i = 0; i < n_; ++i) {
            const cd c = cdiag(i), b = bdiag(i);
            t.emplace_back(i, i, c.real() + b.real());
            t.emplace_back(i, i + n_, -c.imag() + b.imag());
            t.emplace_back(i + n_, i, c.imag() + b.imag());
            t.emplace_back(i + n_, i + n_, c.real() - b.real());
        }
        Eigen::SparseMatrix<double> m(2 * n_, 2 * n_);
        m.setFromTriplets(t.begin(), t.end());
        m.makeCompressed();
        return m;
    }

    voltage_solution solve_closed_form(const injection_set& inj, const Eigen::VectorXcd& a, const Eigen::VectorXcd& bdiag,
                                       pf_method method) const {
        Eigen::VectorXcd cz = -inj.h * inj.h * inj.sz.conjugate();
        voltage_solution s;
        s.slack_v = vs_;
        s.method = method;
        s.v = Eigen::VectorXcd(n_);
        if (n_ == 0) return s;
        Eigen::SparseMatrix<double> m = real_form(cz, bdiag);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(m);
        if (lu.info() != Eigen::Success) throw numerical_error("linearization singular");
        Eigen::VectorXd rhs(2 * n_);
        rhs << -a.real(), -a.imag();
        Eigen::VectorXd x = lu.solve(rhs);
        if (!x.allFinite()) throw numerical_error("linearization singular");
        for (Eigen::Index i = 0; i < n_; ++i) s.v(i) = cd(x(i), x(i + n_));
        s.outside_trust_region = out_of_region(s.v);
        return s;
    }

    // Solves the real form of C·x + diag(bdiag)·conj(x) = rhs, C = Y_NN + diag(cdiag), by
    // 2x2 block elimination from the leaves up. The matrix has the feeder's tree
    // sparsity, so there is no fill. Returns false on a near-singular block pivot.
    bool tree_solve(const Eigen::VectorXcd& cdiag, const Eigen::VectorXcd& bdiag, const Eigen::VectorXcd& rhs,
                    Eigen::VectorXcd& out) const {
        const auto n = static_cast<std::size_t>(n_);
        std::vector<Eigen::Matrix2d> d(n);
        std::vector<Eigen::Vector2d> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const cd c = ydiag_(ii) + cdiag(ii), b = bdiag(ii);
            d[i] << c.real() + b.real(), -c.imag() + b.imag(), c.imag() + b.imag(), c.real() - b.real();
            r[i] << rhs(ii).real(), rhs(ii).imag();
        }
        auto block = [](cd y) {
            Eigen::Matrix2d m;
            m << y.real(), -y.imag(), y.imag(), y.real();
            return m;
        };
        auto pivot_ok = [](const Eigen::Matrix2d& m) {
            return std::abs(m.determinant()) > 1e-14 * std::max(1.0, m.squaredNorm());
        };
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            const auto i = static_cast<std::size_t>(*it);
            const auto p = parent_[i];
            if (p < 0) continue;
            if (!pivot_ok(d[i])) return false;
            const Eigen::Matrix2d o = block(yup_[i]);
            const Eigen::Matrix2d oinv = o * d[i].inverse();
            d[static_cast<std::size_t>(p)] -= oinv * o;
            r[static_cast<std::size_t>(p)] -= oinv * r[i];
        }
        out.resize(n_);
        std::vector<Eigen::Vector2d> x(n);
        for (auto b : order_) {
            const auto i = static_cast<std::size_t>(b);
            if (!pivot_ok(d[i])) return false;
            Eigen::Vector2d rhs_i = r[i];
            const auto p = parent_[i];
            if (p >= 0) rhs_i -= block(yup_[i]) * x[static_cast<std::size_t>(p)];
            x[i] = d[i].inverse() * rhs_i;
            out(b) = cd(x[i](0), x[i](1));
        }
        return true;
    }

    Eigen::Index n_;
    cd vs_;
    Eigen::SparseMatrix<cd> ynn_;
    Eigen::VectorXcd yns_;
    Eigen::VectorXcd ydiag_;
    std::vector<Eigen::Index> parent_; // non-slack parent, -1 when fed from the slack
    std::vector<cd> yup_;             // Y_NN(b, parent)
    std::vector<Eigen::Index> order_;
};

inline voltage_solution linear_power_flow(const network& net, const injection_set& inj) {
    return power_flow(net).linear(inj);
}

inline voltage_solution newton_power_flow(const network& net, const injection_set& inj, const newton_options& opt = {}) {
    return power_flow(net).newton(inj, opt);
}

// Branch currents in p.u., oriented from the slack side towards the far side.
inline std::vector<cd> branch_currents_pu(const network& net, const Eigen::VectorXcd& v_full) {
    std::vector<cd> out(net.branch_count());
    for (std::size_t k = 0; k < net.branch_count(); ++k)
        out[k] = (v_full(static_cast<Eigen::Index>(net.upstream(k))) - v_full(static_cast<Eigen::Index>(net.downstream(k)))) /
                 net.z_pu(k);
    return out;
}

inline std::vector<double> branch_currents_a(const network& net, const Eigen::VectorXcd& v_full) {
    auto pu = branch_currents_pu(net, v_full);
    std::vector<double> out(pu.size());
    for (std::size_t k = 0; k < pu.size(); ++k) out[k] = std::abs(pu[k]) * net.branch_i_base_a(k);
    return out;
}

// Fills missing base currents from a Newton base case at zero EV load.
inline void fill_base_currents(network& net) {
    if (net.base_currents_filled()) return;
    auto sol = newton_power_flow(net, base_injections(net));
    auto amps = branch_currents_a(net, sol.full());
    for (std::size_t k = 0; k < net.branch_count(); ++k) {
        auto& br = net.mutable_branches()[k];
        if (!br.base_current_a) br.base_current_a = amps[k];
    }
}

} // namespace evplace
