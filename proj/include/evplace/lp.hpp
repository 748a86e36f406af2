#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace evplace {

constexpr double lp_inf = std::numeric_limits<double>::infinity();

// min c·x + c0  s.t.  lo_i <= a_i·x <= hi_i,  lb <= x <= ub.
struct lp_problem {
    struct row {
        std::vector<std::pair<int, double>> coef;
        double lo = -lp_inf;
        double hi = lp_inf;
        std::string name;
    };

    std::vector<double> c;
    double c0 = 0.0;
    std::vector<double> lb, ub;
    std::vector<row> rows;

    int add_var(double cost, double lo, double hi) {
        c.push_back(cost);
        lb.push_back(lo);
        ub.push_back(hi);
        return static_cast<int>(c.size()) - 1;
    }
    int add_row(std::vector<std::pair<int, double>> coef, double lo, double hi, std::string name = {}) {
        rows.push_back({std::move(coef), lo, hi, std::move(name)});
        return static_cast<int>(rows.size()) - 1;
    }
    int cols() const { return static_cast<int>(c.size()); }
    int row_count() const { return static_cast<int>(rows.size()); }
};

enum class lp_status { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(lp_status s) {
    switch (s) {
    case lp_status::optimal: return "optimal";
    case lp_status::infeasible: return "infeasible";
    case lp_status::unbounded: return "unbounded";
    case lp_status::iteration_limit: return "iteration_limit";
    }
    return "?";
}

struct lp_result {
    lp_status status = lp_status::optimal;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<double> row_activity;
    // Row multipliers proving infeasibility: the interval of Σλ_i·a_i·x over the
    // variable box and the interval of Σλ_i·s_i over the row bounds do not meet.
    std::vector<double> certificate;
    int iterations = 0;
};

// Bounded dual simplex on a dense condensed tableau x_B = T·x_N. Rows are held as
// a·x − s = 0 with the row activity s boxed by the row bounds; the all-slack basis is
// dual feasible because every structural variable is boxed (infinite bounds become
// large artificial ones). Deterministic: largest scaled infeasibility leaves, the
// ratio test breaks ties by lowest variable index, and long degenerate runs switch
// to Bland's rule. Copy the object to warm start a modified problem.
class dual_simplex {
public:
    static constexpr double big = 1e9;

    explicit dual_simplex(const lp_problem& p) {
        n_ = p.cols();
        m_ = p.row_count();
        auto a = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(m_, n_));
        rscale_.assign(static_cast<std::size_t>(m_), 1.0);
        for (int i = 0; i < m_; ++i) {
            double mx = 0.0;
            for (auto [j, v] : p.rows[static_cast<std::size_t>(i)].coef) {
                if (j < 0 || j >= n_) throw domain_error("lp row references unknown column");
                (*a)(i, j) += v;
            }
            for (int j = 0; j < n_; ++j) mx = std::max(mx, std::abs((*a)(i, j)));
            if (mx > 0) rscale_[static_cast<std::size_t>(i)] = 1.0 / mx;
            a->row(i) *= rscale_[static_cast<std::size_t>(i)];
        }
        a_ = a;
        double cmax = 0.0;
        for (double v : p.c) cmax = std::max(cmax, std::abs(v));
        cscale_ = cmax > 0 ? 1.0 / cmax : 1.0;
        c0_ = p.c0;
        const int total = n_ + m_;
        cost_.assign(static_cast<std::size_t>(total), 0.0);
        lo_.assign(static_cast<std::size_t>(total), 0.0);
        hi_.assign(static_cast<std::size_t>(total), 0.0);
        for (int j = 0; j < n_; ++j) {
            cost_[j] = p.c[j] * cscale_;
            set_structural_bounds(j, p.lb[j], p.ub[j]);
        }
        for (int i = 0; i < m_; ++i) {
            const auto& r = p.rows[static_cast<std::size_t>(i)];
            const double s = rscale_[static_cast<std::size_t>(i)];
            lo_[n_ + i] = std::isfinite(r.lo) ? r.lo * s : -lp_inf;
            hi_[n_ + i] = std::isfinite(r.hi) ? r.hi * s : lp_inf;
            if (lo_[n_ + i] > hi_[n_ + i]) trivially_infeasible_row_ = i;
        }
        head_.resize(static_cast<std::size_t>(m_));
        nb_.resize(static_cast<std::size_t>(n_));
        at_upper_.assign(static_cast<std::size_t>(total), 0);
        is_basic_.assign(static_cast<std::size_t>(total), 0);
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            is_basic_[n_ + i] = 1;
        }
        for (int j = 0; j < n_; ++j) {
            nb_[j] = j;
            at_upper_[j] = cost_[j] < 0 ? 1 : 0;
        }
        t_ = *a_;
        d_.assign(static_cast<std::size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j) d_[j] = cost_[j];
        x_.assign(static_cast<std::size_t>(total), 0.0);
        reset_nonbasic_values();
        recompute_basic_values();
    }

    int cols() const { return n_; }
    int rows() const { return m_; }

    // Changes the bounds of structural column j (branching). Keeps the basis.
    void set_bounds(int j, double lo, double hi) {
        set_structural_bounds(j, lo, hi);
        if (!is_basic_[j]) {
            if (lo_[j] == hi_[j]) at_upper_[j] = 0;
            const double old = x_[j];
            x_[j] = at_upper_[j] ? hi_[j] : lo_[j];
            const double delta = x_[j] - old;
            if (delta != 0.0) {
                const int col = column_of(j);
                for (int i = 0; i < m_; ++i) x_[head_[i]] += t_(i, col) * delta;
            }
        }
    }
    double lower(int j) const { return lo_[j]; }
    double upper(int j) const { return hi_[j]; }

    lp_result solve(int max_iterations = 200000) {
        lp_result res;
        if (trivially_infeasible_row_ >= 0) {
            res.status = lp_status::infeasible;
            res.certificate.assign(static_cast<std::size_t>(m_), 0.0);
            res.certificate[trivially_infeasible_row_] = 1.0;
            return res;
        }
        int degenerate_run = 0;
        int since_refactor = 0;
        int it = 0;
        // Dual feasibility can drift after refactoring; restore by bound flips.
        fix_dual_signs();
        for (;;) {
            if (it >= max_iterations) {
                res.status = lp_status::iteration_limit;
                break;
            }
            const bool bland = degenerate_run > 50;
            int r = choose_leaving(bland);
            if (r < 0) {
                if (since_refactor > 0) {
                    refactor();
                    since_refactor = 0;
                    fix_dual_signs();
                    if (choose_leaving(bland) >= 0) continue;
                }
                res.status = lp_status::optimal;
                break;
            }
            const int leaving = head_[r];
            const bool increase = x_[leaving] < lo_[leaving];
            const double target = increase ? lo_[leaving] : hi_[leaving];
            int s = choose_entering(r, increase, bland);
            if (s < 0) {
                refactor();
                since_refactor = 0;
                fix_dual_signs();
                r = choose_leaving(bland);
                if (r < 0) continue;
                const int lv = head_[r];
                const bool inc2 = x_[lv] < lo_[lv];
                s = choose_entering(r, inc2, bland);
                if (s < 0) {
                    res.status = lp_status::infeasible;
                    res.certificate = certificate_from_row(r);
                    break;
                }
                pivot(r, s, inc2 ? lo_[lv] : hi_[lv], inc2);
            } else {
                const double step = std::abs(d_[s] / t_(r, s));
                pivot(r, s, target, increase);
                degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;
            }
            ++it;
            if (++since_refactor >= 400) {
                refactor();
                since_refactor = 0;
                fix_dual_signs();
            }
        }
        res.iterations = it;
        total_iterations_ += it;
        if (res.status != lp_status::optimal) return res;
        res.x.assign(static_cast<std::size_t>(n_), 0.0);
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) {
            res.x[j] = clean(x_[j], lo_[j], hi_[j]);
            if (std::abs(res.x[j]) >= 0.5 * big) res.status = lp_status::unbounded;
            obj += cost_[j] * res.x[j];
        }
        res.objective = obj / cscale_ + c0_;
        res.row_activity.assign(static_cast<std::size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) res.row_activity[i] = x_[n_ + i] / rscale_[static_cast<std::size_t>(i)];
        return res;
    }

    long total_iterations() const { return total_iterations_; }

private:
    void set_structural_bounds(int j, double lo, double hi) {
        if (lo > hi) throw domain_error("lp column with empty bounds");
        lo_[j] = std::isfinite(lo) ? lo : -big;
        hi_[j] = std::isfinite(hi) ? hi : big;
    }

    static double clean(double v, double lo, double hi) {
        if (std::abs(v - lo) < 1e-9 * std::max(1.0, std::abs(lo))) return lo;
        if (std::abs(v - hi) < 1e-9 * std::max(1.0, std::abs(hi))) return hi;
        return v;
    }

    int column_of(int var) const {
        for (int j = 0; j < n_; ++j)
            if (nb_[j] == var) return j;
        throw domain_error("variable is basic");
    }

    void reset_nonbasic_values() {
        for (int j = 0; j < n_; ++j) {
            const int v = nb_[j];
            x_[v] = at_upper_[v] ? hi_[v] : lo_[v];
        }
    }

    void recompute_basic_values() {
        Eigen::VectorXd xn(n_);
        for (int j = 0; j < n_; ++j) xn(j) = x_[nb_[j]];
        Eigen::VectorXd xb = t_ * xn;
        for (int i = 0; i < m_; ++i) x_[head_[i]] = xb(i);
    }

    double primal_tol(int v) const { return 1e-9 * std::max(1.0, std::min(std::abs(x_[v]), 1e6)); }

    int choose_leaving(bool bland) const {
        int best = -1;
        double best_inf = 0.0;
        int best_var = std::numeric_limits<int>::max();
        for (int i = 0; i < m_; ++i) {
            const int v = head_[i];
            const double inf = std::max(lo_[v] - x_[v], x_[v] - hi_[v]);
            if (!(inf > primal_tol(v))) continue;
            if (bland) {
                if (v < best_var) {
                    best_var = v;
                    best = i;
                }
            } else if (inf > best_inf) {
                best_inf = inf;
                best = i;
            }
        }
        return best;
    }

    // Dual ratio test. Returns the tableau column, or -1 when the row proves infeasibility.
    int choose_entering(int r, bool increase, bool bland) const {
        constexpr double piv_tol = 1e-9;
        constexpr double dual_tol = 1e-11;
        double row_max = 0.0;
        for (int j = 0; j < n_; ++j) row_max = std::max(row_max, std::abs(t_(r, j)));
        const double tol = piv_tol * std::max(1.0, row_max);
        auto eligible = [&](int j, double& ratio) {
            const int v = nb_[j];
            if (lo_[v] == hi_[v]) return false;
            const double a = t_(r, j);
            const bool up = at_upper_[v] != 0;
            bool ok;
            if (increase)
                ok = (!up && a > tol) || (up && a < -tol);
            else
                ok = (!up && a < -tol) || (up && a > tol);
            if (!ok) return false;
            ratio = std::max(0.0, up ? -d_[j] : d_[j]) / std::abs(a);
            return true;
        };
        if (bland) {
            int best = -1;
            double best_ratio = lp_inf;
            int best_var = 0;
            for (int j = 0; j < n_; ++j) {
                double ratio;
                if (!eligible(j, ratio)) continue;
                if (best < 0 || ratio < best_ratio - 1e-14 || (ratio <= best_ratio + 1e-14 && nb_[j] < best_var)) {
                    best = j;
                    best_ratio = ratio;
                    best_var = nb_[j];
                }
            }
            return best;
        }
        // Harris two-pass: bound the step with a small dual tolerance, then take the
        // largest pivot among the candidates within it; ties go to the lowest index.
        double theta = lp_inf;
        for (int j = 0; j < n_; ++j) {
            double ratio;
            if (!eligible(j, ratio)) continue;
            const double a = std::abs(t_(r, j));
            theta = std::min(theta, ratio + dual_tol / a);
        }
        if (!std::isfinite(theta)) return -1;
        int best = -1;
        double best_abs = 0.0;
        double best_ratio = lp_inf;
        for (int j = 0; j < n_; ++j) {
            double ratio;
            if (!eligible(j, ratio) || ratio > theta) continue;
            const double a = std::abs(t_(r, j));
            const bool better = best < 0 || a > best_abs * (1.0 + 1e-9) ||
                                (a >= best_abs * (1.0 - 1e-9) &&
                                 (ratio < best_ratio - 1e-15 || (ratio <= best_ratio + 1e-15 && nb_[j] < nb_[best])));
            if (better) {
                best = j;
                best_abs = a;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(int r, int s, double target, bool increase) {
        const double p = t_(r, s);
        const int leaving = head_[r];
        const int entering = nb_[s];
        // Primal step: move the entering variable until the leaving one reaches target.
        const double delta = (target - x_[leaving]) / p;
        x_[entering] += delta;
        for (int i = 0; i < m_; ++i) x_[head_[i]] += t_(i, s) * delta;
        x_[leaving] = target;
        // Dual step.
        const double theta = d_[s] / p;
        for (int j = 0; j < n_; ++j)
            if (j != s) d_[j] -= theta * t_(r, j);
        d_[s] = theta;
        // Tableau exchange.
        Eigen::RowVectorXd prow = t_.row(r);
        Eigen::VectorXd pcol = t_.col(s);
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = pcol(i) / p;
            if (f == 0.0) continue;
            t_.row(i).noalias() -= f * prow;
            t_(i, s) = f;
        }
        t_.row(r) = -prow / p;
        t_(r, s) = 1.0 / p;
        head_[r] = entering;
        nb_[s] = leaving;
        is_basic_[entering] = 1;
        is_basic_[leaving] = 0;
        at_upper_[leaving] = increase ? 0 : 1;
        at_upper_[entering] = 0;
    }

    // Rebuilds T, d and basic values from the current basis.
    void refactor() {
        std::vector<int> bs; // basic structurals
        for (int i = 0; i < m_; ++i)
            if (head_[i] < n_) bs.push_back(head_[i]);
        std::vector<int> r1; // rows with nonbasic slack
        for (int j = 0; j < n_; ++j)
            if (nb_[j] >= n_) r1.push_back(nb_[j] - n_);
        std::sort(r1.begin(), r1.end());
        const int k = static_cast<int>(bs.size());
        if (static_cast<int>(r1.size()) != k) throw numerical_error("lp basis bookkeeping inconsistent");
        Eigen::MatrixXd h(k, n_);
        if (k > 0) {
            Eigen::MatrixXd g(k, k);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) g(a, b) = (*a_)(r1[a], bs[b]);
            Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, n_);
            std::vector<int> r1pos(static_cast<std::size_t>(m_), -1);
            for (int a = 0; a < k; ++a) r1pos[r1[a]] = a;
            for (int j = 0; j < n_; ++j) {
                const int v = nb_[j];
                if (v < n_)
                    for (int a = 0; a < k; ++a) q(a, j) = -(*a_)(r1[a], v);
                else
                    q(r1pos[v - n_], j) = 1.0;
            }
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
            h = lu.solve(q);
            if (!h.allFinite()) throw numerical_error("lp basis singular");
        }
        std::vector<int> pos_in_bs(static_cast<std::size_t>(n_), -1);
        for (int b = 0; b < k; ++b) pos_in_bs[bs[b]] = b;
        Eigen::MatrixXd abs_(m_, std::max(k, 0));
        for (int b = 0; b < k; ++b) abs_.col(b) = a_->col(bs[b]);
        Eigen::MatrixXd slack_rows = abs_ * h; // m × n
        for (int i = 0; i < m_; ++i) {
            const int v = head_[i];
            if (v < n_) {
                t_.row(i) = h.row(pos_in_bs[v]);
            } else {
                const int row = v - n_;
                t_.row(i) = slack_rows.row(row);
                for (int j = 0; j < n_; ++j)
                    if (nb_[j] < n_) t_(i, j) += (*a_)(row, nb_[j]);
            }
        }
        for (int j = 0; j < n_; ++j) {
            double dj = cost_[nb_[j]];
            for (int i = 0; i < m_; ++i) dj += t_(i, j) * cost_[head_[i]];
            d_[j] = dj;
        }
        reset_nonbasic_values();
        recompute_basic_values();
    }

    // Flips nonbasic variables whose reduced cost sign disagrees with their bound.
    void fix_dual_signs() {
        bool changed = false;
        for (int j = 0; j < n_; ++j) {
            const int v = nb_[j];
            if (lo_[v] == hi_[v]) continue;
            if (!at_upper_[v] && d_[j] < -1e-9 && std::isfinite(hi_[v])) {
                at_upper_[v] = 1;
                changed = true;
            } else if (at_upper_[v] && d_[j] > 1e-9 && std::isfinite(lo_[v])) {
                at_upper_[v] = 0;
                changed = true;
            }
        }
        if (changed) {
            reset_nonbasic_values();
            recompute_basic_values();
        }
    }

    std::vector<double> certificate_from_row(int r) const {
        // Identity x_B(r) − Σ_j T_rj·x_N(j) = 0 is a combination Σ μ_i (a'_i·x − s'_i);
        // the slack coefficients give μ, unscaled by the row factors.
        std::vector<double> mu(static_cast<std::size_t>(m_), 0.0);
        if (head_[r] >= n_) mu[head_[r] - n_] = -1.0;
        for (int j = 0; j < n_; ++j)
            if (nb_[j] >= n_) mu[nb_[j] - n_] = t_(r, j);
        for (int i = 0; i < m_; ++i) mu[i] *= rscale_[static_cast<std::size_t>(i)];
        return mu;
    }

    int n_ = 0, m_ = 0;
    std::shared_ptr<const Eigen::MatrixXd> a_; // scaled constraint matrix, shared by copies
    std::vector<double> rscale_;
    double cscale_ = 1.0;
    double c0_ = 0.0;
    std::vector<double> cost_, lo_, hi_, x_, d_;
    std::vector<int> head_, nb_;
    std::vector<char> at_upper_, is_basic_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
    int trivially_infeasible_row_ = -1;
    long total_iterations_ = 0;
};

inline lp_result solve_lp(const lp_problem& p) {
    dual_simplex s(p);
    return s.solve();
}

// Checks an infeasibility certificate by interval arithmetic.
inline bool certificate_proves_infeasible(const lp_problem& p, const std::vector<double>& lambda, double tol = 1e-7) {
    if (lambda.size() != p.rows.size()) return false;
    std::vector<double> g(p.c.size(), 0.0);
    double slo = 0.0, shi = 0.0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const double l = lambda[i];
        if (l == 0.0) continue;
        for (auto [j, v] : p.rows[i].coef) g[static_cast<std::size_t>(j)] += l * v;
        const double a = l * p.rows[i].lo, b = l * p.rows[i].hi;
        slo += std::min(a, b);
        shi += std::max(a, b);
        if (std::isnan(slo) || std::isnan(shi)) return false;
    }
    double xlo = 0.0, xhi = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g[j]) < 1e-12) continue;
        const double a = g[j] * p.lb[j], b = g[j] * p.ub[j];
        xlo += std::min(a, b);
        xhi += std::max(a, b);
    }
    const double gap = tol * std::max(1.0, std::max(std::abs(xlo), std::abs(xhi)));
    return xhi < slo - gap || shi < xlo - gap;
}

} // namespace evplace
