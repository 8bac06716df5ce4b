#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vlbench/common.hpp"
#include "vlbench/stats/design.hpp"

namespace vlbench {

enum class Penalty { None, L1, L2, ElasticNet };

inline std::string to_string(Penalty p) {
    switch (p) {
        case Penalty::None: return "none";
        case Penalty::L1: return "l1";
        case Penalty::L2: return "l2";
        case Penalty::ElasticNet: return "elasticnet";
    }
    return "none";
}

struct LogisticConfig {
    Penalty penalty = Penalty::None;
    double C = 1.0;        // inverse regularization strength
    double l1_ratio = 0.0; // elastic net mix, 1 = pure L1
    double tol = 1e-6;
    int max_iter = 1000;
};

struct LogisticFit {
    double intercept = 0;
    std::vector<double> coef;
    bool converged = false;
    int n_iter = 0;
    double objective = 0;
};

namespace stats_detail {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double log1pexp(double z) {
    // log(1 + e^z) without overflow
    if (z > 35) return z;
    if (z < -35) return std::exp(z);
    return std::log1p(std::exp(z));
}

inline double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0;
}

}  // namespace stats_detail

namespace stats_detail {

// L-BFGS with Armijo backtracking for the smooth objectives (no L1 part).
// Parameter vector is [intercept, w...]; only w carries the L2 term.
inline LogisticFit fit_smooth_lbfgs(const SparseDataset& data, double l2, double tol,
                                    int max_iter) {
    const int n = static_cast<int>(data.rows.size());
    const int p = data.n_columns;
    const int dim = p + 1;

    auto eval = [&](const std::vector<double>& th, std::vector<double>& g) {
        std::fill(g.begin(), g.end(), 0.0);
        double loss = 0;
        for (int i = 0; i < n; ++i) {
            double m = th[0];
            for (int j : data.rows[static_cast<std::size_t>(i)])
                m += th[static_cast<std::size_t>(j + 1)];
            loss += data.y[static_cast<std::size_t>(i)] ? log1pexp(-m) : log1pexp(m);
            const double r = sigmoid(m) - data.y[static_cast<std::size_t>(i)];
            g[0] += r;
            for (int j : data.rows[static_cast<std::size_t>(i)])
                g[static_cast<std::size_t>(j + 1)] += r;
        }
        loss /= n;
        for (int k = 0; k < dim; ++k) g[static_cast<std::size_t>(k)] /= n;
        for (int j = 1; j < dim; ++j) {
            loss += 0.5 * l2 * th[static_cast<std::size_t>(j)] * th[static_cast<std::size_t>(j)];
            g[static_cast<std::size_t>(j)] += l2 * th[static_cast<std::size_t>(j)];
        }
        return loss;
    };

    std::vector<double> th(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> g(static_cast<std::size_t>(dim), 0.0);
    double f = eval(th, g);

    const int mem = 10;
    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;

    LogisticFit fit;
    for (int iter = 0; iter < max_iter; ++iter) {
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        fit.n_iter = iter;
        if (gmax < tol) {
            fit.converged = true;
            break;
        }

        // two-loop recursion
        std::vector<double> q(g);
        const int hlen = static_cast<int>(s_hist.size());
        std::vector<double> alpha(static_cast<std::size_t>(hlen));
        for (int h = hlen - 1; h >= 0; --h) {
            double a = 0;
            for (int k = 0; k < dim; ++k)
                a += s_hist[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)] *
                     q[static_cast<std::size_t>(k)];
            a *= rho_hist[static_cast<std::size_t>(h)];
            alpha[static_cast<std::size_t>(h)] = a;
            for (int k = 0; k < dim; ++k)
                q[static_cast<std::size_t>(k)] -=
                    a * y_hist[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)];
        }
        double gamma = 1.0;
        if (hlen > 0) {
            double sy = 0, yy = 0;
            for (int k = 0; k < dim; ++k) {
                sy += s_hist.back()[static_cast<std::size_t>(k)] *
                      y_hist.back()[static_cast<std::size_t>(k)];
                yy += y_hist.back()[static_cast<std::size_t>(k)] *
                      y_hist.back()[static_cast<std::size_t>(k)];
            }
            if (yy > 0) gamma = sy / yy;
        }
        for (double& v : q) v *= gamma;
        for (int h = 0; h < hlen; ++h) {
            double bcoef = 0;
            for (int k = 0; k < dim; ++k)
                bcoef += y_hist[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)] *
                         q[static_cast<std::size_t>(k)];
            bcoef *= rho_hist[static_cast<std::size_t>(h)];
            for (int k = 0; k < dim; ++k)
                q[static_cast<std::size_t>(k)] +=
                    (alpha[static_cast<std::size_t>(h)] - bcoef) *
                    s_hist[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)];
        }

        // descent direction with Armijo backtracking
        double gq = 0;
        for (int k = 0; k < dim; ++k)
            gq += g[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(k)];
        if (gq <= 0) {  // fall back to steepest descent
            q = g;
            gq = 0;
            for (double v : g) gq += v * v;
        }
        double t = 1.0;
        std::vector<double> th_new(static_cast<std::size_t>(dim));
        std::vector<double> g_new(static_cast<std::size_t>(dim));
        double f_new = f;
        for (int ls = 0; ls < 40; ++ls) {
            for (int k = 0; k < dim; ++k)
                th_new[static_cast<std::size_t>(k)] =
                    th[static_cast<std::size_t>(k)] - t * q[static_cast<std::size_t>(k)];
            f_new = eval(th_new, g_new);
            if (f_new <= f - 1e-4 * t * gq) break;
            t *= 0.5;
        }

        std::vector<double> s_vec(static_cast<std::size_t>(dim)), y_vec(static_cast<std::size_t>(dim));
        double sy = 0;
        for (int k = 0; k < dim; ++k) {
            s_vec[static_cast<std::size_t>(k)] =
                th_new[static_cast<std::size_t>(k)] - th[static_cast<std::size_t>(k)];
            y_vec[static_cast<std::size_t>(k)] =
                g_new[static_cast<std::size_t>(k)] - g[static_cast<std::size_t>(k)];
            sy += s_vec[static_cast<std::size_t>(k)] * y_vec[static_cast<std::size_t>(k)];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > mem) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
        th = th_new;
        g = g_new;
        if (std::abs(f - f_new) < 1e-15 && f_new <= f) {
            f = f_new;
            // stalled line search: report the best point found
            double gm = 0;
            for (double v : g) gm = std::max(gm, std::abs(v));
            fit.converged = gm < tol;
            fit.n_iter = iter + 1;
            break;
        }
        f = f_new;
        fit.n_iter = iter + 1;
    }

    fit.intercept = th[0];
    fit.coef.assign(th.begin() + 1, th.end());
    fit.objective = f;
    return fit;
}

}  // namespace stats_detail

// Regularized logistic regression on sparse binary features. Smooth
// objectives (none, l2) go through L-BFGS; l1 and elastic net use
// accelerated proximal gradient descent (restarting FISTA). The objective is
// mean log-loss + (1/(C n)) * penalty(w); the intercept is never penalized.
inline LogisticFit fit_logistic(const SparseDataset& data, const LogisticConfig& cfg = {}) {
    const int n = static_cast<int>(data.rows.size());
    const int p = data.n_columns;
    if (n == 0) throw ConfigInvalid("fit_logistic needs at least one observation");

    const double lam = cfg.penalty == Penalty::None ? 0.0 : 1.0 / (cfg.C * n);
    double l1 = 0, l2 = 0;
    switch (cfg.penalty) {
        case Penalty::None: break;
        case Penalty::L1: l1 = lam; break;
        case Penalty::L2: l2 = lam; break;
        case Penalty::ElasticNet:
            l1 = lam * cfg.l1_ratio;
            l2 = lam * (1.0 - cfg.l1_ratio);
            break;
    }

    if (l1 == 0) return stats_detail::fit_smooth_lbfgs(data, l2, cfg.tol, cfg.max_iter);

    // Lipschitz bound for the mean-loss gradient: 0.25 * max_i ||x_i||^2
    // (rows are 0/1 with an implicit intercept feature)
    std::size_t max_nnz = 1;
    for (const auto& r : data.rows) max_nnz = std::max(max_nnz, r.size() + 1);
    double step = 1.0 / (0.25 * static_cast<double>(max_nnz) + l2);

    std::vector<double> w(p, 0.0), w_prev(p, 0.0), v(p, 0.0);
    double b = 0, b_prev = 0, bv = 0;
    std::vector<double> grad(p, 0.0);
    std::vector<double> z(n, 0.0);

    auto margin = [&](const std::vector<double>& wc, double bc, int i) {
        double s = bc;
        for (int j : data.rows[static_cast<std::size_t>(i)]) s += wc[static_cast<std::size_t>(j)];
        return s;
    };

    auto objective = [&](const std::vector<double>& wc, double bc) {
        double loss = 0;
        for (int i = 0; i < n; ++i) {
            const double m = margin(wc, bc, i);
            loss += data.y[static_cast<std::size_t>(i)] ? stats_detail::log1pexp(-m)
                                                        : stats_detail::log1pexp(m);
        }
        loss /= n;
        for (double x : wc) loss += l1 * std::abs(x) + 0.5 * l2 * x * x;
        return loss;
    };

    double prev_obj = objective(w, b);
    LogisticFit fit;
    double t_acc = 1.0;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // gradient of the smooth part at the extrapolated point (v, bv)
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0;
        for (int i = 0; i < n; ++i) {
            const double m = margin(v, bv, i);
            const double r = stats_detail::sigmoid(m) - data.y[static_cast<std::size_t>(i)];
            gb += r;
            for (int j : data.rows[static_cast<std::size_t>(i)])
                grad[static_cast<std::size_t>(j)] += r;
        }
        gb /= n;
        const double inv_n = 1.0 / n;

        w_prev = w;
        b_prev = b;
        for (int j = 0; j < p; ++j) {
            const double g = grad[static_cast<std::size_t>(j)] * inv_n +
                             l2 * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(j)] = stats_detail::soft_threshold(
                v[static_cast<std::size_t>(j)] - step * g, step * l1);
        }
        b = bv - step * gb;

        const double obj = objective(w, b);
        if (obj > prev_obj + 1e-12) {
            // restart the momentum and shrink the step on an uphill move
            t_acc = 1.0;
            v = w_prev;
            bv = b_prev;
            step *= 0.5;
            w = w_prev;
            b = b_prev;
            if (step < 1e-12) break;
            continue;
        }

        double max_delta = std::abs(b - b_prev);
        for (int j = 0; j < p; ++j)
            max_delta = std::max(max_delta,
                                 std::abs(w[static_cast<std::size_t>(j)] -
                                          w_prev[static_cast<std::size_t>(j)]));

        fit.n_iter = iter + 1;
        if (max_delta < cfg.tol) {
            fit.converged = true;
            prev_obj = obj;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        const double mom = (t_acc - 1.0) / t_next;
        for (int j = 0; j < p; ++j)
            v[static_cast<std::size_t>(j)] =
                w[static_cast<std::size_t>(j)] +
                mom * (w[static_cast<std::size_t>(j)] - w_prev[static_cast<std::size_t>(j)]);
        bv = b + mom * (b - b_prev);
        t_acc = t_next;
        prev_obj = obj;
    }

    fit.intercept = b;
    fit.coef = std::move(w);
    fit.objective = prev_obj;
    return fit;  // non-convergence is flagged, not fatal
}

inline double predict_proba(const LogisticFit& fit, const std::vector<int>& active) {
    double z = fit.intercept;
    for (int j : active) z += fit.coef[static_cast<std::size_t>(j)];
    return stats_detail::sigmoid(z);
}

}  // namespace vlbench
