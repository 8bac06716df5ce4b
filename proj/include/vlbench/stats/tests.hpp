#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/distributions/beta.hpp>

#include "vlbench/common.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/stats/bootstrap.hpp"
#include "vlbench/stats/design.hpp"
#include "vlbench/stats/logistic.hpp"

namespace vlbench {

namespace stats_detail {

inline double norm_cdf(double z) { return boost::math::cdf(boost::math::normal_distribution<>(), z); }
inline double norm_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<>(), p);
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0;
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - std::floor(pos);
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

}  // namespace stats_detail

// ---------------------------------------------------------------------------
// Shapiro-Wilk normality test (Royston's AS R94 approximation, n in [3,5000])
// ---------------------------------------------------------------------------

struct ShapiroWilk {
    double w = 0;
    double p_value = 0;
};

inline ShapiroWilk shapiro_wilk(std::vector<double> x) {
    const int n = static_cast<int>(x.size());
    if (n < 3) throw InsufficientSamples("shapiro_wilk needs at least 3 observations");
    if (n > 5000) x.resize(5000);
    const int nn = static_cast<int>(x.size());
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) return {1.0, 1.0};  // constant sample

    std::vector<double> m(static_cast<std::size_t>(nn));
    double ssq_m = 0;
    for (int i = 1; i <= nn; ++i) {
        m[static_cast<std::size_t>(i - 1)] =
            stats_detail::norm_quantile((i - 0.375) / (nn + 0.25));
        ssq_m += m[static_cast<std::size_t>(i - 1)] * m[static_cast<std::size_t>(i - 1)];
    }

    std::vector<double> a(static_cast<std::size_t>(nn));
    const double rsn = 1.0 / std::sqrt(static_cast<double>(nn));
    if (nn <= 5) {
        const double c1 = m[static_cast<std::size_t>(nn - 1)] / std::sqrt(ssq_m);
        const double an = c1 + rsn * (-2.706056 * std::pow(rsn, 4) + 4.434685 * std::pow(rsn, 3) -
                                      2.071190 * rsn * rsn - 0.147981 * rsn + 0.221157);
        const double phi = (ssq_m - 2 * m[static_cast<std::size_t>(nn - 1)] *
                                        m[static_cast<std::size_t>(nn - 1)]) /
                           (1 - 2 * an * an);
        for (int i = 1; i < nn - 1; ++i)
            a[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] / std::sqrt(phi);
        a[static_cast<std::size_t>(nn - 1)] = an;
        a[0] = -an;
    } else {
        const double u = rsn;
        const double cn = m[static_cast<std::size_t>(nn - 1)] / std::sqrt(ssq_m);
        const double cn1 = m[static_cast<std::size_t>(nn - 2)] / std::sqrt(ssq_m);
        const double an = -2.706056 * std::pow(u, 5) + 4.434685 * std::pow(u, 4) -
                          2.071190 * std::pow(u, 3) - 0.147981 * u * u + 0.221157 * u + cn;
        const double an1 = -3.582633 * std::pow(u, 5) + 5.682633 * std::pow(u, 4) -
                           1.752461 * std::pow(u, 3) - 0.293762 * u * u + 0.042981 * u + cn1;
        const double phi =
            (ssq_m - 2 * m[static_cast<std::size_t>(nn - 1)] * m[static_cast<std::size_t>(nn - 1)] -
             2 * m[static_cast<std::size_t>(nn - 2)] * m[static_cast<std::size_t>(nn - 2)]) /
            (1 - 2 * an * an - 2 * an1 * an1);
        for (int i = 2; i < nn - 2; ++i)
            a[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] / std::sqrt(phi);
        a[static_cast<std::size_t>(nn - 1)] = an;
        a[static_cast<std::size_t>(nn - 2)] = an1;
        a[0] = -an;
        a[1] = -an1;
    }

    double mean = 0;
    for (double v : x) mean += v;
    mean /= nn;
    double num = 0, den = 0;
    for (int i = 0; i < nn; ++i) {
        num += a[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        den += (x[static_cast<std::size_t>(i)] - mean) * (x[static_cast<std::size_t>(i)] - mean);
    }
    const double w = num * num / den;

    ShapiroWilk out;
    out.w = w;
    const double lw = std::log(std::max(1e-300, 1.0 - w));
    if (nn <= 11) {
        const double nd = nn;
        const double g = -2.273 + 0.459 * nd;
        const double mu = 0.5440 - 0.39978 * nd + 0.025054 * nd * nd - 0.0006714 * nd * nd * nd;
        const double sigma =
            std::exp(1.3822 - 0.77857 * nd + 0.062767 * nd * nd - 0.0020322 * nd * nd * nd);
        const double z = (-std::log(g - lw) - mu) / sigma;
        out.p_value = 1.0 - stats_detail::norm_cdf(z);
    } else {
        const double ln = std::log(static_cast<double>(nn));
        const double mu = 0.0038915 * ln * ln * ln - 0.083751 * ln * ln - 0.31082 * ln - 1.5861;
        const double sigma = std::exp(0.0030302 * ln * ln - 0.082676 * ln - 0.4803);
        const double z = (lw - mu) / sigma;
        out.p_value = 1.0 - stats_detail::norm_cdf(z);
    }
    out.p_value = std::clamp(out.p_value, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// One-sample tests
// ---------------------------------------------------------------------------

enum class Alternative { TwoSided, Greater };

struct TestResult {
    std::string method;
    double statistic = 0;
    double p_value = 1;
    double ci_lo = 0;
    double ci_hi = 0;
    bool significant = false;
    double estimate = 0;
};

inline TestResult t_test_one_sample(const std::vector<double>& x, double mu0 = 0,
                                    double alpha = 0.05) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw InsufficientSamples("t test needs at least 2 observations");
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double se = std::sqrt(var / n);

    TestResult r;
    r.method = "t";
    r.estimate = mean;
    boost::math::students_t_distribution<> dist(n - 1);
    if (se == 0) {
        r.statistic = 0;
        r.p_value = mean == mu0 ? 1.0 : 0.0;
        r.ci_lo = r.ci_hi = mean;
    } else {
        r.statistic = (mean - mu0) / se;
        r.p_value = 2.0 * boost::math::cdf(dist, -std::abs(r.statistic));
        const double tc = boost::math::quantile(dist, 1.0 - alpha / 2.0);
        r.ci_lo = mean - tc * se;
        r.ci_hi = mean + tc * se;
    }
    r.significant = r.p_value < alpha;
    return r;
}

// signed-rank test against mu0 with a normal approximation (midranks, tie
// correction); the interval is read off the sample's empirical quantiles
inline TestResult wilcoxon_signed_rank(const std::vector<double>& x, double mu0 = 0,
                                       double alpha = 0.05,
                                       Alternative alt = Alternative::TwoSided) {
    std::vector<double> d;
    for (double v : x)
        if (v != mu0) d.push_back(v - mu0);
    TestResult r;
    r.method = "wilcoxon";
    const int n = static_cast<int>(d.size());
    if (n == 0) {
        r.p_value = 1.0;
        r.ci_lo = r.ci_hi = mu0;
        return r;
    }

    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
    std::vector<double> rank(d.size());
    double tie_term = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(d[order[j + 1]]) == std::abs(d[order[i]]))
            ++j;
        const double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double w_plus = 0;
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d[k] > 0) w_plus += rank[k];
    const double nd = n;
    const double mean_w = nd * (nd + 1.0) / 4.0;
    const double var_w = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = var_w > 0 ? (w_plus - mean_w) / std::sqrt(var_w) : 0.0;

    r.statistic = w_plus;
    if (alt == Alternative::TwoSided)
        r.p_value = 2.0 * (1.0 - stats_detail::norm_cdf(std::abs(z)));
    else
        r.p_value = 1.0 - stats_detail::norm_cdf(z);
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);

    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    r.estimate = stats_detail::quantile_sorted(sorted, 0.5);
    r.ci_lo = stats_detail::quantile_sorted(sorted, alpha / 2.0);
    r.ci_hi = stats_detail::quantile_sorted(sorted, 1.0 - alpha / 2.0);
    r.significant = r.p_value < alpha;
    return r;
}

// ---------------------------------------------------------------------------
// Coefficient significance from a bootstrap sample
// ---------------------------------------------------------------------------

// normality screen picks between the parametric and rank-based paths
inline TestResult test_coefficient(const std::vector<double>& samples, double alpha = 0.05) {
    if (samples.size() < 100)
        throw InsufficientSamples("coefficient test needs at least 100 bootstrap samples, got " +
                                  std::to_string(samples.size()));
    const auto sw = shapiro_wilk(samples);
    if (sw.p_value >= 0.05) return t_test_one_sample(samples, 0, alpha);
    return wilcoxon_signed_rank(samples, 0, alpha);
}

// ---------------------------------------------------------------------------
// Beta fitting and the probability-difference test
// ---------------------------------------------------------------------------

struct BetaFit {
    double alpha = 0;
    double beta = 0;
    bool ok = false;
};

inline BetaFit fit_beta_moments(const std::vector<double>& x) {
    BetaFit f;
    if (x.size() < 2) return f;
    double mean = 0;
    for (double v : x) {
        if (v < 0 || v > 1) return f;
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    if (var <= 0 || mean <= 0 || mean >= 1) return f;
    const double common = mean * (1.0 - mean) / var - 1.0;
    if (common <= 0) return f;
    f.alpha = mean * common;
    f.beta = (1.0 - mean) * common;
    f.ok = f.alpha > 0 && f.beta > 0;
    return f;
}

// one-sample Kolmogorov-Smirnov against a fitted beta distribution
inline double ks_test_beta(std::vector<double> x, const BetaFit& fit) {
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    boost::math::beta_distribution<> dist(fit.alpha, fit.beta);
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = boost::math::cdf(dist, std::clamp(x[i], 0.0, 1.0));
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    // asymptotic Kolmogorov tail with the small-sample correction
    const double en = std::sqrt(n);
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-10) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

struct ProbabilityDifferenceTest {
    std::string method;      // "beta-difference" or "wilcoxon"
    double p_value = 1;
    double ci_lo = 0;        // CI of the a-minus-b difference
    double ci_hi = 0;
    double estimate = 0;     // mean difference
    bool significant = false;
    BetaFit fit_a, fit_b;
};

// Compares two bootstrap samples of cell probabilities. When both samples are
// adequately beta-distributed (KS screen), the difference distribution is
// estimated by fixed-seed Monte Carlo from the fitted betas; otherwise the
// paired signed-rank test is used. MC precision is about 1e-4 at 1e6 draws.
inline ProbabilityDifferenceTest test_probability_difference(
    const std::vector<double>& a, const std::vector<double>& b,
    Alternative alt = Alternative::TwoSided, double alpha = 0.05, int mc_draws = 1000000,
    std::uint64_t mc_seed = 0x9e3779b97f4a7c15ULL) {
    if (a.size() != b.size())
        throw LengthMismatch("paired samples differ in length: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
    if (a.size() < 2) throw InsufficientSamples("need at least 2 paired samples");

    ProbabilityDifferenceTest out;
    out.fit_a = fit_beta_moments(a);
    out.fit_b = fit_beta_moments(b);

    bool beta_ok = out.fit_a.ok && out.fit_b.ok;
    if (beta_ok) {
        beta_ok = ks_test_beta(a, out.fit_a) >= 0.05 && ks_test_beta(b, out.fit_b) >= 0.05;
    }

    if (beta_ok) {
        out.method = "beta-difference";
        auto rng = Rng::derived(mc_seed, "betadiff");
        std::vector<double> diffs(static_cast<std::size_t>(mc_draws));
        int n_pos = 0;
        double mean_d = 0;
        for (int i = 0; i < mc_draws; ++i) {
            const double xa = rng.beta(out.fit_a.alpha, out.fit_a.beta);
            const double xb = rng.beta(out.fit_b.alpha, out.fit_b.beta);
            const double d = xa - xb;
            diffs[static_cast<std::size_t>(i)] = d;
            if (d > 0) ++n_pos;
            mean_d += d;
        }
        mean_d /= mc_draws;
        const double p_gt = static_cast<double>(n_pos) / mc_draws;
        if (alt == Alternative::TwoSided)
            out.p_value = std::clamp(2.0 * std::min(p_gt, 1.0 - p_gt), 0.0, 1.0);
        else
            out.p_value = 1.0 - p_gt;  // H1: a > b
        std::sort(diffs.begin(), diffs.end());
        out.ci_lo = stats_detail::quantile_sorted(diffs, alpha / 2.0);
        out.ci_hi = stats_detail::quantile_sorted(diffs, 1.0 - alpha / 2.0);
        out.estimate = mean_d;
    } else {
        out.method = "wilcoxon";
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        const auto w = wilcoxon_signed_rank(d, 0, alpha, alt);
        out.p_value = w.p_value;
        out.ci_lo = w.ci_lo;
        out.ci_hi = w.ci_hi;
        out.estimate = w.estimate;
    }
    out.significant = out.p_value < alpha;
    return out;
}

// ---------------------------------------------------------------------------
// Model-implied cell probability
// ---------------------------------------------------------------------------

inline double cell_probability(const LogisticFit& fit, const DesignMatrix& dm, ChartType v,
                               TaskType t, const std::string& llm, bool vis_present) {
    try {
        return predict_proba(fit, dm.encode(v, t, llm, vis_present));
    } catch (const UnknownDimensionValue& e) {
        throw UntestedCell(e.what());
    }
}

}  // namespace vlbench
