#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vlbench/common.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/stats/logistic.hpp"

namespace vlbench {

struct GridCombo {
    Penalty penalty = Penalty::None;
    std::string solver;
    double C = 1.0;       // unused for penalty none
    double l1_ratio = 0;  // elastic net only
};

// C sweep and elastic-net mixing sweep for the tuning grid
inline std::vector<double> grid_c_values() {
    return {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
}

inline std::vector<double> grid_l1_ratios() {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(i / 9.0);
    return v;
}

// 117 combinations: l1 on its one compatible solver (7 C values), l2 and
// no-penalty on five solvers, elastic net on saga across C and mix values.
// The solver is recorded for bookkeeping; all fits share one optimizer.
inline std::vector<GridCombo> hyperparameter_grid() {
    const std::vector<std::string> all_solvers = {"newton-cg", "lbfgs", "liblinear", "sag", "saga"};
    std::vector<GridCombo> grid;
    for (double c : grid_c_values()) grid.push_back({Penalty::L1, "liblinear", c, 0});
    for (const auto& s : all_solvers)
        for (double c : grid_c_values()) grid.push_back({Penalty::L2, s, c, 0});
    for (const auto& s : all_solvers) grid.push_back({Penalty::None, s, 1.0, 0});
    for (double c : grid_c_values())
        for (double r : grid_l1_ratios()) grid.push_back({Penalty::ElasticNet, "saga", c, r});
    return grid;
}

// ---------------------------------------------------------------------------
// Classification metrics on predicted probabilities
// ---------------------------------------------------------------------------

namespace stats_detail {

struct RankedPair {
    double score;
    int label;
};

inline std::vector<RankedPair> ranked(const std::vector<double>& prob, const std::vector<int>& y) {
    std::vector<RankedPair> v(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i) v[i] = {prob[i], y[i]};
    std::stable_sort(v.begin(), v.end(),
                     [](const RankedPair& a, const RankedPair& b) { return a.score > b.score; });
    return v;
}

}  // namespace stats_detail

inline double metric_accuracy(const std::vector<double>& prob, const std::vector<int>& y) {
    int ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) ok += (prob[i] >= 0.5 ? 1 : 0) == y[i];
    return y.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(y.size());
}

inline double metric_f1(const std::vector<double>& prob, const std::vector<int>& y) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int pred = prob[i] >= 0.5 ? 1 : 0;
        if (pred && y[i]) ++tp;
        else if (pred && !y[i]) ++fp;
        else if (!pred && y[i]) ++fn;
    }
    return (2 * tp + fp + fn) == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
}

// Mann-Whitney formulation with midrank tie handling
inline double metric_auroc(const std::vector<double>& prob, const std::vector<int>& y) {
    const auto v = stats_detail::ranked(prob, y);
    const std::size_t n = v.size();
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1].score == v[i].score) ++j;
        const double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[k] = mid;
        i = j + 1;
    }
    double sum_pos = 0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (v[k].label) {
            sum_pos += rank[k];
            ++n_pos;
        }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return 0.5;
    // descending sort means ranks count from the top; invert to the usual U
    const double u = sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    return 1.0 - u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// average precision: step-wise area under the precision-recall curve
inline double metric_auprc(const std::vector<double>& prob, const std::vector<int>& y) {
    const auto v = stats_detail::ranked(prob, y);
    std::size_t n_pos = 0;
    for (const auto& e : v) n_pos += static_cast<std::size_t>(e.label);
    if (n_pos == 0) return 0.0;
    double ap = 0;
    std::size_t tp = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        std::size_t tied_pos = static_cast<std::size_t>(v[i].label);
        while (j + 1 < v.size() && v[j + 1].score == v[i].score) {
            ++j;
            tied_pos += static_cast<std::size_t>(v[j].label);
        }
        tp += tied_pos;
        const double precision = static_cast<double>(tp) / static_cast<double>(j + 1);
        ap += precision * (static_cast<double>(tied_pos) / static_cast<double>(n_pos));
        i = j + 1;
    }
    return ap;
}

struct FoldMetrics {
    double accuracy = 0;
    double f1 = 0;
    double auroc = 0;
    double auprc = 0;  // average precision
};

struct ComboResult {
    GridCombo combo;
    std::vector<FoldMetrics> folds;  // reps * k entries
    double mean_auprc = 0;
    double mean_accuracy = 0;
    double mean_auroc = 0;
    double mean_f1 = 0;
    int n_nonconverged = 0;
};

struct TuneResult {
    std::vector<ComboResult> combos;
    int best_index = -1;
    int total_cv_scores = 0;
};

namespace stats_detail {

inline int penalty_preference(Penalty p) {
    // tie-break order when mean scores are equal: simpler models first
    switch (p) {
        case Penalty::None: return 0;
        case Penalty::L2: return 1;
        case Penalty::L1: return 2;
        case Penalty::ElasticNet: return 3;
    }
    return 3;
}

}  // namespace stats_detail

// Repeated k-fold cross-validation over the full grid. Every fold assignment
// derives from the seed, so the whole sweep replays identically.
inline TuneResult tune_hyperparameters(const SparseDataset& data, int n_reps = 10, int k_folds = 10,
                                       std::uint64_t seed = 0,
                                       std::vector<GridCombo> grid = hyperparameter_grid()) {
    if (grid.empty()) throw EmptyGrid("hyperparameter grid is empty");
    const int n = static_cast<int>(data.rows.size());
    if (n < k_folds) throw ConfigInvalid("fewer observations than folds");

    // precompute fold assignments per repetition
    std::vector<std::vector<int>> fold_of(static_cast<std::size_t>(n_reps),
                                          std::vector<int>(static_cast<std::size_t>(n)));
    for (int r = 0; r < n_reps; ++r) {
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        auto rng = Rng::derived(seed, "tune/rep/" + std::to_string(r));
        rng.shuffle(order);
        for (int i = 0; i < n; ++i)
            fold_of[static_cast<std::size_t>(r)][static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
                i % k_folds;
    }

    TuneResult result;
    result.combos.reserve(grid.size());
    for (const auto& combo : grid) {
        ComboResult cr;
        cr.combo = combo;
        LogisticConfig cfg;
        cfg.penalty = combo.penalty;
        cfg.C = combo.C;
        cfg.l1_ratio = combo.l1_ratio;

        for (int r = 0; r < n_reps; ++r) {
            for (int f = 0; f < k_folds; ++f) {
                SparseDataset train;
                train.n_columns = data.n_columns;
                std::vector<std::vector<int>> test_rows;
                std::vector<int> test_y;
                for (int i = 0; i < n; ++i) {
                    const auto si = static_cast<std::size_t>(i);
                    if (fold_of[static_cast<std::size_t>(r)][si] == f) {
                        test_rows.push_back(data.rows[si]);
                        test_y.push_back(data.y[si]);
                    } else {
                        train.rows.push_back(data.rows[si]);
                        train.y.push_back(data.y[si]);
                    }
                }
                const auto fit = fit_logistic(train, cfg);
                if (!fit.converged) ++cr.n_nonconverged;
                std::vector<double> prob(test_rows.size());
                for (std::size_t i = 0; i < test_rows.size(); ++i)
                    prob[i] = predict_proba(fit, test_rows[i]);
                FoldMetrics m;
                m.accuracy = metric_accuracy(prob, test_y);
                m.f1 = metric_f1(prob, test_y);
                m.auroc = metric_auroc(prob, test_y);
                m.auprc = metric_auprc(prob, test_y);
                cr.folds.push_back(m);
            }
        }
        for (const auto& m : cr.folds) {
            cr.mean_accuracy += m.accuracy;
            cr.mean_f1 += m.f1;
            cr.mean_auroc += m.auroc;
            cr.mean_auprc += m.auprc;
        }
        const double nf = static_cast<double>(cr.folds.size());
        cr.mean_accuracy /= nf;
        cr.mean_f1 /= nf;
        cr.mean_auroc /= nf;
        cr.mean_auprc /= nf;
        result.total_cv_scores += static_cast<int>(cr.folds.size());
        result.combos.push_back(std::move(cr));
    }

    // selection by mean average precision, ties broken toward simpler penalties
    for (std::size_t i = 0; i < result.combos.size(); ++i) {
        if (result.best_index < 0) {
            result.best_index = static_cast<int>(i);
            continue;
        }
        const auto& best = result.combos[static_cast<std::size_t>(result.best_index)];
        const auto& cur = result.combos[i];
        if (cur.mean_auprc > best.mean_auprc ||
            (cur.mean_auprc == best.mean_auprc &&
             stats_detail::penalty_preference(cur.combo.penalty) <
                 stats_detail::penalty_preference(best.combo.penalty)))
            result.best_index = static_cast<int>(i);
    }
    return result;
}

}  // namespace vlbench
