#pragma once

#include <string>
#include <vector>

#include "vlbench/common.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/stats/design.hpp"
#include "vlbench/stats/logistic.hpp"

namespace vlbench {

struct BootstrapResult {
    // per resample: intercept followed by the coefficient vector
    std::vector<std::vector<double>> coefficients;
    // per resample: predicted probability for every (tested pair, model,
    // presence) cell, in the order produced by cell_index below
    std::vector<std::vector<double>> cell_probabilities;
    std::vector<std::string> cell_names;
    int n_redraws = 0;  // non-convergent resamples that were redrawn
};

// full-size resamples with replacement; each resample is refit and both the
// coefficient vector and per-cell probabilities are retained
inline BootstrapResult bootstrap_fit(const DesignMatrix& dm, const SparseDataset& data,
                                     int n_resamples, std::uint64_t seed,
                                     const LogisticConfig& cfg = {}, int max_redraws = 10) {
    const int n = static_cast<int>(data.rows.size());
    if (n == 0) throw ConfigInvalid("bootstrap needs a non-empty dataset");

    // cell grid: tested (V,T) x model x presence
    std::vector<std::vector<int>> cell_active;
    BootstrapResult result;
    for (const auto& [v, t] : dm.tested_pairs()) {
        for (const auto& l : dm.llm_ids()) {
            for (bool p : dm.presence_levels()) {
                cell_active.push_back(dm.encode(v, t, l, p));
                result.cell_names.push_back(vlbench::to_string(v) + "|" +
                                            simplify_task(vlbench::to_string(t)) + "|" + l + "|" +
                                            (p ? "vis" : "novis"));
            }
        }
    }

    result.coefficients.reserve(static_cast<std::size_t>(n_resamples));
    result.cell_probabilities.reserve(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        LogisticFit fit;
        bool ok = false;
        for (int attempt = 0; attempt <= max_redraws; ++attempt) {
            auto rng = Rng::derived(seed, "bootstrap/" + std::to_string(b) + "/" +
                                              std::to_string(attempt));
            SparseDataset sample;
            sample.n_columns = data.n_columns;
            sample.rows.reserve(static_cast<std::size_t>(n));
            sample.y.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const auto pick = static_cast<std::size_t>(rng.uniform_int(n));
                sample.rows.push_back(data.rows[pick]);
                sample.y.push_back(data.y[pick]);
            }
            fit = fit_logistic(sample, cfg);
            if (fit.converged) {
                ok = true;
                break;
            }
            ++result.n_redraws;
        }
        if (!ok)
            throw NonConvergence("bootstrap resample " + std::to_string(b) +
                                 " failed to converge after redraws");
        std::vector<double> row;
        row.reserve(fit.coef.size() + 1);
        row.push_back(fit.intercept);
        row.insert(row.end(), fit.coef.begin(), fit.coef.end());
        result.coefficients.push_back(std::move(row));

        std::vector<double> cells(cell_active.size());
        for (std::size_t c = 0; c < cell_active.size(); ++c)
            cells[c] = predict_proba(fit, cell_active[c]);
        result.cell_probabilities.push_back(std::move(cells));
    }
    return result;
}

// bootstrap sample of one coefficient (0 = intercept, j+1 = column j)
inline std::vector<double> coefficient_samples(const BootstrapResult& r, int index) {
    std::vector<double> out;
    out.reserve(r.coefficients.size());
    for (const auto& row : r.coefficients) out.push_back(row.at(static_cast<std::size_t>(index)));
    return out;
}

inline std::vector<double> cell_samples(const BootstrapResult& r, int cell) {
    std::vector<double> out;
    out.reserve(r.cell_probabilities.size());
    for (const auto& row : r.cell_probabilities)
        out.push_back(row.at(static_cast<std::size_t>(cell)));
    return out;
}

}  // namespace vlbench
