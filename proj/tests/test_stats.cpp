#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "vlbench/qbank.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/stats/bootstrap.hpp"
#include "vlbench/stats/design.hpp"
#include "vlbench/stats/logistic.hpp"
#include "vlbench/stats/tests.hpp"
#include "vlbench/stats/tune.hpp"

using namespace vlbench;

namespace {

std::vector<ScoreRecord> synth_scores(int reps, const std::vector<std::string>& llms,
                                      std::uint64_t seed = 42) {
    Rng rng(seed);
    std::vector<ScoreRecord> out;
    for (const auto& t : question_templates()) {
        for (const auto& l : llms) {
            for (bool vis : {true, false}) {
                for (int r = 0; r < reps; ++r) {
                    ScoreRecord s;
                    s.template_id = t.id;
                    s.chart_type = t.chart;
                    s.task_type = t.task;
                    s.condition = {vis, true, ContextMode::Contextualized, l};
                    s.correct = rng.uniform() < (vis ? 0.7 : 0.4);
                    out.push_back(s);
                }
            }
        }
    }
    return out;
}

// two informative binary features with opposite effects on the outcome
SparseDataset informative_dataset(int n, std::uint64_t seed, int n_noise = 0) {
    SparseDataset d;
    d.n_columns = 2 + n_noise;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        std::vector<int> row;
        const bool first = i % 2 == 0;
        row.push_back(first ? 0 : 1);
        for (int j = 0; j < n_noise; ++j)
            if (rng.uniform() < 0.5) row.push_back(2 + j);
        const double p = first ? stats_detail::sigmoid(1.5) : stats_detail::sigmoid(-1.5);
        d.rows.push_back(row);
        d.y.push_back(rng.uniform() < p ? 1 : 0);
    }
    return d;
}

}  // namespace

TEST_CASE("design matrix column layout") {
    DesignMatrix dm({"m1", "m2"});
    CHECK(dm.n_columns() == 629);
    CHECK(dm.n_one_way() == 24);
    CHECK(dm.n_two_way() == 133);
    CHECK(dm.n_three_way() == 276);
    CHECK(dm.n_four_way() == 196);
    CHECK(dm.column_names().size() == 629);
    CHECK(dm.column_names()[0].rfind("V:", 0) == 0);

    std::set<std::string> uniq(dm.column_names().begin(), dm.column_names().end());
    CHECK(uniq.size() == 629);

    CHECK_THROWS_AS(DesignMatrix({"only-one"}), ConfigInvalid);
}

TEST_CASE("design matrix encodes 15 active columns per observation") {
    DesignMatrix dm({"m1", "m2"});
    const auto& ts = question_templates();
    for (const auto& t : ts) {
        const auto idx = dm.encode(t.chart, t.task, "m1", true);
        CHECK(idx.size() == 15);
        std::set<int> uniq(idx.begin(), idx.end());
        CHECK(uniq.size() == 15);
        for (int j : idx) {
            CHECK(j >= 0);
            CHECK(j < 629);
        }
    }
    CHECK_THROWS_AS(dm.encode(ts[0].chart, ts[0].task, "nope", true), UnknownDimensionValue);

    // a chart/task pair the bank never asks about has no columns
    const auto tested = tested_chart_task_pairs();
    bool threw = false;
    for (ChartType v : kAllChartTypes) {
        for (TaskType t : kAllTaskTypes) {
            if (tested.count({v, t})) continue;
            CHECK_THROWS_AS(dm.encode(v, t, "m1", true), UnknownDimensionValue);
            threw = true;
            break;
        }
        if (threw) break;
    }
    CHECK(threw);

    DesignMatrix vis_only({"m1", "m2"}, false);
    CHECK_THROWS_AS(vis_only.encode(ts[0].chart, ts[0].task, "m1", false),
                    UnknownDimensionValue);
}

TEST_CASE("dataset rows mirror the score records") {
    const auto scores = synth_scores(2, {"m1", "m2"});
    DesignMatrix dm({"m1", "m2"});
    const auto d = build_dataset(dm, scores);
    REQUIRE(d.rows.size() == scores.size());
    CHECK(d.n_columns == 629);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(d.rows[i].size() == 15);
        CHECK(d.y[i] == (scores[i].correct ? 1 : 0));
    }
}

TEST_CASE("hyperparameter grid composition") {
    const auto grid = hyperparameter_grid();
    REQUIRE(grid.size() == 117);
    int l1 = 0, l2 = 0, none = 0, en = 0;
    for (const auto& g : grid) {
        switch (g.penalty) {
            case Penalty::L1: ++l1; CHECK(g.solver == "liblinear"); break;
            case Penalty::L2: ++l2; break;
            case Penalty::None: ++none; break;
            case Penalty::ElasticNet: ++en; CHECK(g.solver == "saga"); break;
        }
    }
    CHECK(l1 == 7);
    CHECK(l2 == 35);
    CHECK(none == 5);
    CHECK(en == 70);
}

TEST_CASE("classification metrics") {
    const std::vector<int> y = {1, 0, 1, 0};
    CHECK(metric_auroc({0.9, 0.1, 0.8, 0.2}, y) == 1.0);
    CHECK(metric_auroc({0.1, 0.9, 0.2, 0.8}, y) == 0.0);
    CHECK(metric_auroc({0.5, 0.5, 0.5, 0.5}, y) == 0.5);
    CHECK(metric_accuracy({0.9, 0.1, 0.8, 0.2}, y) == 1.0);
    CHECK(metric_f1({0.9, 0.1, 0.8, 0.2}, y) == 1.0);
    CHECK(metric_f1({0.1, 0.2, 0.3, 0.4}, y) == 0.0);
    // average precision by hand: hits at ranks 1 and 3
    CHECK(metric_auprc({0.9, 0.8, 0.7, 0.6}, y) ==
          Catch::Approx(0.5 * (1.0 + 2.0 / 3.0)));
}

TEST_CASE("logistic regression recovers coefficient signs") {
    const auto d = informative_dataset(4000, 11);
    const auto fit = fit_logistic(d, {Penalty::None});
    REQUIRE(fit.converged);
    CHECK(fit.coef[0] > 0.5);
    CHECK(fit.coef[1] < -0.5);
    CHECK(predict_proba(fit, {0}) > 0.7);
    CHECK(predict_proba(fit, {1}) < 0.3);
}

TEST_CASE("weak l2 matches the unpenalized fit") {
    const auto d = informative_dataset(2000, 12);
    const auto none = fit_logistic(d, {Penalty::None});
    LogisticConfig l2;
    l2.penalty = Penalty::L2;
    l2.C = 1e6;
    const auto ridge = fit_logistic(d, l2);
    REQUIRE(none.converged);
    REQUIRE(ridge.converged);
    CHECK(std::abs(none.intercept - ridge.intercept) < 0.05);
    for (std::size_t j = 0; j < none.coef.size(); ++j)
        CHECK(std::abs(none.coef[j] - ridge.coef[j]) < 0.05);
}

TEST_CASE("strong l1 drives every coefficient to zero") {
    const auto d = informative_dataset(2000, 13, 8);
    LogisticConfig l1;
    l1.penalty = Penalty::L1;
    l1.C = 0.0005;  // penalty weight above the loss gradient bound
    const auto fit = fit_logistic(d, l1);
    for (double c : fit.coef) CHECK(c == 0.0);
    CHECK_THROWS_AS(fit_logistic(SparseDataset{}, {}), ConfigInvalid);
}

TEST_CASE("cross-validation sweep replays and counts fold scores") {
    const auto d = informative_dataset(120, 14);
    std::vector<GridCombo> grid = {{Penalty::None, "lbfgs", 1.0, 0},
                                   {Penalty::L2, "lbfgs", 1.0, 0}};
    const auto r = tune_hyperparameters(d, 2, 3, 99, grid);
    REQUIRE(r.combos.size() == 2);
    CHECK(r.total_cv_scores == 2 * 2 * 3);
    for (const auto& c : r.combos) CHECK(c.folds.size() == 6);
    REQUIRE(r.best_index >= 0);

    const auto r2 = tune_hyperparameters(d, 2, 3, 99, grid);
    CHECK(r2.best_index == r.best_index);
    CHECK(r2.combos[0].mean_auprc == r.combos[0].mean_auprc);

    CHECK_THROWS_AS(tune_hyperparameters(d, 1, 3, 0, {}), EmptyGrid);
    CHECK_THROWS_AS(tune_hyperparameters(informative_dataset(2, 1), 1, 3, 0, grid),
                    ConfigInvalid);
}

TEST_CASE("shapiro-wilk matches the reference implementation") {
    const std::vector<double> x20 = {2.1, -0.4, 1.3,  0.8, -1.7, 0.2, 2.9,  -0.6, 1.1, 0.4,
                                     -0.9, 1.8, 0.0, -1.2, 0.7,  2.4, -0.3, 1.5,  0.9, -2.0};
    const auto n = shapiro_wilk(x20);
    CHECK(n.w == Catch::Approx(0.987096).margin(1e-4));
    CHECK(n.p_value == Catch::Approx(0.99158).margin(2e-3));

    const std::vector<double> xe = {0.05, 0.11, 0.23, 0.34, 0.47, 0.61, 0.83, 1.02,
                                    1.33, 1.71, 2.12, 2.79, 3.5,  4.4,  6.1};
    const auto e = shapiro_wilk(xe);
    CHECK(e.w == Catch::Approx(0.849087).margin(1e-4));
    CHECK(e.p_value == Catch::Approx(0.016857).margin(2e-3));

    CHECK_THROWS_AS(shapiro_wilk({1.0, 2.0}), InsufficientSamples);
    CHECK(shapiro_wilk({3.0, 3.0, 3.0, 3.0}).p_value == 1.0);
}

TEST_CASE("one-sample t test matches the reference implementation") {
    const auto a = t_test_one_sample({1, 2, 3, 4, 5}, 0);
    CHECK(a.statistic == Catch::Approx(4.242641).margin(1e-5));
    CHECK(a.p_value == Catch::Approx(0.013236).margin(1e-5));
    CHECK(a.significant);
    CHECK(a.estimate == Catch::Approx(3.0));
    CHECK(a.ci_lo < 3.0);
    CHECK(a.ci_hi > 3.0);

    const auto b = t_test_one_sample({1.2, 0.8, 1.1, 1.4, 0.9, 1.3, 0.7, 1.0}, 1.0);
    CHECK(b.statistic == Catch::Approx(0.57735).margin(1e-5));
    CHECK(b.p_value == Catch::Approx(0.581788).margin(1e-5));
    CHECK(!b.significant);

    CHECK_THROWS_AS(t_test_one_sample({1.0}), InsufficientSamples);
}

TEST_CASE("signed-rank test matches the reference implementation") {
    const std::vector<double> x = {1.5, 2.2, 0.8, 3.1, 1.9, 2.7, 0.4, 1.1, 2.0, 1.6};
    const auto r = wilcoxon_signed_rank(x, 0);
    CHECK(r.statistic == 55.0);  // every difference is positive
    CHECK(r.p_value == Catch::Approx(0.005062).margin(1e-4));
    CHECK(r.significant);

    const auto none = wilcoxon_signed_rank({2.0, 2.0, 2.0}, 2.0);
    CHECK(none.p_value == 1.0);
}

TEST_CASE("coefficient test screens for normality first") {
    Rng rng(21);
    std::vector<double> normal, skewed;
    for (int i = 0; i < 150; ++i) {
        normal.push_back(rng.normal(0.5, 1.0));
        skewed.push_back(-std::log(1.0 - rng.uniform()) * 0.3 + 0.01);
    }
    CHECK(test_coefficient(normal).method == "t");
    CHECK(test_coefficient(skewed).method == "wilcoxon");
    CHECK_THROWS_AS(test_coefficient(std::vector<double>(99, 0.1)), InsufficientSamples);
}

TEST_CASE("beta moment fitting recovers the parameters") {
    Rng rng(31);
    std::vector<double> x;
    for (int i = 0; i < 5000; ++i) x.push_back(rng.beta(2.0, 5.0));
    const auto f = fit_beta_moments(x);
    REQUIRE(f.ok);
    CHECK(f.alpha == Catch::Approx(2.0).margin(0.3));
    CHECK(f.beta == Catch::Approx(5.0).margin(0.7));
    CHECK(ks_test_beta(x, f) >= 0.05);

    CHECK(!fit_beta_moments({0.5}).ok);
    CHECK(!fit_beta_moments({-0.1, 0.5, 0.7}).ok);

    // a tight two-point mixture is nothing like its moment-matched beta
    std::vector<double> bimodal;
    for (int i = 0; i < 200; ++i)
        bimodal.push_back((i % 2 ? 0.3 : 0.7) + rng.uniform() * 0.002);
    const auto bf = fit_beta_moments(bimodal);
    REQUIRE(bf.ok);
    CHECK(ks_test_beta(bimodal, bf) < 0.05);
}

TEST_CASE("probability difference test separates distinct beta samples") {
    Rng rng(41);
    std::vector<double> hi, lo;
    for (int i = 0; i < 200; ++i) {
        hi.push_back(rng.beta(90, 10));
        lo.push_back(rng.beta(10, 90));
    }
    const auto r = test_probability_difference(hi, lo, Alternative::Greater, 0.05, 50000, 7);
    CHECK(r.significant);
    CHECK(r.p_value < 0.01);
    CHECK(r.estimate == Catch::Approx(0.8).margin(0.05));
    CHECK(r.ci_lo > 0.5);
    CHECK(r.ci_hi < 1.0);

    const auto same = test_probability_difference(hi, hi, Alternative::TwoSided, 0.05, 50000, 7);
    CHECK(!same.significant);

    CHECK_THROWS_AS(test_probability_difference(hi, {0.5, 0.6}), LengthMismatch);
    CHECK_THROWS_AS(test_probability_difference({0.5}, {0.6}), InsufficientSamples);
}

TEST_CASE("model-implied cell probabilities reject untested cells") {
    DesignMatrix dm({"m1", "m2"});
    const auto scores = synth_scores(3, {"m1", "m2"});
    const auto d = build_dataset(dm, scores);
    LogisticConfig cfg;
    cfg.penalty = Penalty::L2;
    cfg.C = 1.0;
    const auto fit = fit_logistic(d, cfg);
    REQUIRE(fit.converged);

    const auto& t0 = question_templates()[0];
    const double p = cell_probability(fit, dm, t0.chart, t0.task, "m1", true);
    CHECK(p > 0.0);
    CHECK(p < 1.0);

    const auto tested = tested_chart_task_pairs();
    for (ChartType v : kAllChartTypes) {
        bool done = false;
        for (TaskType t : kAllTaskTypes) {
            if (tested.count({v, t})) continue;
            CHECK_THROWS_AS(cell_probability(fit, dm, v, t, "m1", true), UntestedCell);
            done = true;
            break;
        }
        if (done) break;
    }
}

TEST_CASE("bootstrap refits produce full coefficient and cell samples") {
    DesignMatrix dm({"m1", "m2"});
    const auto scores = synth_scores(4, {"m1", "m2"});
    const auto d = build_dataset(dm, scores);
    LogisticConfig cfg;
    cfg.penalty = Penalty::L2;
    cfg.C = 1.0;
    const auto b = bootstrap_fit(dm, d, 5, 77, cfg);
    REQUIRE(b.coefficients.size() == 5);
    for (const auto& row : b.coefficients) CHECK(row.size() == 630u);
    REQUIRE(b.cell_probabilities.size() == 5);
    for (const auto& row : b.cell_probabilities) CHECK(row.size() == 196u);
    REQUIRE(b.cell_names.size() == 196);
    for (const auto& name : b.cell_names)
        CHECK(std::count(name.begin(), name.end(), '|') == 3);
    CHECK((b.cell_names[0].find("|vis") != std::string::npos ||
           b.cell_names[0].find("|novis") != std::string::npos));

    CHECK(coefficient_samples(b, 0).size() == 5);
    CHECK(cell_samples(b, 195).size() == 5);

    // the resampling is seed-deterministic
    const auto again = bootstrap_fit(dm, d, 5, 77, cfg);
    CHECK(again.coefficients == b.coefficients);
    CHECK(again.cell_probabilities == b.cell_probabilities);
}
