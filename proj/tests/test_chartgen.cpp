#include <catch2/catch_amalgamated.hpp>

#include "vlbench/chartgen.hpp"

using namespace vlbench;

TEST_CASE("generation is deterministic for every chart type") {
    for (ChartType t : kAllChartTypes) {
        const auto a = generate_chart(t, 77);
        const auto b = generate_chart(t, 77);
        CHECK(a.payload() == b.payload());
        const auto c = generate_chart(t, 78);
        CHECK(a.payload() != c.payload());
    }
}

TEST_CASE("line chart invariants") {
    for (std::uint64_t seed : {1, 2, 3, 10, 500}) {
        const auto c = generate_chart(ChartType::Line, seed);
        REQUIRE(c.categories.size() == 12);
        REQUIRE(c.series.size() == 1);
        const auto& v = c.series[0].values;
        for (double x : v) {
            CHECK(x >= c.axis.y_min);
            CHECK(x <= c.axis.y_max);
        }
        // June -> September rise stays clean for the comparison item
        CHECK(v[8] - v[5] >= 4.0);
        // the shaped trend matches what the classifier reads off the data
        const std::vector<double> half(v.begin() + 6, v.end());
        CHECK(to_string(classify_trend(half, 0.8)) == c.shaping.at("trend_second_half"));
        CHECK(c.categories[detail::argmin(v)] == c.shaping.at("min_month"));
    }
}

TEST_CASE("bar chart invariants") {
    for (std::uint64_t seed : {4, 5, 6, 99}) {
        const auto c = generate_chart(ChartType::Bar, seed);
        const auto& v = c.series[0].values;
        REQUIRE(v.size() == c.categories.size());
        CHECK(detail::unique_max_ok(v, 0.10));
        // slower-than-South-Korea count is unambiguous and mid-range
        const double sk = c.value_at(c.series[0].name, "South Korea");
        int slower = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (c.categories[i] == "South Korea") continue;
            CHECK(std::abs(v[i] - sk) >= 1.0);
            if (v[i] < sk) ++slower;
        }
        CHECK(slower >= 2);
        CHECK(slower <= static_cast<int>(v.size()) - 3);
    }
}

TEST_CASE("stacked bar 100 shares sum to 100") {
    const auto c = generate_chart(ChartType::StackedBar100, 11);
    REQUIRE(c.series.size() == 3);
    for (std::size_t i = 0; i < c.categories.size(); ++i) {
        double sum = 0;
        for (const auto& s : c.series) {
            CHECK(s.values[i] >= 10);
            sum += s.values[i];
        }
        CHECK(sum == 100.0);
    }
}

TEST_CASE("pie shares sum to 100") {
    const auto c = generate_chart(ChartType::Pie, 12);
    double sum = 0;
    for (double v : c.series[0].values) {
        CHECK(v >= 5);
        sum += v;
    }
    CHECK(sum == 100.0);
}

TEST_CASE("scatterplot invariants") {
    for (std::uint64_t seed : {21, 22}) {
        const auto c = generate_chart(ChartType::Scatterplot, seed);
        CHECK(c.points.size() == 85);
        int at_1651 = 0, at_188 = 0;
        for (const auto& p : c.points) {
            if (std::abs(p.x - 165.1) < 0.05) ++at_1651;
            if (p.x == 188.0) ++at_188;
        }
        CHECK(at_1651 == 1);
        CHECK(at_188 == 3);
        // least-squares slope sign matches the shaped trend direction
        std::vector<double> xs, ys;
        for (const auto& p : c.points) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        const bool neg = c.shaping.at("negative_trend").get<bool>();
        CHECK((least_squares_slope(xs, ys) < 0) == neg);
    }
}

TEST_CASE("choropleth invariants") {
    const auto c = generate_chart(ChartType::Choropleth, 31);
    REQUIRE(c.categories.size() == 50);
    const auto& v = c.series[0].values;
    int top_band = 0;
    std::size_t az = 0, ok = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (ChoroplethBands::band_of(v[i]) == ChoroplethBands::count - 1) ++top_band;
        if (c.categories[i] == "AZ") az = i;
        if (c.categories[i] == "OK") ok = i;
    }
    CHECK(top_band == 1);  // the extremum must be readable from the color scale
    CHECK(ChoroplethBands::band_of(v[az]) != ChoroplethBands::band_of(v[ok]));
    CHECK(c.shaping.at("az_gt_ok").get<bool>() == (v[az] > v[ok]));
}

TEST_CASE("treemap invariants") {
    const auto c = generate_chart(ChartType::Treemap, 41);
    REQUIRE(c.groups.size() == 3);
    std::string amazon_group;
    for (const auto& g : c.groups) {
        CHECK(g.items.size() >= 2);
        for (const auto& [label, value] : g.items) {
            CHECK(value > 0);
            if (label == "Amazon") amazon_group = g.category;
        }
    }
    CHECK(amazon_group == c.shaping.at("amazon_category").get<std::string>());
}

TEST_CASE("incompatible constraints are rejected up front") {
    GenerationConstraints gc;
    gc.cluster = GenerationConstraints::ClusterSpec{176, 70, 3, 10};
    CHECK_THROWS_AS(generate_chart(ChartType::Line, 1, gc), IncompatibleConstraint);

    GenerationConstraints gt;
    gt.trend[""] = TrendDirection::Increasing;
    CHECK_THROWS_AS(generate_chart(ChartType::Pie, 1, gt), IncompatibleConstraint);

    GenerationConstraints ga;
    ga.anomaly = GenerationConstraints::AnomalySpec{0.5};
    CHECK_THROWS_AS(generate_chart(ChartType::Scatterplot, 1, ga), IncompatibleConstraint);

    GenerationConstraints gm;
    gm.unique_extremum_margin = 0;
    CHECK_THROWS_AS(generate_chart(ChartType::Bar, 1, gm), IncompatibleConstraint);
}

TEST_CASE("trend constraints are honored") {
    GenerationConstraints gc;
    gc.trend[""] = TrendDirection::Decreasing;
    const auto c = generate_chart(ChartType::Line, 9, gc);
    const auto& v = c.series[0].values;
    const std::vector<double> half(v.begin() + 6, v.end());
    CHECK(classify_trend(half, 0.8) == TrendDirection::Decreasing);
}

TEST_CASE("decontextualization replaces every named entity") {
    const auto c = generate_chart(ChartType::Bar, 3);
    const auto d = decontextualize(c);
    CHECK(d.context_mode == ContextMode::Decontextualized);
    CHECK(d.decontext_map.size() == c.entities.size());
    for (const auto& cat : d.categories) {
        for (const auto& orig : domain::kAsiaCountries)
            CHECK(cat.find(orig) == std::string::npos);
        CHECK(cat.rfind("Country ", 0) == 0);
    }
    // idempotent on already-stripped charts
    CHECK(decontextualize(d).payload() == d.payload());
    // raw values survive untouched
    CHECK(d.series[0].values == c.series[0].values);
}

TEST_CASE("identification charts refuse decontextualization") {
    CHECK_THROWS_AS(decontextualize(generate_chart(ChartType::Histogram, 1)),
                    NotDecontextualizable);
    CHECK_THROWS_AS(decontextualize(generate_chart(ChartType::Scatterplot, 1)),
                    NotDecontextualizable);
    CHECK_THROWS_AS(decontextualize(generate_chart(ChartType::Choropleth, 1)),
                    NotDecontextualizable);
}

TEST_CASE("accepted regeneration bumps the seed until the predicate passes") {
    int calls = 0;
    const auto c = generate_chart_accepted(ChartType::Bar, 50, {}, [&](const ChartInstance&) {
        return ++calls >= 3;
    });
    CHECK(calls == 3);
    CHECK(c.seed == 52);
    CHECK_THROWS_AS(
        generate_chart_accepted(ChartType::Bar, 50, {}, [](const ChartInstance&) { return false; }, 5),
        ConstraintUnsatisfiable);
}

TEST_CASE("chart json round-trips") {
    for (ChartType t : {ChartType::Line, ChartType::Bubble, ChartType::Treemap,
                        ChartType::Choropleth}) {
        const auto c = generate_chart(t, 13);
        const auto back = ChartInstance::from_json(c.to_json());
        CHECK(back.payload() == c.payload());
    }
}
