#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlbench/chartgen.hpp"
#include "vlbench/common.hpp"
#include "vlbench/rng.hpp"

namespace vlbench {

// ---------------------------------------------------------------------------
// Question items
// ---------------------------------------------------------------------------

// How an open-ended response is judged against the truth.
enum class AnswerKind { Numeric, Label, Boolean, Trend, RangeBand };

inline std::string to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::Numeric: return "numeric";
        case AnswerKind::Label: return "label";
        case AnswerKind::Boolean: return "boolean";
        case AnswerKind::Trend: return "trend";
        case AnswerKind::RangeBand: return "range-band";
    }
    throw Error("bad AnswerKind");
}

inline AnswerKind answer_kind_from_string(std::string_view s) {
    if (s == "numeric") return AnswerKind::Numeric;
    if (s == "label") return AnswerKind::Label;
    if (s == "boolean") return AnswerKind::Boolean;
    if (s == "trend") return AnswerKind::Trend;
    if (s == "range-band") return AnswerKind::RangeBand;
    throw UnknownDimensionValue("unknown answer kind: " + std::string(s));
}

struct QuestionItem {
    int template_id = 0;
    ChartType chart_type = ChartType::Line;
    TaskType task_type = TaskType::RetrieveValue;
    ContextMode context_mode = ContextMode::Contextualized;
    std::string chart_id;  // "{chart_type}_{seed}_{context_mode}"
    std::string stem;
    std::vector<std::string> options;  // canonical order; rotations applied at run time
    int correct_index = 0;
    AnswerKind kind = AnswerKind::Numeric;
    std::string answer_text;   // canonical open-ended representation
    double answer_value = 0;   // numeric truth (Numeric); band midpoint (RangeBand)
    double answer_lo = 0;      // RangeBand bounds, inclusive
    double answer_hi = 0;
    double tolerance = 0;      // open-ended numeric tolerance

    json to_json() const {
        return {{"template_id", template_id},
                {"chart_type", vlbench::to_string(chart_type)},
                {"task_type", vlbench::to_string(task_type)},
                {"context_mode", vlbench::to_string(context_mode)},
                {"chart_id", chart_id},
                {"stem", stem},
                {"options", options},
                {"correct_index", correct_index},
                {"kind", vlbench::to_string(kind)},
                {"answer_text", answer_text},
                {"answer_value", answer_value},
                {"answer_lo", answer_lo},
                {"answer_hi", answer_hi},
                {"tolerance", tolerance}};
    }

    static QuestionItem from_json(const json& j) {
        QuestionItem q;
        q.template_id = j.at("template_id");
        q.chart_type = chart_type_from_string(j.at("chart_type").get<std::string>());
        q.task_type = task_type_from_string(j.at("task_type").get<std::string>());
        q.context_mode = context_mode_from_string(j.at("context_mode").get<std::string>());
        q.chart_id = j.at("chart_id");
        q.stem = j.at("stem");
        q.options = j.at("options").get<std::vector<std::string>>();
        q.correct_index = j.at("correct_index");
        q.kind = answer_kind_from_string(j.at("kind").get<std::string>());
        q.answer_text = j.at("answer_text");
        q.answer_value = j.at("answer_value");
        q.answer_lo = j.at("answer_lo");
        q.answer_hi = j.at("answer_hi");
        q.tolerance = j.at("tolerance");
        return q;
    }
};

// ---------------------------------------------------------------------------
// Option construction
// ---------------------------------------------------------------------------

namespace qdetail {

// k numeric options on the grid `step` containing the truth, presented in
// ascending order; the truth's slot is randomized. [lo_ok, hi_ok] bounds the
// whole option set.
inline std::vector<double> numeric_option_values(double truth, double step, int k, Rng& rng,
                                                 double lo_ok, double hi_ok, int* truth_idx) {
    if (step <= 0) throw DistractorExhaustion("option step must be positive");
    std::vector<int> slots;
    for (int p = 0; p < k; ++p) {
        const double lowest = truth - p * step;
        const double highest = truth + (k - 1 - p) * step;
        if (lowest >= lo_ok - 1e-9 && highest <= hi_ok + 1e-9) slots.push_back(p);
    }
    if (slots.empty())
        throw DistractorExhaustion("no option layout fits bounds for truth " +
                                   format_number(truth));
    const int p = slots[rng.uniform_int(slots.size())];
    std::vector<double> vals(k);
    for (int i = 0; i < k; ++i) vals[i] = truth + (i - p) * step;
    *truth_idx = p;
    return vals;
}

inline void set_numeric_options(QuestionItem& q, double truth, double step, int k, Rng& rng,
                                double lo_ok, double hi_ok, const std::string& suffix = "") {
    int ti = 0;
    const auto vals = numeric_option_values(truth, step, k, rng, lo_ok, hi_ok, &ti);
    q.options.clear();
    for (double v : vals) q.options.push_back(format_number(v) + suffix);
    q.correct_index = ti;
}

// k-1 distractor labels sampled from the pool; canonical order follows the pool.
inline void set_label_options(QuestionItem& q, const std::string& truth,
                              const std::vector<std::string>& pool, int k, Rng& rng) {
    std::vector<std::string> others;
    for (const auto& s : pool)
        if (s != truth) others.push_back(s);
    if (static_cast<int>(others.size()) < k - 1)
        throw DistractorExhaustion("label pool too small for " + truth);
    rng.shuffle(others);
    others.resize(k - 1);
    std::vector<std::string> opts;
    for (const auto& s : pool)
        if (s == truth || std::find(others.begin(), others.end(), s) != others.end())
            opts.push_back(s);
    q.options = opts;
    q.correct_index = static_cast<int>(
        std::find(opts.begin(), opts.end(), truth) - opts.begin());
}

inline void set_boolean(QuestionItem& q, bool truth) {
    q.kind = AnswerKind::Boolean;
    q.options = {"True", "False"};
    q.correct_index = truth ? 0 : 1;
    q.answer_text = truth ? "True" : "False";
    q.answer_value = truth ? 1 : 0;
}

inline void set_trend(QuestionItem& q, TrendDirection d) {
    q.kind = AnswerKind::Trend;
    q.options = {"Increasing", "Decreasing", "Constant"};
    q.correct_index = d == TrendDirection::Increasing ? 0
                      : d == TrendDirection::Decreasing ? 1 : 2;
    q.answer_text = q.options[q.correct_index];
    q.answer_value = q.correct_index;
}

// chart-local label: the decontextualized alias when the chart was stripped
inline std::string L(const ChartInstance& c, const std::string& orig) {
    if (c.context_mode == ContextMode::Decontextualized) {
        auto it = c.decontext_map.find(orig);
        if (it != c.decontext_map.end()) return it->second;
    }
    return orig;
}

inline std::string state_full_name(const std::string& abbr) {
    for (const auto& s : domain::us_states())
        if (abbr == s.abbr) return s.name;
    throw Error("unknown state " + abbr);
}

}  // namespace qdetail

// ---------------------------------------------------------------------------
// Template table
// ---------------------------------------------------------------------------

struct QuestionTemplate {
    int id = 0;
    ChartType chart = ChartType::Line;
    TaskType task = TaskType::RetrieveValue;
    int n_options = 4;
    bool decontext_ok = true;
    std::function<QuestionItem(const ChartInstance&, Rng&)> instantiate;
};

namespace qdetail {

inline QuestionItem base_item(const QuestionTemplate& t, const ChartInstance& c) {
    QuestionItem q;
    q.template_id = t.id;
    q.chart_type = t.chart;
    q.task_type = t.task;
    q.context_mode = c.context_mode;
    q.chart_id = vlbench::to_string(c.type) + "_" + std::to_string(c.seed) + "_" +
                 vlbench::to_string(c.context_mode);
    return q;
}

inline double treemap_value(const ChartInstance& c, const std::string& site_orig) {
    const std::string site = L(c, site_orig);
    for (const auto& g : c.groups)
        for (const auto& [label, v] : g.items)
            if (label == site) return v;
    throw Error("treemap item not found: " + site);
}

inline const PointDatum& point_labeled(const ChartInstance& c, const std::string& orig) {
    const std::string lbl = L(c, orig);
    for (const auto& p : c.points)
        if (p.label == lbl) return p;
    throw Error("point not found: " + lbl);
}

}  // namespace qdetail

inline const std::vector<QuestionTemplate>& question_templates() {
    using namespace qdetail;
    static const std::vector<QuestionTemplate> ts = [] {
        std::vector<QuestionTemplate> v;
        auto add = [&](int id, ChartType ct, TaskType tt, int k, bool dec,
                       std::function<QuestionItem(const ChartInstance&, Rng&)> fn) {
            QuestionTemplate t;
            t.id = id;
            t.chart = ct;
            t.task = tt;
            t.n_options = k;
            t.decontext_ok = dec;
            t.instantiate = std::move(fn);
            v.push_back(std::move(t));
        };

        // ----- line (oil price over 2015) -----
        add(1, ChartType::Line, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[0], c);
                const double t = c.value_at(L(c, "Oil"), "February");
                q.stem = "What was the price of a barrel of " + lowercase(L(c, "Oil")) +
                         " in February 2015?";
                if (c.context_mode == ContextMode::Decontextualized)
                    q.stem = "What was the price of a barrel of " + L(c, "Oil") +
                             " in February 2015?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 99);
                return q;
            });
        add(2, ChartType::Line, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[1], c);
                const auto& vals = c.series.at(0).values;
                const std::string truth = c.categories[detail::argmin(vals)];
                q.stem = "In which month was the price of a barrel of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Oil")
                                                                          : lowercase(L(c, "Oil"))) +
                         " the lowest in 2015?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(3, ChartType::Line, TaskType::DetermineRange, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[2], c);
                const auto& vals = c.series.at(0).values;
                const double t = vals[detail::argmax(vals)] - vals[detail::argmin(vals)];
                q.stem = "What was the range of the price of a barrel of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Oil")
                                                                          : lowercase(L(c, "Oil"))) +
                         " over 2015?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_lo = vals[detail::argmin(vals)];
                q.answer_hi = vals[detail::argmax(vals)];
                q.answer_text = format_number(t);
                q.tolerance = 1.0;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 99);
                return q;
            });
        add(4, ChartType::Line, TaskType::FindCorrelationTrend, 3, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[3], c);
                q.stem = "What was the price trend of a barrel of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Oil")
                                                                          : lowercase(L(c, "Oil"))) +
                         " from July to December 2015?";
                const auto& vals = c.series.at(0).values;
                const std::vector<double> half(vals.begin() + 6, vals.end());
                set_trend(q, classify_trend(half, 0.8));
                return q;
            });
        add(5, ChartType::Line, TaskType::MakeComparisons, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[4], c);
                const double t = c.value_at(c.series.at(0).name, "September") -
                                 c.value_at(c.series.at(0).name, "June");
                q.stem = "By how much did the price of a barrel of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Oil")
                                                                          : lowercase(L(c, "Oil"))) +
                         " rise from June to September 2015?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 1.0;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 99);
                return q;
            });

        // ----- bar (internet speeds in Asia) -----
        add(6, ChartType::Bar, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[5], c);
                const double t = c.value_at(c.series.at(0).name, L(c, "Japan"));
                q.stem = "What was the average internet speed in " + L(c, "Japan") + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 59);
                return q;
            });
        add(7, ChartType::Bar, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[6], c);
                const auto& vals = c.series.at(0).values;
                const std::string truth = c.categories[detail::argmax(vals)];
                q.stem = "Which country had the fastest average internet speed?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(8, ChartType::Bar, TaskType::DetermineRange, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[7], c);
                const auto& vals = c.series.at(0).values;
                const double t = vals[detail::argmax(vals)] - vals[detail::argmin(vals)];
                q.stem = "What was the range of average internet speeds across the countries shown?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_lo = vals[detail::argmin(vals)];
                q.answer_hi = vals[detail::argmax(vals)];
                q.answer_text = format_number(t);
                q.tolerance = 1.0;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 59);
                return q;
            });
        add(9, ChartType::Bar, TaskType::MakeComparisons, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[8], c);
                const auto& vals = c.series.at(0).values;
                const std::string sk = L(c, "South Korea");
                const double ref = c.value_at(c.series.at(0).name, sk);
                int count = 0;
                for (std::size_t i = 0; i < vals.size(); ++i)
                    if (c.categories[i] != sk && vals[i] < ref) ++count;
                q.stem = "How many countries had a slower average internet speed than " + sk + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = count;
                q.answer_text = format_number(count);
                q.tolerance = 0;
                set_numeric_options(q, count, 1, 4, rng, 0, 7);
                return q;
            });

        // ----- stacked bar (room service costs) -----
        add(10, ChartType::StackedBar, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[9], c);
                const double t = c.value_at(L(c, "Peanuts"), L(c, "Las Vegas"));
                q.stem = "What was the cost of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Peanuts")
                                                                          : lowercase(L(c, "Peanuts"))) +
                         " in " + L(c, "Las Vegas") + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.25;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 0.5, 12);
                return q;
            });
        add(11, ChartType::StackedBar, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[10], c);
                const std::string city = L(c, "Seattle");
                double total = 0;
                for (const auto& s : c.series) total += c.value_at(s.name, city);
                const double ratio = c.value_at(L(c, "Sandwich"), city) / total;
                const double t = snap(ratio, 0.05);
                q.stem = "About what was the ratio of the cost of a " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Sandwich")
                                                                          : lowercase(L(c, "Sandwich"))) +
                         " to the total cost of room service in " + city + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = ratio;
                q.answer_text = format_number(t);
                q.tolerance = 0.05;
                set_numeric_options(q, t, 0.1, 4, rng, 0.05, 0.95);
                return q;
            });
        add(12, ChartType::StackedBar, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[11], c);
                const auto& soda = c.series_named(L(c, "Soda")).values;
                const std::string truth = c.categories[detail::argmax(soda)];
                q.stem = "In which city was the cost of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Soda")
                                                                          : lowercase(L(c, "Soda"))) +
                         " the highest?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(13, ChartType::StackedBar, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[12], c);
                const bool t = c.value_at(L(c, "Water"), L(c, "Boston")) >
                               c.value_at(L(c, "Water"), L(c, "New York City"));
                q.stem = "The cost of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Water")
                                                                          : lowercase(L(c, "Water"))) +
                         " in " + L(c, "Boston") + " was higher than that in " +
                         L(c, "New York City") + ".";
                set_boolean(q, t);
                return q;
            });
        add(14, ChartType::StackedBar, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[13], c);
                const double r_lv = c.value_at(L(c, "Peanuts"), L(c, "Las Vegas")) /
                                    c.value_at(L(c, "Water"), L(c, "Las Vegas"));
                const double r_sf = c.value_at(L(c, "Peanuts"), L(c, "San Francisco")) /
                                    c.value_at(L(c, "Water"), L(c, "San Francisco"));
                q.stem = "The ratio of the cost of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Peanuts")
                                                                          : lowercase(L(c, "Peanuts"))) +
                         " to " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Water")
                                                                          : lowercase(L(c, "Water"))) +
                         " in " + L(c, "Las Vegas") + " was higher than that in " +
                         L(c, "San Francisco") + ".";
                set_boolean(q, r_lv > r_sf);
                return q;
            });

        // ----- 100% stacked bar (approval by education) -----
        add(15, ChartType::StackedBar100, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[14], c);
                const double t = c.value_at(L(c, "Republicans"), "Postgraduate Study");
                q.stem = "What percentage of respondents with a Postgraduate Study education approved of " +
                         L(c, "Republicans") + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 2.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 99, "%");
                return q;
            });
        add(16, ChartType::StackedBar100, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[15], c);
                const auto& dem = c.series_named(L(c, "Democrats")).values;
                const std::string truth = c.categories[detail::argmin(dem)];
                q.stem = "Among which education level was the approval rate of " +
                         L(c, "Democrats") + " the lowest?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(17, ChartType::StackedBar100, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[16], c);
                const double sc = c.value_at(L(c, "Republicans"), "Some College Degree");
                const double pg = c.value_at(L(c, "Republicans"), "Postgraduate Study");
                q.stem = "The approval rate of " + L(c, "Republicans") +
                         " among respondents with a Some College Degree education was lower than that"
                         " among respondents with a Postgraduate Study education.";
                set_boolean(q, sc < pg);
                return q;
            });

        // ----- pie (smartphone market share) -----
        add(18, ChartType::Pie, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[17], c);
                const double t = c.value_at(c.series.at(0).name, L(c, "Huawei"));
                q.stem = "What was the global smartphone market share of " + L(c, "Huawei") + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 2.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 99, "%");
                return q;
            });
        add(19, ChartType::Pie, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[18], c);
                const auto& vals = c.series.at(0).values;
                const std::string truth = c.categories[detail::argmin(vals)];
                q.stem = "Which company had the smallest global smartphone market share?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(20, ChartType::Pie, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[19], c);
                const double lenovo = c.value_at(c.series.at(0).name, L(c, "Lenovo"));
                const double samsung = c.value_at(c.series.at(0).name, L(c, "Samsung"));
                q.stem = "The global smartphone market share of " + L(c, "Lenovo") +
                         " was larger than that of " + L(c, "Samsung") + ".";
                set_boolean(q, lenovo > samsung);
                return q;
            });

        // ----- histogram (taxi ratings) -----
        add(21, ChartType::Histogram, TaskType::RetrieveValue, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[20], c);
                const double t = c.series.at(0).values[0];
                q.stem = "How many taxi passengers gave a rating between 4.0 and 4.2?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 0, 30);
                return q;
            });
        add(22, ChartType::Histogram, TaskType::FindExtremum, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[21], c);
                const auto& vals = c.series.at(0).values;
                const int bin = static_cast<int>(detail::argmax(vals));
                q.stem = "In which rating interval did the most taxi passengers rate their ride?";
                q.kind = AnswerKind::RangeBand;
                q.answer_lo = c.axis.x_min + bin * c.axis.x_tick_step;
                q.answer_hi = c.axis.x_min + (bin + 1) * c.axis.x_tick_step;
                q.answer_value = 0.5 * (q.answer_lo + q.answer_hi);
                q.answer_text = c.categories[bin];
                set_label_options(q, q.answer_text, c.categories, 4, rng);
                q.kind = AnswerKind::RangeBand;
                return q;
            });
        add(23, ChartType::Histogram, TaskType::MakeComparisons, 2, false,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[22], c);
                const auto& vals = c.series.at(0).values;
                q.stem = "More taxi passengers gave a rating between 4.6 and 4.8 than between 4.2"
                         " and 4.4.";
                set_boolean(q, vals[3] > vals[1]);
                return q;
            });

        // ----- scatterplot (heights and weights) -----
        add(24, ChartType::Scatterplot, TaskType::RetrieveValue, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[23], c);
                double t = 0;
                for (const auto& p : c.points)
                    if (std::abs(p.x - 165.1) < 0.05) t = p.y;
                q.stem = "What was the weight of the 165.1 cm tall male?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 2.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 30, 110);
                return q;
            });
        add(25, ChartType::Scatterplot, TaskType::FindExtremum, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[24], c);
                double t = -1e9;
                for (const auto& p : c.points) t = std::max(t, p.x);
                q.stem = "What was the height of the tallest male?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.5;
                set_numeric_options(q, t, 1.0, 4, rng, 150, 200);
                return q;
            });
        add(26, ChartType::Scatterplot, TaskType::DetermineRange, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[25], c);
                double lo = 1e9, hi = -1e9;
                for (const auto& p : c.points) {
                    lo = std::min(lo, p.y);
                    hi = std::max(hi, p.y);
                }
                const double t = hi - lo;
                q.stem = "What was the range of the weights of the males shown?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_lo = lo;
                q.answer_hi = hi;
                q.answer_text = format_number(t);
                q.tolerance = 2.5;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 1, 90);
                return q;
            });
        add(27, ChartType::Scatterplot, TaskType::FindAnomalies, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[26], c);
                const double t = c.shaping.at("anomaly_height").get<double>();
                q.stem = "What was the height of the male whose weight lies furthest from the"
                         " overall height-weight relationship?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.5;
                // distractors are real heights of other points, so every option
                // appears in the chart
                std::vector<double> others;
                for (const auto& p : c.points)
                    if (std::abs(p.x - t) > 1.5) others.push_back(p.x);
                rng.shuffle(others);
                std::vector<double> opts = {t};
                for (double h : others) {
                    bool far = true;
                    for (double o : opts) far &= std::abs(h - o) > 1.0;
                    if (far) opts.push_back(h);
                    if (opts.size() == 4) break;
                }
                if (opts.size() < 4) throw DistractorExhaustion("scatter anomaly options");
                std::sort(opts.begin(), opts.end());
                q.options.clear();
                for (double o : opts) q.options.push_back(format_number(o));
                q.correct_index = static_cast<int>(
                    std::find(opts.begin(), opts.end(), t) - opts.begin());
                return q;
            });
        add(28, ChartType::Scatterplot, TaskType::FindClusters, 2, false,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[27], c);
                const bool t = std::abs(c.shaping.at("cluster_cx").get<double>() - 176.0) < 0.5 &&
                               std::abs(c.shaping.at("cluster_cy").get<double>() - 70.0) < 0.5;
                q.stem = "There is a group of males whose heights are around 176 cm and weights"
                         " are around 70 kg.";
                set_boolean(q, t);
                return q;
            });
        add(29, ChartType::Scatterplot, TaskType::FindCorrelationTrend, 2, false,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[28], c);
                q.stem = "There is a negative linear relationship between the height and the"
                         " weight of the males shown.";
                set_boolean(q, c.shaping.at("negative_trend").get<bool>());
                return q;
            });
        add(30, ChartType::Scatterplot, TaskType::MakeComparisons, 2, false,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[29], c);
                q.stem = "The males who are 188 cm tall all have the same weight.";
                set_boolean(q, c.shaping.at("same_weight_at_188").get<bool>());
                return q;
            });

        // ----- area (coffee price) -----
        add(31, ChartType::Area, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[30], c);
                const double t = c.value_at(c.series.at(0).name, "Jun 2013");
                q.stem = "What was the average price of a pound of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Coffee Beans")
                                                                          : lowercase(L(c, "Coffee Beans"))) +
                         " in June 2013?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.25;
                set_numeric_options(q, snap(t, 0.5), c.axis.option_step, 4, rng, 0.5, 7.5);
                // options are on the coarse grid; the truth may sit between two
                // of them, so re-anchor the correct option to the nearest
                int best = 0;
                double bd = 1e9;
                for (std::size_t i = 0; i < q.options.size(); ++i) {
                    const double d = std::abs(std::stod(q.options[i]) - t);
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(i);
                    }
                }
                q.correct_index = best;
                return q;
            });
        add(32, ChartType::Area, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[31], c);
                const auto& vals = c.series.at(0).values;
                const std::string truth = c.categories[detail::argmin(vals)];
                q.stem = "In which month was the average price of a pound of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Coffee Beans")
                                                                          : lowercase(L(c, "Coffee Beans"))) +
                         " the lowest?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(33, ChartType::Area, TaskType::DetermineRange, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[32], c);
                const auto& vals = c.series.at(0).values;
                const double t = vals[detail::argmax(vals)] - vals[detail::argmin(vals)];
                q.stem = "What was the range of the average price of a pound of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Coffee Beans")
                                                                          : lowercase(L(c, "Coffee Beans"))) +
                         " over the period shown?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_lo = vals[detail::argmin(vals)];
                q.answer_hi = vals[detail::argmax(vals)];
                q.answer_text = format_number(t);
                q.tolerance = 0.25;
                set_numeric_options(q, snap(t, 0.5), c.axis.option_step, 4, rng, 0.5, 7.5);
                int best = 0;
                double bd = 1e9;
                for (std::size_t i = 0; i < q.options.size(); ++i) {
                    const double d = std::abs(std::stod(q.options[i]) - t);
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(i);
                    }
                }
                q.correct_index = best;
                return q;
            });
        add(34, ChartType::Area, TaskType::FindCorrelationTrend, 3, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[33], c);
                q.stem = "What was the trend of the average price of a pound of " +
                         (c.context_mode == ContextMode::Decontextualized ? L(c, "Coffee Beans")
                                                                          : lowercase(L(c, "Coffee Beans"))) +
                         " over 2013?";
                const auto& vals = c.series.at(0).values;
                const std::vector<double> first(vals.begin(), vals.begin() + 12);
                set_trend(q, classify_trend(first, 0.02));
                return q;
            });

        // ----- stacked area (baby names) -----
        add(35, ChartType::StackedArea, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[34], c);
                const double t = c.value_at(L(c, "Amelia"), "2010");
                q.stem = "How many girls were named " + L(c, "Amelia") + " in 2010?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 250;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 100, 15000);
                return q;
            });
        add(36, ChartType::StackedArea, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[35], c);
                const double t = c.shaping.at("amelia_ratio_2014").get<double>();
                q.stem = "About what was the ratio of the number of girls named " +
                         L(c, "Amelia") + " to the number of girls named " + L(c, "Isla") +
                         " in 2014?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 0.25;
                set_numeric_options(q, t, 0.5, 4, rng, 0.25, 10);
                return q;
            });
        add(37, ChartType::StackedArea, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[36], c);
                const auto& vals = c.series_named(L(c, "Amelia")).values;
                const std::string truth = c.categories[detail::argmax(vals)];
                q.stem = "In which year was the number of girls named " + L(c, "Amelia") +
                         " the highest?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                set_label_options(q, truth, c.categories, 4, rng);
                return q;
            });
        add(38, ChartType::StackedArea, TaskType::FindCorrelationTrend, 3, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[37], c);
                q.stem = "What was the trend of the number of girls named " + L(c, "Isla") +
                         " from 2009 to 2012?";
                const auto& vals = c.series_named(L(c, "Isla")).values;
                const std::vector<double> window(vals.begin(), vals.begin() + 4);
                set_trend(q, classify_trend(window, 120));
                return q;
            });
        add(39, ChartType::StackedArea, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[38], c);
                const double y13 = c.value_at(L(c, "Amelia"), "2013");
                const double y14 = c.value_at(L(c, "Amelia"), "2014");
                q.stem = "More girls were named " + L(c, "Amelia") + " in 2014 than in 2013.";
                set_boolean(q, y14 > y13);
                return q;
            });
        add(40, ChartType::StackedArea, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[39], c);
                const auto& isla = c.series_named(L(c, "Isla")).values;
                const auto& olivia = c.series_named(L(c, "Olivia")).values;
                bool always = true;
                for (std::size_t i = 0; i < isla.size(); ++i) always &= isla[i] > olivia[i];
                q.stem = "In every year shown, more girls were named " + L(c, "Isla") +
                         " than " + L(c, "Olivia") + ".";
                set_boolean(q, always);
                return q;
            });

        // ----- bubble (metro systems) -----
        add(41, ChartType::Bubble, TaskType::RetrieveValue, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[40], c);
                const double t = point_labeled(c, "Beijing").y;
                q.stem = "What was the total system length of the metro system in " +
                         L(c, "Beijing") + "?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_text = format_number(t);
                q.tolerance = 25;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 10, 890);
                return q;
            });
        add(42, ChartType::Bubble, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[41], c);
                const PointDatum* best = &c.points.front();
                for (const auto& p : c.points)
                    if (p.x > best->x) best = &p;
                q.stem = "Which city's metro system had the largest number of stations?";
                q.kind = AnswerKind::Label;
                q.answer_text = best->label;
                std::vector<std::string> pool;
                for (const auto& p : c.points) pool.push_back(p.label);
                set_label_options(q, best->label, pool, 4, rng);
                return q;
            });
        add(43, ChartType::Bubble, TaskType::DetermineRange, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[42], c);
                double lo = 1e9, hi = -1e9;
                for (const auto& p : c.points) {
                    lo = std::min(lo, p.y);
                    hi = std::max(hi, p.y);
                }
                const double t = hi - lo;
                q.stem = "What was the range of the total system lengths of the metro systems"
                         " shown?";
                q.kind = AnswerKind::Numeric;
                q.answer_value = t;
                q.answer_lo = lo;
                q.answer_hi = hi;
                q.answer_text = format_number(t);
                q.tolerance = 25;
                set_numeric_options(q, t, c.axis.option_step, 4, rng, 10, 890);
                return q;
            });
        add(44, ChartType::Bubble, TaskType::FindAnomalies, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[43], c);
                const std::string t = c.shaping.at("anomaly_city").get<std::string>();
                q.stem = "Which city's metro system lies furthest from the overall relationship"
                         " between the number of stations and the total system length?";
                q.kind = AnswerKind::Label;
                q.answer_text = t;
                std::vector<std::string> pool;
                for (const auto& p : c.points) pool.push_back(p.label);
                set_label_options(q, t, pool, 4, rng);
                return q;
            });
        add(45, ChartType::Bubble, TaskType::FindClusters, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[44], c);
                const bool t = std::abs(c.shaping.at("cluster_cx").get<double>() - 200.0) < 0.5;
                q.stem = "There is a group of metro systems with approximately 200 stations and"
                         " a total system length of around 200 km.";
                set_boolean(q, t);
                return q;
            });
        add(46, ChartType::Bubble, TaskType::FindCorrelationTrend, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[45], c);
                q.stem = "In general, the annual ridership of a metro system increases with its"
                         " number of stations.";
                set_boolean(q, c.shaping.at("ridership_increases_with_stations").get<bool>());
                return q;
            });
        add(47, ChartType::Bubble, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[46], c);
                const double paris = point_labeled(c, "Paris").size;
                const double nyc = point_labeled(c, "New York City").size;
                q.stem = "The metro system in " + L(c, "Paris") +
                         " had a higher annual ridership than the one in " +
                         L(c, "New York City") + ".";
                set_boolean(q, paris > nyc);
                return q;
            });

        // ----- choropleth (state unemployment) -----
        add(48, ChartType::Choropleth, TaskType::RetrieveValue, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[47], c);
                const int band = c.shaping.at("indiana_band").get<int>();
                q.stem = "What was the unemployment rate in Indiana in 2015?";
                q.kind = AnswerKind::RangeBand;
                q.answer_lo = ChoroplethBands::band_lo(band);
                q.answer_hi = ChoroplethBands::band_hi(band);
                q.answer_value = 0.5 * (q.answer_lo + q.answer_hi);
                q.answer_text = ChoroplethBands::band_label(band);
                std::vector<std::string> pool;
                for (int b = 0; b < ChoroplethBands::count; ++b)
                    pool.push_back(ChoroplethBands::band_label(b));
                set_label_options(q, q.answer_text, pool, 4, rng);
                q.kind = AnswerKind::RangeBand;
                return q;
            });
        add(49, ChartType::Choropleth, TaskType::FindExtremum, 4, false,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[48], c);
                const std::string abbr = c.shaping.at("top_state").get<std::string>();
                const std::string truth = state_full_name(abbr);
                q.stem = "In which state was the unemployment rate the highest in 2015?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                std::vector<std::string> pool;
                for (const auto& s : domain::us_states()) pool.push_back(s.name);
                set_label_options(q, truth, pool, 4, rng);
                return q;
            });
        add(50, ChartType::Choropleth, TaskType::MakeComparisons, 2, false,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[49], c);
                q.stem = "The unemployment rate in Arizona was higher than that in Oklahoma in"
                         " 2015.";
                set_boolean(q, c.shaping.at("az_gt_ok").get<bool>());
                return q;
            });

        // ----- treemap (website visitors) -----
        add(51, ChartType::Treemap, TaskType::FindExtremum, 4, true,
            [](const ChartInstance& c, Rng& rng) {
                QuestionItem q = base_item(question_templates()[50], c);
                const std::string truth = c.shaping.at("largest_site").get<std::string>();
                q.stem = "Which website had the largest number of unique visitors in 2010?";
                q.kind = AnswerKind::Label;
                q.answer_text = truth;
                std::vector<std::string> pool;
                for (const auto& g : c.groups)
                    for (const auto& [label, _] : g.items) pool.push_back(label);
                set_label_options(q, truth, pool, 4, rng);
                return q;
            });
        add(52, ChartType::Treemap, TaskType::MakeComparisons, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[51], c);
                const double target = treemap_value(c, "Target");
                const double ask = treemap_value(c, "Ask");
                q.stem = "The number of unique visitors to " + L(c, "Target") +
                         " was larger than the number of unique visitors to " + L(c, "Ask") +
                         " in 2010.";
                set_boolean(q, target > ask);
                return q;
            });
        add(53, ChartType::Treemap, TaskType::IdentifyHierarchy, 2, true,
            [](const ChartInstance& c, Rng&) {
                QuestionItem q = base_item(question_templates()[52], c);
                const std::string amazon_cat = c.shaping.at("amazon_category").get<std::string>();
                q.stem = L(c, "Amazon") + " is nested in the " + L(c, "Computer") + " category.";
                set_boolean(q, amazon_cat == L(c, "Computer"));
                return q;
            });

        return v;
    }();
    return ts;
}

inline const QuestionTemplate& question_template(int id) {
    const auto& ts = question_templates();
    if (id < 1 || id > static_cast<int>(ts.size()))
        throw UnknownDimensionValue("no question template with id " + std::to_string(id));
    return ts[static_cast<std::size_t>(id - 1)];
}

// ---------------------------------------------------------------------------
// Item bank
// ---------------------------------------------------------------------------

struct ItemBank {
    std::uint64_t seed = 0;
    ContextMode mode = ContextMode::Contextualized;
    std::vector<ChartInstance> charts;
    std::vector<QuestionItem> items;

    const ChartInstance& chart_for(ChartType t) const {
        for (const auto& c : charts)
            if (c.type == t) return c;
        throw MissingChart("no chart of type " + to_string(t) + " in bank");
    }

    const QuestionItem& item_for(int template_id) const {
        for (const auto& q : items)
            if (q.template_id == template_id) return q;
        throw UnknownDimensionValue("no item for template " + std::to_string(template_id));
    }

    json to_json() const {
        json j;
        j["seed"] = seed;
        j["context_mode"] = vlbench::to_string(mode);
        j["charts"] = json::array();
        for (const auto& c : charts) j["charts"].push_back(c.to_json());
        j["items"] = json::array();
        for (const auto& q : items) j["items"].push_back(q.to_json());
        return j;
    }

    static ItemBank from_json(const json& j) {
        ItemBank b;
        b.seed = j.at("seed").get<std::uint64_t>();
        b.mode = context_mode_from_string(j.at("context_mode").get<std::string>());
        for (const auto& cj : j.at("charts")) b.charts.push_back(ChartInstance::from_json(cj));
        for (const auto& qj : j.at("items")) b.items.push_back(QuestionItem::from_json(qj));
        return b;
    }
};

// instantiate one item against a chart, deterministically in (chart, template)
inline QuestionItem instantiate_item(const QuestionTemplate& t, const ChartInstance& c) {
    if (c.type != t.chart)
        throw MissingChart("template " + std::to_string(t.id) + " expects " + to_string(t.chart) +
                           ", got " + to_string(c.type));
    Rng rng = Rng::derived(splitmix64(c.seed) ^ static_cast<std::uint64_t>(t.id), "qbank/item");
    return t.instantiate(c, rng);
}

// Per-template answer exclusion lists: regenerate the chart (seed+1, ...) until
// none of its items' canonical answers hit the excluded strings.
using ExclusionLists = std::map<int, std::vector<std::string>>;

inline ItemBank build_item_bank(std::uint64_t seed, ContextMode mode,
                                const ExclusionLists& exclusions = {},
                                const GenerationConstraints& gc = {}) {
    ItemBank bank;
    bank.seed = seed;
    bank.mode = mode;
    for (ChartType ct : kAllChartTypes) {
        std::vector<const QuestionTemplate*> temps;
        for (const auto& t : question_templates())
            if (t.chart == ct && (mode == ContextMode::Contextualized || t.decontext_ok))
                temps.push_back(&t);
        if (temps.empty()) continue;  // excluded from the decontextualized pool

        const std::uint64_t chart_seed = splitmix64(seed ^ fnv1a64("chart/" + to_string(ct)));
        auto accept = [&](const ChartInstance& raw) {
            const ChartInstance c =
                mode == ContextMode::Decontextualized ? decontextualize(raw) : raw;
            for (const auto* t : temps) {
                const QuestionItem q = instantiate_item(*t, c);
                auto it = exclusions.find(t->id);
                if (it == exclusions.end()) continue;
                for (const auto& banned : it->second)
                    if (q.answer_text == banned) return false;
            }
            return true;
        };
        ChartInstance chart = generate_chart_accepted(ct, chart_seed, gc, accept);
        if (mode == ContextMode::Decontextualized) chart = decontextualize(chart);
        for (const auto* t : temps) bank.items.push_back(instantiate_item(*t, chart));
        bank.charts.push_back(std::move(chart));
    }
    return bank;
}

}  // namespace vlbench
