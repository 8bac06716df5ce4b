#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/render/png.hpp"
#include "vlbench/render/raster.hpp"
#include "vlbench/runner.hpp"
#include "vlbench/scoring.hpp"

namespace vlbench {

// ---------------------------------------------------------------------------
// Per-item accuracy table
// ---------------------------------------------------------------------------

struct ComparisonCell {
    double accuracy = 0;
    int n_trials = 0;
    std::string color_class;  // "better", "worse", "close"
};

struct ComparisonRow {
    int template_id = 0;
    ChartType chart_type = ChartType::Line;
    TaskType task_type = TaskType::RetrieveValue;
    double random_rate = 0;
    std::optional<double> baseline;
    std::map<std::string, ComparisonCell> by_model;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> model_ids;
};

// per-item accuracy per model; the color class compares against the human
// baseline when one is supplied and against the random rate otherwise
inline ComparisonTable accuracy_table(const std::vector<ScoreRecord>& scores, const ItemBank& bank,
                                      const std::map<int, double>& baseline = {}) {
    std::map<int, std::map<std::string, std::pair<int, int>>> tally;  // tid -> model -> (ok, n)
    std::map<std::string, bool> models;
    for (const auto& s : scores) {
        auto& t = tally[s.template_id][s.condition.llm_id];
        t.second += 1;
        if (s.correct) t.first += 1;
        models[s.condition.llm_id] = true;
    }

    ComparisonTable out;
    for (const auto& [m, _] : models) out.model_ids.push_back(m);
    for (const auto& item : bank.items) {
        auto it = tally.find(item.template_id);
        if (it == tally.end()) continue;
        ComparisonRow row;
        row.template_id = item.template_id;
        row.chart_type = item.chart_type;
        row.task_type = item.task_type;
        row.random_rate = 1.0 / static_cast<double>(item.options.size());
        if (auto b = baseline.find(item.template_id); b != baseline.end()) row.baseline = b->second;
        for (const auto& [model, t] : it->second) {
            ComparisonCell cell;
            cell.n_trials = t.second;
            cell.accuracy = t.second > 0 ? static_cast<double>(t.first) / t.second : 0.0;
            const double ref = row.baseline.value_or(row.random_rate);
            const double d = cell.accuracy - ref;
            cell.color_class = d > 0.05 ? "better" : (d < -0.05 ? "worse" : "close");
            row.by_model[model] = cell;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline void write_comparison_csv(const ComparisonTable& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw RenderFailure("cannot write " + path);
    f << "template_id,chart_type,task_type,random_rate,baseline";
    for (const auto& m : t.model_ids) f << "," << m << "_accuracy," << m << "_class";
    f << "\n";
    for (const auto& r : t.rows) {
        f << r.template_id << "," << to_string(r.chart_type) << "," << to_string(r.task_type) << ","
          << format_number(r.random_rate, 4) << ","
          << (r.baseline ? format_number(*r.baseline, 4) : "");
        for (const auto& m : t.model_ids) {
            auto it = r.by_model.find(m);
            if (it == r.by_model.end()) {
                f << ",,";
            } else {
                f << "," << format_number(it->second.accuracy, 4) << "," << it->second.color_class;
            }
        }
        f << "\n";
    }
}

// ---------------------------------------------------------------------------
// Figure helpers
// ---------------------------------------------------------------------------

namespace report_detail {

struct Frame {
    int x0 = 90, y0 = 50, x1 = 760, y1 = 540;
};

inline void draw_frame(Canvas& cv, const Frame& fr, const std::string& title) {
    cv.fill(palette::white);
    cv.draw_text(20, 16, title, palette::black, 2);
    cv.draw_line(fr.x0, fr.y1, fr.x1, fr.y1, palette::axis);
    cv.draw_line(fr.x0, fr.y0, fr.x0, fr.y1, palette::axis);
}

inline double px(const Frame& fr, double v, double lo, double hi) {
    if (hi == lo) return 0.5 * (fr.x0 + fr.x1);
    return fr.x0 + (v - lo) / (hi - lo) * (fr.x1 - fr.x0);
}

inline double py(const Frame& fr, double v, double lo, double hi) {
    if (hi == lo) return 0.5 * (fr.y0 + fr.y1);
    return fr.y1 - (v - lo) / (hi - lo) * (fr.y1 - fr.y0);
}

// gaussian kernel density on a fixed grid
inline std::vector<double> kde(const std::vector<double>& x, double lo, double hi, int grid) {
    std::vector<double> out(static_cast<std::size_t>(grid), 0.0);
    if (x.empty()) return out;
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double sd = 0;
    for (double v : x) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / std::max<std::size_t>(1, x.size() - 1));
    double h = 1.06 * sd * std::pow(static_cast<double>(x.size()), -0.2);
    if (h <= 0) h = std::max(1e-6, (hi - lo) / 100.0);  // degenerate spike
    for (int g = 0; g < grid; ++g) {
        const double t = lo + (hi - lo) * g / (grid - 1);
        double s = 0;
        for (double v : x) {
            const double z = (t - v) / h;
            s += std::exp(-0.5 * z * z);
        }
        out[static_cast<std::size_t>(g)] = s / (static_cast<double>(x.size()) * h * 2.5066282746);
    }
    return out;
}

struct BoxStats {
    double lo = 0, q1 = 0, med = 0, q3 = 0, hi = 0;
    int n = 0;
};

inline BoxStats box_stats(std::vector<double> v) {
    BoxStats b;
    b.n = static_cast<int>(v.size());
    if (v.empty()) return b;
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * (static_cast<double>(v.size()) - 1.0);
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
    };
    b.lo = v.front();
    b.q1 = q(0.25);
    b.med = q(0.5);
    b.q3 = q(0.75);
    b.hi = v.back();
    return b;
}

}  // namespace report_detail

// ---------------------------------------------------------------------------
// Ridge plot of bootstrap coefficient distributions
// ---------------------------------------------------------------------------

// one density ridge per named coefficient; the underlying samples go to CSV
inline void ridge_plot(const std::vector<std::pair<std::string, std::vector<double>>>& samples,
                       const std::string& png_path, const std::string& csv_path,
                       const std::string& title = "coefficient distributions") {
    {
        std::ofstream f(csv_path);
        if (!f) throw RenderFailure("cannot write " + csv_path);
        f << "name,sample\n";
        for (const auto& [name, xs] : samples)
            for (double v : xs) f << name << "," << format_number(v, 6) << "\n";
    }
    Canvas cv(800, std::max(200, 60 + static_cast<int>(samples.size()) * 46));
    report_detail::Frame fr{200, 40, 770, cv.height() - 30};
    report_detail::draw_frame(cv, fr, title);

    double lo = 0, hi = 0;
    bool first = true;
    for (const auto& [_, xs] : samples)
        for (double v : xs) {
            if (first || v < lo) lo = v;
            if (first || v > hi) hi = v;
            first = false;
        }
    if (first) {
        write_png(png_path, cv);
        return;
    }
    if (lo == hi) {
        lo -= 1;
        hi += 1;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const int band = (fr.y1 - fr.y0) / std::max<int>(1, static_cast<int>(samples.size()));
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const int base = fr.y0 + static_cast<int>(s + 1) * band;
        const auto dens = report_detail::kde(samples[s].second, lo, hi, 200);
        double dmax = 0;
        for (double d : dens) dmax = std::max(dmax, d);
        const Color col = palette::series()[s % palette::series().size()];
        for (int g = 1; g < 200; ++g) {
            const int xa = static_cast<int>(report_detail::px(fr, lo + (hi - lo) * (g - 1) / 199.0, lo, hi));
            const int xb = static_cast<int>(report_detail::px(fr, lo + (hi - lo) * g / 199.0, lo, hi));
            const double scale = dmax > 0 ? (band - 6) / dmax : 0;
            const int ya = base - static_cast<int>(dens[static_cast<std::size_t>(g - 1)] * scale);
            const int yb = base - static_cast<int>(dens[static_cast<std::size_t>(g)] * scale);
            cv.draw_line(xa, ya, xb, yb, col);
        }
        cv.draw_line(fr.x0, base, fr.x1, base, palette::grid);
        cv.draw_text(8, base - 8, samples[s].first.substr(0, 31), palette::black);
    }
    const int zx = static_cast<int>(report_detail::px(fr, 0, lo, hi));
    if (zx >= fr.x0 && zx <= fr.x1) cv.draw_line(zx, fr.y0, zx, fr.y1, palette::axis);
    cv.draw_text(fr.x0 - 10, fr.y1 + 8, format_number(lo, 2), palette::black);
    cv.draw_text(fr.x1 - 30, fr.y1 + 8, format_number(hi, 2), palette::black);
    write_png(png_path, cv);
}

// ---------------------------------------------------------------------------
// Box plots of the four overlap metrics, one panel per metric
// ---------------------------------------------------------------------------

inline void overlap_boxplots(const std::map<std::string, std::vector<OverlapMetrics>>& groups,
                             const std::string& png_path, const std::string& csv_path) {
    const std::vector<std::string> metric_names = {"percentage", "jaccard", "dice", "overlap_coef"};
    auto metric_of = [](const OverlapMetrics& m, int i) {
        switch (i) {
            case 0: return m.percentage;
            case 1: return m.jaccard;
            case 2: return m.dice;
            default: return m.overlap_coef;
        }
    };
    {
        std::ofstream f(csv_path);
        if (!f) throw RenderFailure("cannot write " + csv_path);
        f << "group,metric,n,min,q1,median,q3,max\n";
        for (const auto& [g, ms] : groups) {
            for (int i = 0; i < 4; ++i) {
                std::vector<double> v;
                for (const auto& m : ms) v.push_back(metric_of(m, i));
                const auto b = report_detail::box_stats(v);
                f << g << "," << metric_names[static_cast<std::size_t>(i)] << "," << b.n << ","
                  << format_number(b.lo, 4) << "," << format_number(b.q1, 4) << ","
                  << format_number(b.med, 4) << "," << format_number(b.q3, 4) << ","
                  << format_number(b.hi, 4) << "\n";
            }
        }
    }

    Canvas cv(900, 700);
    cv.fill(palette::white);
    cv.draw_text(20, 12, "interval overlap by group", palette::black, 2);
    const int ng = std::max<int>(1, static_cast<int>(groups.size()));
    for (int panel = 0; panel < 4; ++panel) {
        const int px0 = 60 + (panel % 2) * 420;
        const int py0 = 50 + (panel / 2) * 320;
        report_detail::Frame fr{px0, py0, px0 + 360, py0 + 260};
        cv.draw_line(fr.x0, fr.y1, fr.x1, fr.y1, palette::axis);
        cv.draw_line(fr.x0, fr.y0, fr.x0, fr.y1, palette::axis);
        cv.draw_text(fr.x0, fr.y0 - 14, metric_names[static_cast<std::size_t>(panel)],
                     palette::black);
        cv.draw_text(fr.x0 - 18, fr.y0 - 4, "1", palette::black);
        cv.draw_text(fr.x0 - 18, fr.y1 - 4, "0", palette::black);
        int gi = 0;
        for (const auto& [g, ms] : groups) {
            std::vector<double> v;
            for (const auto& m : ms) v.push_back(metric_of(m, panel));
            const int cx = fr.x0 + (2 * gi + 1) * (fr.x1 - fr.x0) / (2 * ng);
            const int half = std::max(6, (fr.x1 - fr.x0) / (3 * ng));
            if (v.empty()) {
                cv.draw_text(cx - 24, (fr.y0 + fr.y1) / 2, "no data", palette::axis);
            } else {
                const auto b = report_detail::box_stats(v);
                auto Y = [&](double q) {
                    return static_cast<int>(report_detail::py(fr, q, 0.0, 1.0));
                };
                const Color col = palette::series()[static_cast<std::size_t>(gi) % palette::series().size()];
                cv.draw_line(cx, Y(b.lo), cx, Y(b.hi), palette::axis);
                cv.draw_rect(cx - half, Y(b.q3), cx + half, Y(b.q1), col);
                cv.draw_line(cx - half, Y(b.med), cx + half, Y(b.med), palette::black, 2);
            }
            if (panel == 2 || panel == 3)
                cv.draw_text_vertical(cx - 4, fr.y1 + 8, g.substr(0, 16), palette::black);
            ++gi;
        }
    }
    write_png(png_path, cv);
}

// ---------------------------------------------------------------------------
// Relative-error confidence intervals per group
// ---------------------------------------------------------------------------

inline void relative_error_ci(const std::map<std::string, std::vector<double>>& groups,
                              const std::string& png_path, const std::string& csv_path) {
    struct Row {
        std::string group;
        int n;
        double mean, lo, hi;
        bool ok;
    };
    std::vector<Row> rows;
    for (const auto& [g, v] : groups) {
        Row r{g, static_cast<int>(v.size()), 0, 0, 0, false};
        if (v.size() >= 2) {
            double mean = 0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size() - 1);
            const double se = std::sqrt(var / static_cast<double>(v.size()));
            boost::math::students_t_distribution<> dist(static_cast<double>(v.size() - 1));
            const double tc = boost::math::quantile(dist, 0.975);
            r.mean = mean;
            r.lo = mean - tc * se;
            r.hi = mean + tc * se;
            r.ok = true;
        }
        rows.push_back(std::move(r));
    }
    {
        std::ofstream f(csv_path);
        if (!f) throw RenderFailure("cannot write " + csv_path);
        f << "group,n,mean,ci_lo,ci_hi,note\n";
        for (const auto& r : rows)
            f << r.group << "," << r.n << "," << format_number(r.mean, 6) << ","
              << format_number(r.lo, 6) << "," << format_number(r.hi, 6) << ","
              << (r.ok ? "" : "too few samples") << "\n";
    }

    Canvas cv(800, 120 + static_cast<int>(rows.size()) * 40);
    report_detail::Frame fr{200, 40, 760, cv.height() - 40};
    report_detail::draw_frame(cv, fr, "relative error, mean with 95% CI");
    double hi = 0;
    for (const auto& r : rows)
        if (r.ok) hi = std::max(hi, r.hi);
    if (hi <= 0) hi = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const int y = fr.y0 + 20 + static_cast<int>(i) * 40;
        cv.draw_text(8, y - 4, r.group.substr(0, 31), palette::black);
        if (!r.ok) {
            cv.draw_text(fr.x0 + 8, y - 4, "too few samples (n=" + std::to_string(r.n) + ")",
                         palette::axis);
            continue;
        }
        auto X = [&](double v) { return static_cast<int>(report_detail::px(fr, v, 0, hi)); };
        const Color col = palette::series()[i % palette::series().size()];
        cv.draw_line(X(r.lo), y, X(r.hi), y, col, 2);
        cv.draw_line(X(r.lo), y - 5, X(r.lo), y + 5, col);
        cv.draw_line(X(r.hi), y - 5, X(r.hi), y + 5, col);
        cv.fill_circle(X(r.mean), y, 4, col);
    }
    cv.draw_text(fr.x0 - 4, fr.y1 + 8, "0", palette::black);
    cv.draw_text(fr.x1 - 30, fr.y1 + 8, format_number(hi, 2), palette::black);
    write_png(png_path, cv);
}

// ---------------------------------------------------------------------------
// Latency over trial index per model, outliers beyond the cutoff excluded
// ---------------------------------------------------------------------------

inline void latency_timeseries(const std::vector<TrialRecord>& records,
                               const std::string& png_path, const std::string& csv_path,
                               double cutoff_seconds = 100.0) {
    std::map<std::string, std::vector<double>> series;
    int excluded = 0;
    for (const auto& r : records) {
        if (r.latency_seconds > cutoff_seconds) {
            ++excluded;
            continue;
        }
        series[r.plan.condition.llm_id].push_back(r.latency_seconds);
    }
    {
        std::ofstream f(csv_path);
        if (!f) throw RenderFailure("cannot write " + csv_path);
        f << "model,trial_index,latency_seconds\n";
        for (const auto& [m, v] : series)
            for (std::size_t i = 0; i < v.size(); ++i)
                f << m << "," << i << "," << format_number(v[i], 4) << "\n";
    }

    Canvas cv(900, 500);
    report_detail::Frame fr{70, 50, 860, 440};
    report_detail::draw_frame(cv, fr, "response latency per trial");
    cv.draw_text(70, 460, std::to_string(excluded) + " trials above " +
                              format_number(cutoff_seconds, 0) + "s excluded",
                 palette::axis);
    double hi = 1;
    std::size_t nmax = 1;
    for (const auto& [_, v] : series) {
        for (double x : v) hi = std::max(hi, x);
        nmax = std::max(nmax, v.size());
    }
    int si = 0;
    for (const auto& [m, v] : series) {
        const Color col = palette::series()[static_cast<std::size_t>(si) % palette::series().size()];
        for (std::size_t i = 1; i < v.size(); ++i) {
            const int xa = static_cast<int>(
                report_detail::px(fr, static_cast<double>(i - 1), 0, static_cast<double>(nmax - 1)));
            const int xb = static_cast<int>(
                report_detail::px(fr, static_cast<double>(i), 0, static_cast<double>(nmax - 1)));
            cv.draw_line(xa, static_cast<int>(report_detail::py(fr, v[i - 1], 0, hi)), xb,
                         static_cast<int>(report_detail::py(fr, v[i], 0, hi)), col);
        }
        cv.draw_text(fr.x1 - 120, fr.y0 + 14 * si, m.substr(0, 19), col);
        ++si;
    }
    cv.draw_text(fr.x0 - 18, fr.y0 - 4, format_number(hi, 0), palette::black);
    cv.draw_text(fr.x0 - 18, fr.y1 - 4, "0", palette::black);
    write_png(png_path, cv);
}

}  // namespace vlbench
