#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vlbench/chartgen.hpp"
#include "vlbench/common.hpp"
#include "vlbench/render/raster.hpp"

namespace vlbench {

struct RenderOptions {
    int width = 800;
    int height = 600;
    bool show_value_labels = false;  // paper-protocol runs keep this off
    std::string image_format = "PNG";
    std::string style_preset = "default";
};

namespace render_detail {

inline constexpr int kWidth = 800;
inline constexpr int kHeight = 600;

struct Frame {
    int x0 = 90, y0 = 60, x1 = 630, y1 = 520;  // plot rectangle in pixels
    double vy0 = 0, vy1 = 1;                   // value range mapped onto y
    double vx0 = 0, vx1 = 1;

    int px(double vx) const {
        return x0 + static_cast<int>(std::lround((vx - vx0) / (vx1 - vx0) * (x1 - x0)));
    }
    int py(double vy) const {
        return y1 - static_cast<int>(std::lround((vy - vy0) / (vy1 - vy0) * (y1 - y0)));
    }
};

inline void draw_title(Canvas& cv, const std::string& title) {
    const int tw = Canvas::text_width(title, 2);
    cv.draw_text(std::max(10, (kWidth - tw) / 2), 18, title, palette::black, 2);
}

inline void draw_y_axis(Canvas& cv, const Frame& f, const AxisMeta& ax) {
    cv.draw_line(f.x0, f.y0, f.x0, f.y1, palette::axis);
    if (ax.tick_step > 0) {
        for (double v = f.vy0; v <= f.vy1 + 1e-9; v += ax.tick_step) {
            const int y = f.py(v);
            cv.draw_line(f.x0 - 4, y, f.x0, y, palette::axis);
            cv.draw_line(f.x0 + 1, y, f.x1, y, palette::grid);
            const std::string lbl = format_number(v);
            cv.draw_text(f.x0 - 8 - Canvas::text_width(lbl), y - 3, lbl, palette::axis);
        }
    }
    if (!ax.y_title.empty())
        cv.draw_text_vertical(18, (f.y0 + f.y1) / 2 + Canvas::text_width(ax.y_title) / 2,
                              ax.y_title, palette::axis);
}

inline void draw_x_axis_line(Canvas& cv, const Frame& f) {
    cv.draw_line(f.x0, f.y1, f.x1, f.y1, palette::axis);
}

inline void draw_x_title(Canvas& cv, const Frame& f, const std::string& title) {
    if (title.empty()) return;
    cv.draw_text((f.x0 + f.x1) / 2 - Canvas::text_width(title) / 2, f.y1 + 36, title,
                 palette::axis);
}

// centers of n category slots
inline std::vector<int> category_centers(const Frame& f, std::size_t n) {
    std::vector<int> cs(n);
    const double w = static_cast<double>(f.x1 - f.x0) / n;
    for (std::size_t i = 0; i < n; ++i)
        cs[i] = f.x0 + static_cast<int>(std::lround((i + 0.5) * w));
    return cs;
}

inline void draw_category_labels(Canvas& cv, const Frame& f,
                                 const std::vector<std::string>& cats, int every = 1,
                                 std::size_t trunc = 0) {
    const auto cs = category_centers(f, cats.size());
    for (std::size_t i = 0; i < cats.size(); ++i) {
        if (i % every != 0) continue;
        std::string lbl = cats[i];
        if (trunc > 0 && lbl.size() > trunc) lbl = lbl.substr(0, trunc);
        cv.draw_text(cs[i] - Canvas::text_width(lbl) / 2, f.y1 + 8, lbl, palette::axis);
    }
}

// two-row staggered labels for wide category names
inline void draw_category_labels_staggered(Canvas& cv, const Frame& f,
                                           const std::vector<std::string>& cats) {
    const auto cs = category_centers(f, cats.size());
    for (std::size_t i = 0; i < cats.size(); ++i) {
        const int y = f.y1 + 8 + (i % 2) * 12;
        cv.draw_text(cs[i] - Canvas::text_width(cats[i]) / 2, y, cats[i], palette::axis);
    }
}

inline void draw_legend(Canvas& cv, const std::vector<std::string>& names,
                        const std::vector<Color>& colors, int x = 645, int y = 80) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        cv.fill_rect(x, y + static_cast<int>(i) * 18, 12, 12, colors[i % colors.size()]);
        cv.draw_text(x + 18, y + static_cast<int>(i) * 18 + 2, names[i], palette::black);
    }
}

inline void annotate(Canvas& cv, int x, int y, double v) {
    const std::string s = format_number(v);
    cv.draw_text(x - Canvas::text_width(s) / 2, y, s, palette::black);
}

}  // namespace render_detail

// ---------------------------------------------------------------------------
// Per-type renderers
// ---------------------------------------------------------------------------

namespace render_detail {

inline void render_line_like(Canvas& cv, const ChartInstance& c, const RenderOptions& opts, bool fill_area) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);

    const auto& v = c.series.at(0).values;
    const auto cs = category_centers(f, v.size());
    const Color col = palette::series()[0];
    if (fill_area) {
        std::vector<std::pair<double, double>> poly;
        for (std::size_t i = 0; i < v.size(); ++i)
            poly.emplace_back(cs[i], f.py(v[i]));
        poly.emplace_back(cs.back(), f.y1);
        poly.emplace_back(cs.front(), f.y1);
        Color light = col;
        light.r = static_cast<std::uint8_t>((col.r + 510) / 3);
        light.g = static_cast<std::uint8_t>((col.g + 510) / 3);
        light.b = static_cast<std::uint8_t>((col.b + 510) / 3);
        cv.fill_polygon(poly, light);
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        cv.draw_line(cs[i], f.py(v[i]), cs[i + 1], f.py(v[i + 1]), col, 2);
    const int ann_every = v.size() > 14 ? 2 : 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        cv.fill_circle(cs[i], f.py(v[i]), 3, col);
        if (opts.show_value_labels && i % ann_every == 0)
            annotate(cv, cs[i], f.py(v[i]) - 14, v[i]);
    }
    if (v.size() <= 12)
        draw_category_labels(cv, f, c.categories, 1, 3);
    else
        draw_category_labels(cv, f, c.categories, 3, 8);
}

inline void render_bar(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);

    const auto& v = c.series.at(0).values;
    const auto cs = category_centers(f, v.size());
    const int bw = static_cast<int>(0.6 * (f.x1 - f.x0) / v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int top = f.py(v[i]);
        cv.fill_rect(cs[i] - bw / 2, top, bw, f.y1 - top, palette::series()[0]);
        if (opts.show_value_labels) annotate(cv, cs[i], top - 12, v[i]);
    }
    draw_category_labels_staggered(cv, f, c.categories);
}

inline void render_stacked_bar(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);

    const std::size_t n = c.categories.size();
    const auto cs = category_centers(f, n);
    const int bw = static_cast<int>(0.6 * (f.x1 - f.x0) / n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (std::size_t s = 0; s < c.series.size(); ++s) {
            const double v = c.series[s].values[i];
            const int y_lo = f.py(acc);
            const int y_hi = f.py(acc + v);
            cv.fill_rect(cs[i] - bw / 2, y_hi, bw, y_lo - y_hi,
                         palette::series()[s % palette::series().size()]);
            if (opts.show_value_labels && y_lo - y_hi >= 12)
                annotate(cv, cs[i], (y_lo + y_hi) / 2 - 3, v);
            acc += v;
        }
    }
    draw_category_labels_staggered(cv, f, c.categories);
    std::vector<std::string> names;
    for (const auto& s : c.series) names.push_back(s.name);
    draw_legend(cv, names, palette::series());
}

inline void render_pie(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    draw_title(cv, c.title);
    const int cx = 330, cy = 300, r = 180;
    const auto& v = c.series.at(0).values;
    double total = 0;
    for (double x : v) total += x;
    double ang = -1.5707963267948966;  // start at 12 o'clock
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double sweep = v[i] / total * 6.283185307179586;
        std::vector<std::pair<double, double>> poly{{static_cast<double>(cx), static_cast<double>(cy)}};
        const int steps = std::max(3, static_cast<int>(sweep / 0.03));
        for (int k = 0; k <= steps; ++k) {
            const double a = ang + sweep * k / steps;
            poly.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
        }
        cv.fill_polygon(poly, palette::series()[i % palette::series().size()]);
        const double mid = ang + sweep / 2;
        const int lx = cx + static_cast<int>((r + 16) * std::cos(mid));
        const int ly = cy + static_cast<int>((r + 16) * std::sin(mid));
        const std::string lbl = opts.show_value_labels
                                    ? c.categories[i] + " " + format_number(v[i]) + "%"
                                    : c.categories[i];
        cv.draw_text(std::cos(mid) < 0 ? lx - Canvas::text_width(lbl) : lx, ly - 3, lbl,
                     palette::black);
        ang += sweep;
    }
    std::vector<std::string> names(c.categories.begin(), c.categories.end());
    draw_legend(cv, names, palette::series());
}

inline void render_histogram(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);

    const auto& v = c.series.at(0).values;
    const std::size_t n = v.size();
    const double bw = static_cast<double>(f.x1 - f.x0) / n;
    for (std::size_t i = 0; i < n; ++i) {
        const int xl = f.x0 + static_cast<int>(i * bw) + 1;
        const int xr = f.x0 + static_cast<int>((i + 1) * bw) - 1;
        const int top = f.py(v[i]);
        cv.fill_rect(xl, top, xr - xl, f.y1 - top, palette::series()[0]);
        if (opts.show_value_labels) annotate(cv, (xl + xr) / 2, top - 12, v[i]);
    }
    // numeric edge labels
    for (std::size_t i = 0; i <= n; ++i) {
        const int x = f.x0 + static_cast<int>(i * bw);
        const double edge = c.axis.x_min + i * c.axis.x_tick_step;
        const std::string lbl = format_number(edge);
        cv.draw_line(x, f.y1, x, f.y1 + 4, palette::axis);
        cv.draw_text(x - Canvas::text_width(lbl) / 2, f.y1 + 8, lbl, palette::axis);
    }
}

inline void render_scatter(Canvas& cv, const ChartInstance& c, const RenderOptions& opts, bool bubble) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    f.vx0 = c.axis.x_min;
    f.vx1 = c.axis.x_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);
    if (c.axis.x_tick_step > 0) {
        for (double v = f.vx0; v <= f.vx1 + 1e-9; v += c.axis.x_tick_step) {
            const int x = f.px(v);
            cv.draw_line(x, f.y1, x, f.y1 + 4, palette::axis);
            const std::string lbl = format_number(v);
            cv.draw_text(x - Canvas::text_width(lbl) / 2, f.y1 + 8, lbl, palette::axis);
        }
    }
    double max_size = 1;
    for (const auto& p : c.points) max_size = std::max(max_size, p.size);
    for (const auto& p : c.points) {
        const int x = f.px(p.x), y = f.py(p.y);
        if (bubble) {
            const int r = 8 + static_cast<int>(20 * std::sqrt(p.size / max_size));
            Color col = palette::series()[0];
            col.a = 255;
            cv.fill_circle(x, y, r, col);
            cv.draw_circle(x, y, r, palette::black);
            if (!p.label.empty()) {
                cv.draw_text(x - Canvas::text_width(p.label) / 2, y - r - 22, p.label,
                             palette::black);
                if (opts.show_value_labels) annotate(cv, x, y - r - 10, p.size);
            }
        } else {
            cv.fill_circle(x, y, 3, palette::series()[0]);
        }
    }
    if (bubble)
        cv.draw_text(645, 80, "Size: " + c.axis.y_title.substr(0, 0) + "Annual Ridership",
                     palette::black);
}

inline void render_stacked_area(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    Frame f;
    f.vy0 = c.axis.y_min;
    f.vy1 = c.axis.y_max;
    draw_title(cv, c.title);
    draw_y_axis(cv, f, c.axis);
    draw_x_axis_line(cv, f);
    draw_x_title(cv, f, c.axis.x_title);

    const std::size_t n = c.categories.size();
    const auto cs = category_centers(f, n);
    std::vector<double> acc(n, 0.0);
    for (std::size_t s = 0; s < c.series.size(); ++s) {
        std::vector<double> top(n);
        for (std::size_t i = 0; i < n; ++i) top[i] = acc[i] + c.series[s].values[i];
        std::vector<std::pair<double, double>> poly;
        for (std::size_t i = 0; i < n; ++i) poly.emplace_back(cs[i], f.py(top[i]));
        for (std::size_t i = n; i-- > 0;) poly.emplace_back(cs[i], f.py(acc[i]));
        cv.fill_polygon(poly, palette::series()[s % palette::series().size()]);
        if (opts.show_value_labels)
            for (std::size_t i = 0; i < n; ++i)
                annotate(cv, cs[i], (f.py(top[i]) + f.py(acc[i])) / 2 - 3, c.series[s].values[i]);
        acc = top;
    }
    draw_category_labels(cv, f, c.categories);
    std::vector<std::string> names;
    for (const auto& s : c.series) names.push_back(s.name);
    draw_legend(cv, names, palette::series());
}

inline void render_choropleth(Canvas& cv, const ChartInstance& c) {
    draw_title(cv, c.title);
    const auto& states = domain::us_states();
    const auto& rates = c.series.at(0).values;
    const int tile = 56, ox = 60, oy = 70;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& st = states[i];
        // rates are aligned with c.categories (same order as us_states)
        std::size_t idx = 0;
        for (std::size_t k = 0; k < c.categories.size(); ++k)
            if (c.categories[k] == st.abbr) idx = k;
        const int band = ChoroplethBands::band_of(rates[idx]);
        const int x = ox + st.col * tile, y = oy + st.row * tile;
        cv.fill_rect(x, y, tile - 2, tile - 2, palette::sequential()[band]);
        cv.draw_rect(x, y, tile - 2, tile - 2, palette::axis);
        const Color txt = band >= 3 ? palette::white : palette::black;
        cv.draw_text(x + tile / 2 - Canvas::text_width(st.abbr) / 2, y + tile / 2 - 4, st.abbr,
                     txt);
    }
    // band legend
    const int ly = oy + 7 * tile + 16;
    cv.draw_text(ox, ly - 14, c.axis.y_title, palette::black);
    for (int b = 0; b < ChoroplethBands::count; ++b) {
        const int x = ox + b * 140;
        cv.fill_rect(x, ly, 14, 14, palette::sequential()[b]);
        cv.draw_rect(x, ly, 14, 14, palette::axis);
        cv.draw_text(x + 20, ly + 3, ChoroplethBands::band_label(b), palette::black);
    }
}

inline void render_treemap(Canvas& cv, const ChartInstance& c, const RenderOptions& opts) {
    draw_title(cv, c.title);
    const int x0 = 40, y0 = 60, x1 = 760, y1 = 560;
    double total = 0;
    for (const auto& g : c.groups)
        for (const auto& [_, v] : g.items) total += v;
    double gx = x0;
    for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
        const auto& g = c.groups[gi];
        double gsum = 0;
        for (const auto& [_, v] : g.items) gsum += v;
        const double gw = gsum / total * (x1 - x0);
        double iy = y0;
        for (std::size_t ii = 0; ii < g.items.size(); ++ii) {
            const auto& [label, value] = g.items[ii];
            const double ih = value / gsum * (y1 - y0);
            Color col = palette::series()[gi % palette::series().size()];
            // vary lightness within a category
            const double k = 0.75 + 0.25 * (ii % 2);
            col.r = static_cast<std::uint8_t>(std::min(255.0, col.r * k + 40 * (ii % 3)));
            col.g = static_cast<std::uint8_t>(std::min(255.0, col.g * k + 40 * (ii % 3)));
            col.b = static_cast<std::uint8_t>(std::min(255.0, col.b * k + 40 * (ii % 3)));
            cv.fill_rect(static_cast<int>(gx) + 1, static_cast<int>(iy) + 1,
                         static_cast<int>(gw) - 2, static_cast<int>(ih) - 2, col);
            cv.draw_rect(static_cast<int>(gx), static_cast<int>(iy), static_cast<int>(gw),
                         static_cast<int>(ih), palette::black);
            // every leaf keeps its label so entity names stay legible
            if (opts.show_value_labels && ih >= 22 && gw >= Canvas::text_width(label) + 8) {
                cv.draw_text(static_cast<int>(gx) + 4, static_cast<int>(iy) + 4, label,
                             palette::black);
                cv.draw_text(static_cast<int>(gx) + 4, static_cast<int>(iy) + 14,
                             format_number(value), palette::black);
            } else {
                cv.draw_text(static_cast<int>(gx) + 4, static_cast<int>(iy) + 2, label,
                             palette::black);
            }
            iy += ih;
        }
        // category header above its column
        const std::string hdr = g.category;
        cv.draw_text(static_cast<int>(gx + gw / 2) - Canvas::text_width(hdr) / 2, y0 - 14, hdr,
                     palette::black);
        gx += gw;
    }
}

}  // namespace render_detail

inline Canvas render_chart(const ChartInstance& c, const RenderOptions& opts = {}) {
    using namespace render_detail;
    if (opts.image_format != "PNG")
        throw RenderFailure("unsupported image format: " + opts.image_format);
    Canvas cv(opts.width, opts.height);
    try {
        switch (c.type) {
            case ChartType::Line: render_line_like(cv, c, opts, false); break;
            case ChartType::Area: render_line_like(cv, c, opts, true); break;
            case ChartType::Bar: render_bar(cv, c, opts); break;
            case ChartType::StackedBar:
            case ChartType::StackedBar100: render_stacked_bar(cv, c, opts); break;
            case ChartType::Pie: render_pie(cv, c, opts); break;
            case ChartType::Histogram: render_histogram(cv, c, opts); break;
            case ChartType::Scatterplot: render_scatter(cv, c, opts, false); break;
            case ChartType::Bubble: render_scatter(cv, c, opts, true); break;
            case ChartType::StackedArea: render_stacked_area(cv, c, opts); break;
            case ChartType::Choropleth: render_choropleth(cv, c); break;
            case ChartType::Treemap: render_treemap(cv, c, opts); break;
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw RenderFailure(std::string("render failed: ") + e.what());
    }
    return cv;
}

}  // namespace vlbench
