#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlbench/common.hpp"
#include "vlbench/rng.hpp"

namespace vlbench {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

struct CatSeries {
    std::string name;
    std::vector<double> values;  // aligned with ChartInstance::categories
};

struct PointDatum {
    std::string label;  // empty for anonymous points (scatter)
    double x = 0.0;
    double y = 0.0;
    double size = 0.0;  // bubble radius driver; 0 for plain scatter
};

struct TreemapGroup {
    std::string category;
    std::vector<std::pair<std::string, double>> items;  // (leaf label, value)
};

struct AxisMeta {
    std::string x_title;
    std::string y_title;
    std::string unit;
    double y_min = 0.0;
    double y_max = 0.0;
    double tick_step = 0.0;    // axis tick spacing
    double value_step = 0.0;   // grid all generated values are snapped to
    double option_step = 0.0;  // distractor spacing for numeric options
    double x_min = 0.0;        // scatter/bubble only
    double x_max = 0.0;
    double x_tick_step = 0.0;
};

struct Entity {
    std::string label;
    std::string kind;  // City, Country, Company, Party, Name, Website, Category, Product
};

struct ChartInstance {
    ChartType type = ChartType::Line;
    std::uint64_t seed = 0;  // effective seed (after exclusion-driven bumps)
    std::string title;
    std::vector<std::string> categories;
    std::vector<CatSeries> series;
    std::vector<PointDatum> points;
    std::vector<TreemapGroup> groups;
    AxisMeta axis;
    std::vector<Entity> entities;
    ContextMode context_mode = ContextMode::Contextualized;
    json shaping = json::object();
    std::map<std::string, std::string> decontext_map;  // original -> generic

    const CatSeries& series_named(const std::string& name) const {
        for (const auto& s : series)
            if (s.name == name) return s;
        throw Error("no series named " + name);
    }

    double value_at(const std::string& series_name, const std::string& category) const {
        const auto& s = series_named(series_name);
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == category) return s.values[i];
        throw Error("no category " + category);
    }

    json to_json() const;
    static ChartInstance from_json(const json& j);

    // Canonical byte payload; identical payloads == identical charts.
    std::string payload() const { return to_json().dump(); }
};

struct GenerationConstraints {
    // Trend direction requests keyed by series name; "" targets the chart's
    // primary trend window (line: second half, area: first year, scatter and
    // bubble: overall slope sign).
    std::map<std::string, TrendDirection> trend;
    double unique_extremum_margin = 0.10;

    struct ClusterSpec {
        double cx = 0.0, cy = 0.0, radius = 0.0;
        int count = 0;
    };
    std::optional<ClusterSpec> cluster;

    struct AnomalySpec {
        double residual_multiple = 3.0;
    };
    std::optional<AnomalySpec> anomaly;

    double range_grid_alignment = 0.0;  // 0 = chart default value_step
    int max_attempts = 1000;
};

// ---------------------------------------------------------------------------
// Fixed entity domains (Table-2-style contexts; values are randomized, the
// label sets are not)
// ---------------------------------------------------------------------------

namespace domain {

inline const std::vector<std::string> kMonths = {
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December"};

inline const std::vector<std::string> kAsiaCountries = {
    "South Korea", "Japan", "China", "Singapore", "Thailand", "India", "Malaysia", "Vietnam"};

inline const std::vector<std::string> kCities = {
    "Las Vegas", "Seattle", "Boston", "New York City", "San Francisco", "Chicago"};

inline const std::vector<std::string> kRoomServiceItems = {"Sandwich", "Soda", "Water", "Peanuts"};

inline const std::vector<std::string> kEducationLevels = {
    "Less than High School", "High School Diploma", "Some College Degree",
    "Bachelor's Degree", "Postgraduate Study"};

inline const std::vector<std::string> kParties = {"Democrats", "Republicans", "Independents"};

inline const std::vector<std::string> kCompanies = {
    "Samsung", "Apple", "Huawei", "Xiaomi", "Lenovo", "Motorola"};

inline const std::vector<std::string> kBabyNames = {"Amelia", "Isla", "Olivia"};
inline const std::vector<std::string> kYears = {"2009", "2010", "2011", "2012", "2013", "2014"};

inline const std::vector<std::string> kMetroCities = {
    "Beijing", "Shanghai", "London", "New York City", "Paris", "Tokyo", "Moscow", "Seoul"};
inline const std::vector<std::string> kMetroExtraCities = {
    "Madrid", "Singapore", "Mexico City", "Osaka"};

inline const std::vector<std::string> kWebsites = {
    "Google", "Facebook", "YouTube", "Yahoo", "Wikipedia", "Amazon",
    "eBay", "Target", "Ask", "Bing", "Craigslist", "Twitter"};
inline const std::vector<std::string> kWebCategories = {"Computer", "Shopping", "Search"};

// 50 US state abbreviations with tile-grid positions (col, row) for the
// simplified map rendering.
struct StateTile {
    const char* abbr;
    const char* name;
    int col;
    int row;
};

inline const std::vector<StateTile>& us_states() {
    static const std::vector<StateTile> states = {
        {"AK", "Alaska", 0, 0},       {"ME", "Maine", 10, 0},
        {"VT", "Vermont", 9, 1},      {"NH", "New Hampshire", 10, 1},
        {"WA", "Washington", 0, 1},   {"ID", "Idaho", 1, 1},
        {"MT", "Montana", 2, 1},      {"ND", "North Dakota", 3, 1},
        {"MN", "Minnesota", 4, 1},    {"WI", "Wisconsin", 5, 1},
        {"MI", "Michigan", 7, 1},     {"NY", "New York", 8, 1},
        {"MA", "Massachusetts", 9, 2},{"OR", "Oregon", 0, 2},
        {"NV", "Nevada", 1, 2},       {"WY", "Wyoming", 2, 2},
        {"SD", "South Dakota", 3, 2}, {"IA", "Iowa", 4, 2},
        {"IL", "Illinois", 5, 2},     {"IN", "Indiana", 6, 2},
        {"OH", "Ohio", 7, 2},         {"PA", "Pennsylvania", 8, 2},
        {"NJ", "New Jersey", 9, 3},   {"CT", "Connecticut", 10, 2},
        {"RI", "Rhode Island", 10, 3},{"CA", "California", 0, 3},
        {"UT", "Utah", 1, 3},         {"CO", "Colorado", 2, 3},
        {"NE", "Nebraska", 3, 3},     {"MO", "Missouri", 4, 3},
        {"KY", "Kentucky", 5, 3},     {"WV", "West Virginia", 6, 3},
        {"VA", "Virginia", 7, 3},     {"MD", "Maryland", 8, 3},
        {"DE", "Delaware", 9, 4},     {"AZ", "Arizona", 1, 4},
        {"NM", "New Mexico", 2, 4},   {"KS", "Kansas", 3, 4},
        {"AR", "Arkansas", 4, 4},     {"TN", "Tennessee", 5, 4},
        {"NC", "North Carolina", 6, 4},{"SC", "South Carolina", 7, 4},
        {"OK", "Oklahoma", 3, 5},     {"LA", "Louisiana", 4, 5},
        {"MS", "Mississippi", 5, 5},  {"AL", "Alabama", 6, 5},
        {"GA", "Georgia", 7, 5},      {"HI", "Hawaii", 0, 6},
        {"TX", "Texas", 3, 6},        {"FL", "Florida", 8, 6},
    };
    return states;
}

inline std::vector<std::string> us_state_abbrs() {
    std::vector<std::string> v;
    for (const auto& s : us_states()) v.push_back(s.abbr);
    return v;
}

}  // namespace domain

// Unemployment-rate color bands used by the choropleth: 5 bands of 2% width.
struct ChoroplethBands {
    static constexpr double lo = 1.0;
    static constexpr double width = 2.0;
    static constexpr int count = 5;

    static int band_of(double rate) {
        int b = static_cast<int>(std::floor((rate - lo) / width));
        return std::clamp(b, 0, count - 1);
    }
    static double band_lo(int b) { return lo + b * width; }
    static double band_hi(int b) { return lo + (b + 1) * width; }
    static std::string band_label(int b) {
        return format_number(band_lo(b)) + "% - " + format_number(band_hi(b)) + "%";
    }
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

inline double snap(double v, double step) {
    if (step <= 0) return v;
    return std::round(v / step) * step;
}

inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

inline double least_squares_slope(const std::vector<double>& ys) {
    std::vector<double> xs(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) xs[i] = static_cast<double>(i);
    return least_squares_slope(xs, ys);
}

inline double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        dx += (xs[i] - mx) * (xs[i] - mx);
        dy += (ys[i] - my) * (ys[i] - my);
    }
    if (dx == 0 || dy == 0) return 0.0;
    return num / std::sqrt(dx * dy);
}

// Trend classification shared by generation and answer derivation.
inline TrendDirection classify_trend(const std::vector<double>& ys, double flat_threshold) {
    const double slope = least_squares_slope(ys);
    if (slope > flat_threshold) return TrendDirection::Increasing;
    if (slope < -flat_threshold) return TrendDirection::Decreasing;
    return TrendDirection::Constant;
}

namespace detail {

// Values with a unique maximum: top value beats the runner-up by at least
// `margin` relative gap.
inline std::vector<double> values_unique_max(Rng& rng, std::size_t n, double lo, double hi,
                                             double step, double margin, std::size_t max_idx) {
    std::vector<double> v(n);
    const double top = snap(rng.uniform(lo + 0.75 * (hi - lo), hi), step);
    const double cap = top * (1.0 - margin);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == max_idx) {
            v[i] = top;
        } else {
            v[i] = snap(rng.uniform(lo, std::min(hi, cap)), step);
            if (v[i] > cap) v[i] = snap(cap - step, step);
            if (v[i] < lo) v[i] = lo;
        }
    }
    return v;
}

// Noisy trend series: line with the requested slope sign, noise bounded to
// 30% of the total rise, all values snapped and kept inside [lo, hi].
inline std::vector<double> trend_series(Rng& rng, std::size_t n, double lo, double hi, double step,
                                        TrendDirection dir) {
    std::vector<double> v(n);
    const double span = hi - lo;
    double rise = rng.uniform(0.45 * span, 0.75 * span);
    if (dir == TrendDirection::Decreasing) rise = -rise;
    if (dir == TrendDirection::Constant) rise = 0.0;
    const double noise_amp =
        dir == TrendDirection::Constant ? 0.04 * span : 0.3 * std::abs(rise) / n;
    double start;
    if (dir == TrendDirection::Increasing)
        start = rng.uniform(lo, hi - rise);
    else if (dir == TrendDirection::Decreasing)
        start = rng.uniform(lo - rise, hi);
    else
        start = rng.uniform(lo + 0.2 * span, hi - 0.2 * span);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        double y = start + rise * t + rng.uniform(-noise_amp, noise_amp);
        v[i] = snap(std::clamp(y, lo, hi), step);
    }
    return v;
}

inline bool unique_max_ok(const std::vector<double>& v, double margin) {
    double m1 = -1e300, m2 = -1e300;
    for (double x : v) {
        if (x > m1) {
            m2 = m1;
            m1 = x;
        } else if (x > m2) {
            m2 = x;
        }
    }
    return m1 > 0 ? (m1 - m2) / m1 >= margin : m1 - m2 > 0;
}

inline bool unique_min_ok(const std::vector<double>& v, double margin) {
    std::vector<double> neg;
    double m1 = 1e300, m2 = 1e300;
    for (double x : v) {
        if (x < m1) {
            m2 = m1;
            m1 = x;
        } else if (x < m2) {
            m2 = x;
        }
    }
    return m2 > 0 ? (m2 - m1) / m2 >= margin * 0.5 : m2 - m1 > 0;
}

inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[k]) k = i;
    return k;
}

inline std::size_t argmin(const std::vector<double>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[k]) k = i;
    return k;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline json ChartInstance::to_json() const {
    json j;
    j["chart_type"] = vlbench::to_string(type);
    j["seed"] = seed;
    j["title"] = title;
    j["categories"] = categories;
    j["series"] = json::array();
    for (const auto& s : series) j["series"].push_back({{"name", s.name}, {"values", s.values}});
    j["points"] = json::array();
    for (const auto& p : points)
        j["points"].push_back({{"label", p.label}, {"x", p.x}, {"y", p.y}, {"size", p.size}});
    j["groups"] = json::array();
    for (const auto& g : groups) {
        json items = json::array();
        for (const auto& [k, v] : g.items) items.push_back({{"label", k}, {"value", v}});
        j["groups"].push_back({{"category", g.category}, {"items", items}});
    }
    j["axis"] = {{"x_title", axis.x_title}, {"y_title", axis.y_title}, {"unit", axis.unit},
                 {"y_min", axis.y_min},     {"y_max", axis.y_max},     {"tick_step", axis.tick_step},
                 {"value_step", axis.value_step}, {"option_step", axis.option_step},
                 {"x_min", axis.x_min},     {"x_max", axis.x_max},     {"x_tick_step", axis.x_tick_step}};
    j["entities"] = json::array();
    for (const auto& e : entities) j["entities"].push_back({{"label", e.label}, {"kind", e.kind}});
    j["context_mode"] = vlbench::to_string(context_mode);
    j["shaping"] = shaping;
    j["decontext_map"] = decontext_map;
    return j;
}

inline ChartInstance ChartInstance::from_json(const json& j) {
    ChartInstance c;
    c.type = chart_type_from_string(j.at("chart_type").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.title = j.at("title").get<std::string>();
    c.categories = j.at("categories").get<std::vector<std::string>>();
    for (const auto& s : j.at("series"))
        c.series.push_back({s.at("name").get<std::string>(), s.at("values").get<std::vector<double>>()});
    for (const auto& p : j.at("points"))
        c.points.push_back({p.at("label").get<std::string>(), p.at("x").get<double>(),
                            p.at("y").get<double>(), p.at("size").get<double>()});
    for (const auto& g : j.at("groups")) {
        TreemapGroup tg;
        tg.category = g.at("category").get<std::string>();
        for (const auto& it : g.at("items"))
            tg.items.emplace_back(it.at("label").get<std::string>(), it.at("value").get<double>());
        c.groups.push_back(std::move(tg));
    }
    const auto& a = j.at("axis");
    c.axis = {a.at("x_title"), a.at("y_title"), a.at("unit"),      a.at("y_min"),
              a.at("y_max"),   a.at("tick_step"), a.at("value_step"), a.at("option_step"),
              a.at("x_min"),   a.at("x_max"),   a.at("x_tick_step")};
    for (const auto& e : j.at("entities"))
        c.entities.push_back({e.at("label").get<std::string>(), e.at("kind").get<std::string>()});
    c.context_mode = context_mode_from_string(j.at("context_mode").get<std::string>());
    c.shaping = j.at("shaping");
    c.decontext_map = j.at("decontext_map").get<std::map<std::string, std::string>>();
    return c;
}

// ---------------------------------------------------------------------------
// Per-chart generators (single attempt each; generate_chart wraps them in a
// verify-and-retry loop)
// ---------------------------------------------------------------------------

namespace gen {

inline void add_entities(ChartInstance& c, const std::vector<std::string>& labels,
                         const std::string& kind) {
    for (const auto& l : labels) c.entities.push_back({l, kind});
}

inline TrendDirection pick_trend(Rng& rng, const GenerationConstraints& gc,
                                 const std::string& key, bool allow_constant) {
    auto it = gc.trend.find(key);
    if (it != gc.trend.end()) return it->second;
    const int n = allow_constant ? 3 : 2;
    switch (rng.uniform_int(static_cast<std::uint64_t>(n))) {
        case 0: return TrendDirection::Increasing;
        case 1: return TrendDirection::Decreasing;
        default: return TrendDirection::Constant;
    }
}

inline ChartInstance line_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Line;
    c.title = "Price of a Barrel of Oil in 2015";
    c.categories = domain::kMonths;
    c.axis = {"Month", "Price of a Barrel of Oil (US$)", "US$", 0, 100, 10, 1, 5, 0, 0, 0};
    add_entities(c, {"Oil"}, "Product");

    const TrendDirection dir = pick_trend(rng, gc, "", true);
    std::vector<double> v(12);
    // first half: bounded random walk
    v[0] = snap(rng.uniform(35, 65), 1);
    for (int i = 1; i < 6; ++i)
        v[i] = snap(std::clamp(v[i - 1] + rng.uniform(-8, 8), 25.0, 85.0), 1);
    const auto second = detail::trend_series(rng, 6, 25, 85, 1, dir);
    for (int i = 0; i < 6; ++i) v[6 + i] = second[i];

    // June -> September rise kept positive and clean (Make Comparisons stem)
    if (v[8] - v[5] < 4) return {};  // caller retries
    // unique minimum month
    const auto mn = detail::argmin(v);
    if (!detail::unique_min_ok(v, gc.unique_extremum_margin)) return {};
    // second-half trend must classify as requested
    const std::vector<double> half(v.begin() + 6, v.end());
    if (classify_trend(half, 0.8) != dir) return {};

    const double align = gc.range_grid_alignment > 0 ? gc.range_grid_alignment : 1.0;
    const auto mx = detail::argmax(v);
    v[mn] = snap(v[mn], align);
    v[mx] = snap(v[mx], align);

    c.series.push_back({"Oil", v});
    c.shaping["trend_second_half"] = vlbench::to_string(dir);
    c.shaping["min_month"] = c.categories[mn];
    return c;
}

inline ChartInstance bar_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Bar;
    c.title = "Average Internet Speeds in Asia";
    c.categories = domain::kAsiaCountries;
    c.axis = {"Country", "Average Internet Speed (Mbps)", "Mbps", 0, 60, 10, 1, 5, 0, 0, 0};
    add_entities(c, domain::kAsiaCountries, "Country");

    const std::size_t n = c.categories.size();
    const std::size_t max_idx = rng.uniform_int(n);
    auto v = detail::values_unique_max(rng, n, 12, 52, 1, gc.unique_extremum_margin, max_idx);
    if (!detail::unique_max_ok(v, gc.unique_extremum_margin)) return {};

    // "slower than South Korea" must have a clean count: no ties with SK, and
    // the count must not be 0 or n-1 so distractors fit the domain
    const double sk = v[0];
    int slower = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(v[i] - sk) < 1) return {};
        if (v[i] < sk) ++slower;
    }
    if (slower < 2 || slower > static_cast<int>(n) - 3) return {};

    const double align = gc.range_grid_alignment > 0 ? gc.range_grid_alignment : 1.0;
    v[detail::argmin(v)] = snap(v[detail::argmin(v)], align);
    v[detail::argmax(v)] = snap(v[detail::argmax(v)], align);

    c.series.push_back({"Internet Speed", v});
    return c;
}

inline ChartInstance stacked_bar_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::StackedBar;
    c.title = "Room Service Costs in Cities";
    c.categories = domain::kCities;
    c.axis = {"City", "Cost (US$)", "US$", 0, 30, 5, 0.5, 0.5, 0, 0, 0};
    add_entities(c, domain::kCities, "City");
    add_entities(c, domain::kRoomServiceItems, "Product");

    const std::size_t n = c.categories.size();
    for (const auto& item : domain::kRoomServiceItems) {
        CatSeries s{item, {}};
        for (std::size_t i = 0; i < n; ++i) s.values.push_back(snap(rng.uniform(1.0, 8.0), 0.5));
        c.series.push_back(std::move(s));
    }
    auto& soda = c.series[1].values;
    if (!detail::unique_max_ok(soda, gc.unique_extremum_margin)) {
        const std::size_t mi = rng.uniform_int(n);
        soda = detail::values_unique_max(rng, n, 1.5, 8.0, 0.5, gc.unique_extremum_margin, mi);
    }
    if (!detail::unique_max_ok(soda, gc.unique_extremum_margin)) return {};

    // Boston vs New York City water comparison needs a margin
    const auto& water = c.series[2].values;
    const double wb = water[2], wn = water[3];
    if (std::abs(wb - wn) < 1.0) return {};

    // peanuts/water ratio comparison between Las Vegas and San Francisco
    const auto& peanuts = c.series[3].values;
    const double r_lv = peanuts[0] / water[0];
    const double r_sf = peanuts[4] / water[4];
    if (std::abs(r_lv - r_sf) < 0.15 * std::max(r_lv, r_sf)) return {};

    c.shaping["water_boston_gt_nyc"] = wb > wn;
    c.shaping["peanut_water_ratio_lv_gt_sf"] = r_lv > r_sf;
    return c;
}

inline ChartInstance stacked_bar_100_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::StackedBar100;
    c.title = "Approval Ratings by Education Level";
    c.categories = domain::kEducationLevels;
    c.axis = {"Education Level", "Approval Rating (%)", "%", 0, 100, 20, 1, 5, 0, 0, 0};
    add_entities(c, domain::kParties, "Party");

    const std::size_t n = c.categories.size();
    for (const auto& p : domain::kParties) c.series.push_back({p, std::vector<double>(n, 0.0)});
    for (std::size_t i = 0; i < n; ++i) {
        // integer shares summing to exactly 100, each at least 10
        int a = static_cast<int>(rng.uniform_int(10, 60));
        int b = static_cast<int>(rng.uniform_int(10, 90 - a));
        int d = 100 - a - b;
        if (d < 10) return {};
        c.series[0].values[i] = a;  // Democrats
        c.series[1].values[i] = b;  // Republicans
        c.series[2].values[i] = d;  // Independents
    }
    // Democrats must have a unique minimum education level
    if (!detail::unique_min_ok(c.series[0].values, gc.unique_extremum_margin)) return {};
    // Republicans: Some College Degree vs Postgraduate Study margin
    const double rep_sc = c.series[1].values[2];
    const double rep_pg = c.series[1].values[4];
    if (std::abs(rep_sc - rep_pg) < 5) return {};
    c.shaping["rep_some_college_lt_postgrad"] = rep_sc < rep_pg;
    return c;
}

inline ChartInstance pie_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Pie;
    c.title = "Global Smartphone Market Share";
    c.categories = domain::kCompanies;
    c.axis = {"", "Market Share (%)", "%", 0, 100, 0, 1, 5, 0, 0, 0};
    add_entities(c, domain::kCompanies, "Company");

    const std::size_t n = c.categories.size();
    std::vector<double> v(n);
    int remaining = 100;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const int hi = remaining - 5 * static_cast<int>(n - 1 - i);
        const int x = static_cast<int>(rng.uniform_int(5, std::max(5, hi - 5)));
        v[i] = x;
        remaining -= x;
    }
    v[n - 1] = remaining;
    if (remaining < 5 || remaining > 60) return {};
    if (!detail::unique_min_ok(v, gc.unique_extremum_margin)) return {};
    // Lenovo (idx 4) vs Samsung (idx 0) margin
    if (std::abs(v[4] - v[0]) < 5) return {};
    c.series.push_back({"Market Share", v});
    c.shaping["lenovo_gt_samsung"] = v[4] > v[0];
    return c;
}

inline ChartInstance histogram_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Histogram;
    c.title = "Taxi Passenger Ratings";
    c.categories = {"4.0 - 4.2", "4.2 - 4.4", "4.4 - 4.6", "4.6 - 4.8", "4.8 - 5.0"};
    c.axis = {"Rating", "Number of Ratings", "", 0, 30, 5, 1, 2, 4.0, 5.0, 0.2};

    std::vector<double> v(5);
    for (auto& x : v) x = static_cast<double>(rng.uniform_int(3, 26));
    if (!detail::unique_max_ok(v, gc.unique_extremum_margin)) return {};
    // bins 4.6-4.8 vs 4.2-4.4 need a margin for the comparison item
    if (std::abs(v[3] - v[1]) < 2) return {};
    c.series.push_back({"Ratings", v});
    c.shaping["mode_bin"] = static_cast<int>(detail::argmax(v));
    c.shaping["cmp_46_48_gt_42_44"] = v[3] > v[1];
    return c;
}

inline ChartInstance scatterplot_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Scatterplot;
    c.title = "Heights and Weights of 85 Males";
    c.axis = {"Height (cm)", "Weight (kg)", "kg", 45, 95, 10, 1, 5, 158, 192, 5};

    const bool negative = [&] {
        auto it = gc.trend.find("");
        if (it != gc.trend.end()) return it->second == TrendDirection::Decreasing;
        return rng.bernoulli();
    }();
    const double slope = (negative ? -1 : 1) * rng.uniform(0.6, 1.0);
    const double h_mid = 175.0;
    const double w_mid = rng.uniform(66, 74);
    auto on_line = [&](double h) { return w_mid + slope * (h - h_mid); };

    const int n_total = 85;
    std::vector<PointDatum> pts;

    // one retrievable person at exactly 165.1 cm
    pts.push_back({"", 165.1, snap(std::clamp(on_line(165.1) + rng.uniform(-4, 4), 48.0, 92.0), 1), 0});
    // unique tallest, clear of the rest
    const double tallest_h = snap(rng.uniform(189.0, 191.5), 0.1);
    pts.push_back({"", tallest_h, snap(std::clamp(on_line(tallest_h) + rng.uniform(-4, 4), 48.0, 92.0), 1), 0});
    // three points at exactly 188 cm; identical weights or not decides the
    // Make Comparisons truth
    const bool same_at_188 = rng.bernoulli();
    const double w188 = snap(std::clamp(on_line(188.0) + rng.uniform(-3, 3), 48.0, 92.0), 1);
    for (int i = 0; i < 3; ++i) {
        double w = same_at_188 ? w188
                               : snap(std::clamp(w188 + (i - 1) * rng.uniform(3, 6), 48.0, 92.0), 1);
        pts.push_back({"", 188.0, w, 0});
    }
    if (!same_at_188 && (pts[2].y == pts[3].y || pts[3].y == pts[4].y || pts[2].y == pts[4].y))
        return {};

    // cluster: planted either at the asked-about center or elsewhere
    GenerationConstraints::ClusterSpec cl;
    if (gc.cluster) {
        cl = *gc.cluster;
    } else {
        const bool at_asked = rng.bernoulli();
        cl.cx = at_asked ? 176.0 : (negative ? 181.0 : 166.0);
        cl.cy = at_asked ? 70.0 : snap(on_line(cl.cx), 1);
        if (at_asked && std::abs(on_line(176.0) - 70.0) > 8) return {};
        cl.radius = 2.5;
        cl.count = 12;
    }
    for (int i = 0; i < cl.count; ++i) {
        const double ang = rng.uniform(0, 6.2831853);
        const double rad = rng.uniform(0, cl.radius);
        pts.push_back({"", snap(cl.cx + rad * std::cos(ang), 0.1),
                       snap(std::clamp(cl.cy + 1.2 * rad * std::sin(ang), 48.0, 92.0), 1), 0});
    }

    // bulk points along the line
    while (static_cast<int>(pts.size()) < n_total - 1) {
        const double h = snap(rng.uniform(160.0, 187.0), 0.1);
        if (std::abs(h - 165.1) < 0.05) continue;
        pts.push_back({"", h, snap(std::clamp(on_line(h) + rng.uniform(-5, 5), 48.0, 92.0), 1), 0});
    }

    // anomaly: one point far off the fitted line
    const double mult = gc.anomaly ? gc.anomaly->residual_multiple : 3.0;
    if (mult <= 1.0) throw IncompatibleConstraint("anomaly residual multiple must exceed 1");
    const double anom_h = snap(rng.uniform(162.0, 186.0), 0.1);
    const double off = (negative ? 1 : -1) * rng.uniform(22, 28);
    pts.push_back({"", anom_h, snap(std::clamp(on_line(anom_h) + off, 20.0, 110.0), 1), 0});

    // verify: single point at 165.1, unique tallest, anomaly dominance
    int at_1651 = 0;
    for (const auto& p : pts)
        if (std::abs(p.x - 165.1) < 0.05) ++at_1651;
    if (at_1651 != 1) return {};
    double h1 = -1e9, h2 = -1e9;
    for (const auto& p : pts) {
        if (p.x > h1) {
            h2 = h1;
            h1 = p.x;
        } else if (p.x > h2) {
            h2 = p.x;
        }
    }
    if (h1 - h2 < 1.0) return {};
    // anomaly height must be unique so the answer is unambiguous
    int at_anom_h = 0;
    for (const auto& p : pts)
        if (std::abs(p.x - anom_h) < 0.05) ++at_anom_h;
    if (at_anom_h != 1) return {};

    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const double b = least_squares_slope(xs, ys);
    const double a = [&] {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        return my / ys.size() - b * mx / xs.size();
    }();
    std::vector<double> resid;
    for (const auto& p : pts) resid.push_back(std::abs(p.y - (a + b * p.x)));
    std::size_t anom_idx = detail::argmax(resid);
    double r1 = resid[anom_idx], r2 = 0;
    for (std::size_t i = 0; i < resid.size(); ++i)
        if (i != anom_idx && resid[i] > r2) r2 = resid[i];
    if (std::abs(pts[anom_idx].x - anom_h) > 0.05) return {};
    if (r1 < mult * r2) return {};
    if ((b < 0) != negative) return {};
    if (std::abs(pearson_correlation(xs, ys)) < 0.4) return {};

    c.points = std::move(pts);
    c.shaping["negative_trend"] = negative;
    c.shaping["same_weight_at_188"] = same_at_188;
    c.shaping["cluster_cx"] = cl.cx;
    c.shaping["cluster_cy"] = cl.cy;
    c.shaping["anomaly_height"] = anom_h;
    c.shaping["retrieval_height"] = 165.1;
    return c;
}

inline ChartInstance area_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Area;
    c.title = "Average Price of a Pound of Coffee Beans";
    for (const auto& y : {"2013", "2014"})
        for (const auto& m : {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct",
                              "Nov", "Dec"})
            c.categories.push_back(std::string(m) + " " + y);
    c.axis = {"Month", "Average Price (US$ per pound)", "US$", 0, 8, 1, 0.1, 0.5, 0, 0, 0};
    add_entities(c, {"Coffee Beans"}, "Product");

    const TrendDirection dir = pick_trend(rng, gc, "", true);
    auto first = detail::trend_series(rng, 12, 3.2, 6.8, 0.1, dir);
    std::vector<double> v = first;
    double prev = v.back();
    for (int i = 0; i < 12; ++i) {
        prev = snap(std::clamp(prev + rng.uniform(-0.4, 0.4), 3.0, 7.0), 0.1);
        v.push_back(prev);
    }
    if (classify_trend(first, 0.02) != dir) return {};
    if (!detail::unique_min_ok(v, 0.05)) return {};
    const auto mn = detail::argmin(v);
    // minimum month must be unique by a visible gap
    double m2 = 1e9;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != mn && v[i] < m2) m2 = v[i];
    if (m2 - v[mn] < 0.2) return {};

    const double align = gc.range_grid_alignment > 0 ? gc.range_grid_alignment : 0.1;
    v[detail::argmax(v)] = snap(v[detail::argmax(v)], align);
    v[mn] = snap(v[mn], align);

    c.series.push_back({"Coffee Beans", v});
    c.shaping["trend_2013"] = vlbench::to_string(dir);
    c.shaping["min_month"] = c.categories[mn];
    return c;
}

inline ChartInstance stacked_area_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::StackedArea;
    c.title = "Number of Girls Named Amelia, Isla, and Olivia in the UK";
    c.categories = domain::kYears;
    c.axis = {"Year", "Number of Girls", "", 0, 30000, 5000, 100, 500, 0, 0, 0};
    add_entities(c, domain::kBabyNames, "Name");

    const std::size_t n = c.categories.size();
    // Amelia: unique max year
    const std::size_t amelia_max_year = rng.uniform_int(n);
    auto amelia =
        detail::values_unique_max(rng, n, 1500, 8500, 100, gc.unique_extremum_margin, amelia_max_year);
    if (!detail::unique_max_ok(amelia, gc.unique_extremum_margin)) return {};
    // 2014 vs 2013 needs a margin
    if (std::abs(amelia[5] - amelia[4]) < 300) return {};

    // Isla: requested/random trend over 2009-2012, and a clean 2014 ratio to Amelia
    const TrendDirection isla_dir = pick_trend(rng, gc, "Isla", true);
    auto isla = detail::trend_series(rng, n, 1500, 8500, 100, isla_dir);
    const std::vector<double> isla_09_12(isla.begin(), isla.begin() + 4);
    if (classify_trend(isla_09_12, 120) != isla_dir) return {};
    // force an exact half-step ratio Amelia/Isla in 2014
    const double ratio = 0.5 * rng.uniform_int(1, 6);  // 0.5 .. 3.0
    double isla_2014 = snap(rng.uniform(1500, 4000), 200);
    double amelia_2014 = ratio * isla_2014;
    if (amelia_2014 < 1000 || amelia_2014 > 9000) return {};
    isla[5] = isla_2014;
    amelia[5] = amelia_2014;
    if (std::abs(amelia[5] - amelia[4]) < 300) return {};
    if (amelia[amelia_max_year] <= amelia[5] && amelia_max_year != 5) return {};
    if (!detail::unique_max_ok(amelia, gc.unique_extremum_margin)) return {};
    const std::vector<double> isla_check(isla.begin(), isla.begin() + 4);
    if (classify_trend(isla_check, 120) != isla_dir) return {};

    // Olivia: either dominated by Isla every year or beating it at least once
    const bool isla_always_more = rng.bernoulli();
    std::vector<double> olivia(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (isla_always_more) {
            if (isla[i] - 200 < 800) return {};
            olivia[i] = snap(rng.uniform(700, isla[i] - 200), 100);
        } else {
            olivia[i] = snap(rng.uniform(700, 8500), 100);
        }
        if (std::abs(olivia[i] - isla[i]) < 200) return {};
    }
    if (!isla_always_more) {
        bool beats = false;
        for (std::size_t i = 0; i < n; ++i) beats |= olivia[i] > isla[i];
        if (!beats) return {};
    }

    c.series.push_back({"Amelia", amelia});
    c.series.push_back({"Isla", isla});
    c.series.push_back({"Olivia", olivia});
    c.shaping["isla_trend_09_12"] = vlbench::to_string(isla_dir);
    c.shaping["amelia_ratio_2014"] = ratio;
    c.shaping["isla_always_more_than_olivia"] = isla_always_more;
    return c;
}

inline ChartInstance bubble_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Bubble;
    c.title = "Metro Systems of the World";
    c.axis = {"Number of Stations", "Total System Length (km)", "km", 0, 900, 100, 10, 50, 0, 550, 100};

    // length tracks stations so the anomaly task has a relationship to break;
    // the (200, 200) cluster statement stays consistent with slope ~1
    const double slope = rng.uniform(0.9, 1.15);
    auto on_line = [&](double st) { return slope * st; };

    std::vector<PointDatum> pts;
    std::vector<std::string> labels = domain::kMetroCities;

    const bool cluster_at_asked = gc.cluster ? false : rng.bernoulli();
    GenerationConstraints::ClusterSpec cl;
    if (gc.cluster) {
        cl = *gc.cluster;
    } else {
        cl.cx = cluster_at_asked ? 200.0 : 400.0;
        cl.cy = on_line(cl.cx);
        cl.radius = 25.0;
        cl.count = 4;
    }

    const std::size_t n_main = labels.size();
    const std::size_t max_idx = rng.uniform_int(n_main);
    const std::size_t anom_idx = (max_idx + 1 + rng.uniform_int(n_main - 1)) % n_main;
    const double mult = gc.anomaly ? gc.anomaly->residual_multiple : 3.0;
    if (mult <= 1.0) throw IncompatibleConstraint("anomaly residual multiple must exceed 1");

    const bool ridership_up = [&] {
        auto it = gc.trend.find("");
        if (it != gc.trend.end()) return it->second == TrendDirection::Increasing;
        return rng.bernoulli();
    }();

    for (std::size_t i = 0; i < n_main; ++i) {
        double st;
        if (i == max_idx)
            st = snap(rng.uniform(440, 520), 10);
        else
            st = snap(rng.uniform(80, 390), 10);
        double len = snap(std::clamp(on_line(st) + rng.uniform(-30, 30), 50.0, 850.0), 10);
        if (i == anom_idx)
            len = snap(std::clamp(on_line(st) + (rng.bernoulli() ? 1 : -1) * rng.uniform(180, 260),
                                  50.0, 850.0),
                       10);
        pts.push_back({labels[i], st, len, 0});
    }
    // cluster members drawn from the extra city pool
    for (int i = 0; i < cl.count; ++i) {
        const double st = snap(cl.cx + rng.uniform(-cl.radius, cl.radius), 10);
        const double len = snap(std::clamp(cl.cy + rng.uniform(-cl.radius, cl.radius), 50.0, 850.0), 10);
        pts.push_back({domain::kMetroExtraCities[i % domain::kMetroExtraCities.size()], st, len, 0});
    }

    // ridership: monotone-ish in stations with the chosen sign
    for (auto& p : pts) {
        const double base = 400 + (p.x - 50) / 470.0 * 2800;
        const double r = ridership_up ? base : 3600 - base;
        p.size = snap(std::clamp(r + rng.uniform(-250, 250), 300.0, 3500.0), 50);
    }

    // verify unique max stations
    std::vector<double> sts;
    for (const auto& p : pts) sts.push_back(p.x);
    const auto mi = detail::argmax(sts);
    if (pts[mi].label != labels[max_idx]) return {};
    double s2 = -1e9;
    for (std::size_t i = 0; i < sts.size(); ++i)
        if (i != mi && sts[i] > s2) s2 = sts[i];
    if ((sts[mi] - s2) / sts[mi] < gc.unique_extremum_margin) return {};

    // verify anomaly dominance on the stations/length fit
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const double b = least_squares_slope(xs, ys);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    const double a = my / ys.size() - b * mx / xs.size();
    std::vector<double> resid;
    for (const auto& p : pts) resid.push_back(std::abs(p.y - (a + b * p.x)));
    const auto ri = detail::argmax(resid);
    if (pts[ri].label != labels[anom_idx]) return {};
    double r2 = 0;
    for (std::size_t i = 0; i < resid.size(); ++i)
        if (i != ri && resid[i] > r2) r2 = resid[i];
    if (resid[ri] < mult * r2) return {};

    // verify ridership/stations correlation sign
    std::vector<double> rs;
    for (const auto& p : pts) rs.push_back(p.size);
    const double corr = pearson_correlation(xs, rs);
    if (std::abs(corr) < 0.5 || (corr > 0) != ridership_up) return {};

    // Paris vs New York City ridership margin
    double paris = 0, nyc = 0;
    for (const auto& p : pts) {
        if (p.label == "Paris") paris = p.size;
        if (p.label == "New York City") nyc = p.size;
    }
    if (std::abs(paris - nyc) < 200) return {};

    // Beijing's length is the retrieval target; keep it clear of others by a step
    double beijing = 0;
    for (const auto& p : pts)
        if (p.label == "Beijing") beijing = p.y;
    (void)beijing;

    const double align = gc.range_grid_alignment > 0 ? gc.range_grid_alignment : 10.0;
    auto lens_max = detail::argmax(ys);
    auto lens_min = detail::argmin(ys);
    pts[lens_max].y = snap(pts[lens_max].y, align);
    pts[lens_min].y = snap(pts[lens_min].y, align);

    for (const auto& p : pts) c.entities.push_back({p.label, "City"});
    c.points = std::move(pts);
    c.shaping["ridership_increases_with_stations"] = ridership_up;
    c.shaping["cluster_cx"] = cl.cx;
    c.shaping["cluster_cy"] = cl.cy;
    c.shaping["anomaly_city"] = labels[anom_idx];
    c.shaping["max_stations_city"] = labels[max_idx];
    c.shaping["paris_gt_nyc"] = paris > nyc;
    return c;
}

inline ChartInstance choropleth_chart(Rng& rng, const GenerationConstraints& gc) {
    (void)gc;
    ChartInstance c;
    c.type = ChartType::Choropleth;
    c.title = "Unemployment Rate by State in 2015";
    c.categories = domain::us_state_abbrs();
    c.axis = {"", "Unemployment Rate (%)", "%", ChoroplethBands::lo,
              ChoroplethBands::band_hi(ChoroplethBands::count - 1), ChoroplethBands::width, 0.1,
              0, 0, 0, 0};

    const std::size_t n = c.categories.size();
    std::vector<double> v(n);
    // exactly one state in the top band so the extremum reads off the colors
    const std::size_t top_idx = rng.uniform_int(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == top_idx)
            v[i] = snap(rng.uniform(9.2, 10.8), 0.1);
        else
            v[i] = snap(rng.uniform(1.2, 8.8), 0.1);
    }
    // Arizona vs Oklahoma must land in different bands, so the comparison is
    // resolvable from the color scale
    std::size_t az = 0, ok = 0, in_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (c.categories[i] == "AZ") az = i;
        if (c.categories[i] == "OK") ok = i;
        if (c.categories[i] == "IN") in_idx = i;
    }
    if (ChoroplethBands::band_of(v[az]) == ChoroplethBands::band_of(v[ok])) return {};
    c.series.push_back({"Unemployment Rate", v});
    c.shaping["top_state"] = c.categories[top_idx];
    c.shaping["az_gt_ok"] = v[az] > v[ok];
    c.shaping["indiana_band"] = ChoroplethBands::band_of(v[in_idx]);
    return c;
}

inline ChartInstance treemap_chart(Rng& rng, const GenerationConstraints& gc) {
    ChartInstance c;
    c.type = ChartType::Treemap;
    c.title = "Number of Unique Visitors to Websites in 2010";
    c.axis = {"", "Unique Visitors (millions)", "millions", 0, 1000, 0, 10, 50, 0, 0, 0};
    add_entities(c, domain::kWebCategories, "Category");
    add_entities(c, domain::kWebsites, "Website");

    // random category assignment; every category keeps at least two sites
    std::vector<int> assign(domain::kWebsites.size());
    for (auto& a : assign) a = static_cast<int>(rng.uniform_int(domain::kWebCategories.size()));
    std::array<int, 3> counts{};
    for (int a : assign) counts[a]++;
    for (int cnt : counts)
        if (cnt < 2) return {};

    std::vector<double> values(domain::kWebsites.size());
    const std::size_t max_idx = rng.uniform_int(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i == max_idx)
            values[i] = snap(rng.uniform(700, 950), 10);
        else
            values[i] = snap(rng.uniform(100, 600), 10);
    }
    if (!detail::unique_max_ok(values, gc.unique_extremum_margin)) return {};

    // Target vs Ask margin for the comparison item
    double target = 0, ask = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (domain::kWebsites[i] == "Target") target = values[i];
        if (domain::kWebsites[i] == "Ask") ask = values[i];
    }
    if (std::abs(target - ask) < 40) return {};

    for (std::size_t ci = 0; ci < domain::kWebCategories.size(); ++ci) {
        TreemapGroup g;
        g.category = domain::kWebCategories[ci];
        for (std::size_t i = 0; i < assign.size(); ++i)
            if (assign[i] == static_cast<int>(ci))
                g.items.emplace_back(domain::kWebsites[i], values[i]);
        c.groups.push_back(std::move(g));
    }
    std::string amazon_cat;
    for (std::size_t i = 0; i < assign.size(); ++i)
        if (domain::kWebsites[i] == "Amazon") amazon_cat = domain::kWebCategories[assign[i]];
    c.shaping["largest_site"] = domain::kWebsites[max_idx];
    c.shaping["target_gt_ask"] = target > ask;
    c.shaping["amazon_category"] = amazon_cat;
    return c;
}

}  // namespace gen

// ---------------------------------------------------------------------------
// Public generation API
// ---------------------------------------------------------------------------

inline void validate_constraints(ChartType type, const GenerationConstraints& gc) {
    const bool pointy = type == ChartType::Scatterplot || type == ChartType::Bubble;
    if (gc.cluster && !pointy)
        throw IncompatibleConstraint("cluster_spec only applies to scatterplot/bubble");
    if (gc.anomaly && !pointy)
        throw IncompatibleConstraint("anomaly_spec only applies to scatterplot/bubble");
    if (gc.anomaly && gc.anomaly->residual_multiple <= 1.0)
        throw IncompatibleConstraint("anomaly residual multiple must exceed 1");
    if (!gc.trend.empty()) {
        const bool trendable = type == ChartType::Line || type == ChartType::Area ||
                               type == ChartType::StackedArea || pointy;
        if (!trendable) throw IncompatibleConstraint("trend constraint not applicable to " + to_string(type));
    }
    if (gc.unique_extremum_margin <= 0)
        throw IncompatibleConstraint("unique_extremum_margin must be positive");
}

inline ChartInstance generate_chart(ChartType type, std::uint64_t seed,
                                    const GenerationConstraints& gc = {}) {
    validate_constraints(type, gc);
    for (int attempt = 0; attempt < gc.max_attempts; ++attempt) {
        Rng rng = Rng::derived(splitmix64(seed) ^ static_cast<std::uint64_t>(attempt),
                               "chartgen/" + to_string(type));
        ChartInstance c;
        switch (type) {
            case ChartType::Line: c = gen::line_chart(rng, gc); break;
            case ChartType::Bar: c = gen::bar_chart(rng, gc); break;
            case ChartType::StackedBar: c = gen::stacked_bar_chart(rng, gc); break;
            case ChartType::StackedBar100: c = gen::stacked_bar_100_chart(rng, gc); break;
            case ChartType::Pie: c = gen::pie_chart(rng, gc); break;
            case ChartType::Histogram: c = gen::histogram_chart(rng, gc); break;
            case ChartType::Scatterplot: c = gen::scatterplot_chart(rng, gc); break;
            case ChartType::Area: c = gen::area_chart(rng, gc); break;
            case ChartType::StackedArea: c = gen::stacked_area_chart(rng, gc); break;
            case ChartType::Bubble: c = gen::bubble_chart(rng, gc); break;
            case ChartType::Choropleth: c = gen::choropleth_chart(rng, gc); break;
            case ChartType::Treemap: c = gen::treemap_chart(rng, gc); break;
        }
        // an empty instance signals a failed attempt
        if (c.series.empty() && c.points.empty() && c.groups.empty()) continue;
        c.seed = seed;
        return c;
    }
    throw ConstraintUnsatisfiable("could not satisfy constraints for " + to_string(type) +
                                  " within " + std::to_string(gc.max_attempts) + " attempts");
}

// Regenerates with seed+1, seed+2, ... until the caller-supplied predicate
// accepts the instance (used for answer-exclusion lists).
inline ChartInstance generate_chart_accepted(
    ChartType type, std::uint64_t seed, const GenerationConstraints& gc,
    const std::function<bool(const ChartInstance&)>& accept, int max_seed_bumps = 1000) {
    for (int bump = 0; bump < max_seed_bumps; ++bump) {
        ChartInstance c = generate_chart(type, seed + static_cast<std::uint64_t>(bump), gc);
        if (!accept || accept(c)) return c;
    }
    throw ConstraintUnsatisfiable("no acceptable chart for " + to_string(type) + " after " +
                                  std::to_string(max_seed_bumps) + " seed bumps");
}

// ---------------------------------------------------------------------------
// Decontextualization
// ---------------------------------------------------------------------------

namespace detail {

inline void replace_all(std::string& s, const std::string& from, const std::string& to) {
    if (from.empty()) return;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace detail

inline ChartInstance decontextualize(const ChartInstance& instance) {
    switch (instance.type) {
        case ChartType::Histogram:
        case ChartType::Scatterplot:
        case ChartType::Choropleth:
            throw NotDecontextualizable(to_string(instance.type) +
                                        " cannot be decontextualized");
        default:
            break;
    }
    if (instance.context_mode == ContextMode::Decontextualized) return instance;

    ChartInstance c = instance;
    c.context_mode = ContextMode::Decontextualized;
    c.decontext_map.clear();

    std::map<std::string, int> kind_counter;
    for (auto& e : c.entities) {
        const int n = ++kind_counter[e.kind];
        std::string generic;
        if (e.kind == "Party")
            generic = std::string("Party ") + static_cast<char>('A' + n - 1);
        else
            generic = e.kind + " " + std::to_string(n);
        c.decontext_map[e.label] = generic;
    }

    auto remap = [&](std::string& s) {
        // longest-first so e.g. "New York City" wins over any shorter overlap
        std::vector<std::pair<std::string, std::string>> pairs(c.decontext_map.begin(),
                                                               c.decontext_map.end());
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
            return a.first.size() > b.first.size();
        });
        for (const auto& [from, to] : pairs) detail::replace_all(s, from, to);
    };

    remap(c.title);
    for (auto& cat : c.categories) remap(cat);
    for (auto& s : c.series) remap(s.name);
    for (auto& p : c.points) remap(p.label);
    for (auto& g : c.groups) {
        remap(g.category);
        for (auto& [label, value] : g.items) remap(label);
    }
    remap(c.axis.x_title);
    remap(c.axis.y_title);
    for (auto& [key, val] : c.shaping.items()) {
        if (val.is_string()) {
            std::string s = val.get<std::string>();
            remap(s);
            val = s;
        }
    }
    for (auto& e : c.entities) e.label = c.decontext_map.at(e.label);
    return c;
}

}  // namespace vlbench
