#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "vlbench/chartgen.hpp"
#include "vlbench/render/chart_render.hpp"
#include "vlbench/render/png.hpp"

using namespace vlbench;

namespace {

bool inventory_has(const Canvas& cv, const std::string& s) {
    const auto& inv = cv.text_inventory();
    return std::find(inv.begin(), inv.end(), s) != inv.end();
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

}  // namespace

TEST_CASE("every chart type renders to a valid 800x600 png") {
    for (ChartType t : kAllChartTypes) {
        const auto chart = generate_chart(t, 17);
        const auto cv = render_chart(chart);
        const auto png = encode_png(cv);
        REQUIRE(png.size() > 100);
        CHECK(looks_like_png(png));
        // IHDR width/height live at fixed offsets after the 8-byte signature
        CHECK(be32(png, 16) == 800);
        CHECK(be32(png, 20) == 600);
    }
}

TEST_CASE("png encoding is byte stable") {
    const auto chart = generate_chart(ChartType::Pie, 23);
    const auto a = encode_png(render_chart(chart));
    const auto b = encode_png(render_chart(chart));
    CHECK(a == b);
}

TEST_CASE("titles and category labels are drawn") {
    const auto chart = generate_chart(ChartType::Bar, 29);
    const auto cv = render_chart(chart);
    CHECK(inventory_has(cv, chart.title));
    for (const auto& cat : chart.categories) CHECK(inventory_has(cv, cat));
}

TEST_CASE("value labels stay off unless requested") {
    const auto chart = generate_chart(ChartType::Bar, 29);
    // pick a data value that cannot collide with an axis tick label
    std::string probe;
    for (double v : chart.series[0].values)
        if (std::fmod(v, 10.0) != 0.0) probe = format_number(v);
    REQUIRE(!probe.empty());

    const auto off = render_chart(chart);
    CHECK(!inventory_has(off, probe));

    RenderOptions opts;
    opts.show_value_labels = true;
    const auto on = render_chart(chart, opts);
    CHECK(inventory_has(on, probe));
}

TEST_CASE("decontextualized charts leak no original entity names") {
    const auto chart = decontextualize(generate_chart(ChartType::StackedBar, 37));
    const auto cv = render_chart(chart);
    for (const auto& text : cv.text_inventory()) {
        for (const auto& city : domain::kCities)
            CHECK(text.find(city) == std::string::npos);
        for (const auto& item : domain::kRoomServiceItems)
            CHECK(text.find(item) == std::string::npos);
    }
}

TEST_CASE("legend names appear for multi-series charts") {
    const auto chart = generate_chart(ChartType::StackedArea, 43);
    const auto cv = render_chart(chart);
    for (const auto& s : chart.series) CHECK(inventory_has(cv, s.name));
}
