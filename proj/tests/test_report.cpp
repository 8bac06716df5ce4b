#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlbench/qbank.hpp"
#include "vlbench/render/png.hpp"
#include "vlbench/report.hpp"

using namespace vlbench;
namespace fs = std::filesystem;

namespace {

const ItemBank& bank() {
    static const ItemBank b = build_item_bank(700, ContextMode::Contextualized);
    return b;
}

ScoreRecord score_for(int tid, const std::string& model, bool correct) {
    const auto& q = bank().item_for(tid);
    ScoreRecord s;
    s.template_id = tid;
    s.chart_type = q.chart_type;
    s.task_type = q.task_type;
    s.condition = {true, true, ContextMode::Contextualized, model};
    s.correct = correct;
    return s;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

bool file_is_png(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return false;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return looks_like_png(bytes);
}

fs::path temp_dir() {
    const auto d = fs::temp_directory_path() / "vlbench_report_test";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("accuracy table tallies per item and model") {
    std::vector<ScoreRecord> scores;
    // item 1: model a 3/4, model b 1/4; item 13: model a 1/2
    for (int i = 0; i < 4; ++i) scores.push_back(score_for(1, "a", i < 3));
    for (int i = 0; i < 4; ++i) scores.push_back(score_for(1, "b", i < 1));
    for (int i = 0; i < 2; ++i) scores.push_back(score_for(13, "a", i < 1));

    const auto t = accuracy_table(scores, bank());
    REQUIRE(t.model_ids == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);

    const auto& r1 = t.rows[0];
    CHECK(r1.template_id == 1);
    CHECK(r1.random_rate == Catch::Approx(0.25));
    CHECK(!r1.baseline.has_value());
    CHECK(r1.by_model.at("a").accuracy == Catch::Approx(0.75));
    CHECK(r1.by_model.at("a").n_trials == 4);
    CHECK(r1.by_model.at("a").color_class == "better");
    CHECK(r1.by_model.at("b").accuracy == Catch::Approx(0.25));
    CHECK(r1.by_model.at("b").color_class == "close");

    const auto& r13 = t.rows[1];
    CHECK(r13.template_id == 13);
    CHECK(r13.random_rate == Catch::Approx(0.5));
    CHECK(r13.by_model.at("a").color_class == "close");
}

TEST_CASE("a human baseline changes the reference point") {
    std::vector<ScoreRecord> scores;
    for (int i = 0; i < 4; ++i) scores.push_back(score_for(1, "a", i < 2));  // 0.5
    const auto t = accuracy_table(scores, bank(), {{1, 0.9}});
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.rows[0].baseline.has_value());
    CHECK(*t.rows[0].baseline == Catch::Approx(0.9));
    // 0.5 beats random (0.25) but trails the baseline by far
    CHECK(t.rows[0].by_model.at("a").color_class == "worse");
}

TEST_CASE("comparison csv round-trips the table") {
    std::vector<ScoreRecord> scores;
    for (int i = 0; i < 4; ++i) scores.push_back(score_for(1, "a", i < 3));
    const auto t = accuracy_table(scores, bank(), {{1, 0.6}});

    const auto path = temp_dir() / "comparison.csv";
    write_comparison_csv(t, path.string());
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "template_id,chart_type,task_type,random_rate,baseline,a_accuracy,a_class");
    const auto cells = split_csv(lines[1]);
    REQUIRE(cells.size() == 7);
    CHECK(cells[0] == "1");
    CHECK(std::stod(cells[3]) == Catch::Approx(0.25));
    CHECK(std::stod(cells[4]) == Catch::Approx(0.6));
    CHECK(std::stod(cells[5]) == Catch::Approx(0.75));
    CHECK(cells[6] == "better");
}

TEST_CASE("box stats compute interpolated quartiles") {
    const auto b = report_detail::box_stats({9, 1, 5, 3, 7, 2, 8, 4, 6});
    CHECK(b.n == 9);
    CHECK(b.lo == 1.0);
    CHECK(b.q1 == Catch::Approx(3.0));
    CHECK(b.med == Catch::Approx(5.0));
    CHECK(b.q3 == Catch::Approx(7.0));
    CHECK(b.hi == 9.0);
    CHECK(report_detail::box_stats({}).n == 0);
}

TEST_CASE("ridge plot writes a png and the raw samples") {
    const auto png = temp_dir() / "ridge.png";
    const auto csv = temp_dir() / "ridge.csv";
    std::vector<std::pair<std::string, std::vector<double>>> samples = {
        {"alpha", {0.1, 0.2, 0.15, 0.3, 0.25}},
        {"beta", {-0.4, -0.2, -0.3, -0.35, -0.1}}};
    ridge_plot(samples, png.string(), csv.string());
    CHECK(file_is_png(png));
    const auto lines = read_lines(csv);
    REQUIRE(lines.size() == 11);
    CHECK(lines[0] == "name,sample");
    CHECK(lines[1].rfind("alpha,", 0) == 0);
    CHECK(lines[6].rfind("beta,", 0) == 0);
}

TEST_CASE("overlap boxplots summarize each metric per group") {
    const auto png = temp_dir() / "overlap.png";
    const auto csv = temp_dir() / "overlap.csv";
    std::map<std::string, std::vector<OverlapMetrics>> groups;
    groups["g1"] = {range_overlap_metrics(1, 4, 3, 6), range_overlap_metrics(0, 4, 2, 6)};
    groups["g2"] = {range_overlap_metrics(1, 3, 2, 8)};
    overlap_boxplots(groups, png.string(), csv.string());
    CHECK(file_is_png(png));
    const auto lines = read_lines(csv);
    REQUIRE(lines.size() == 9);  // header + 2 groups x 4 metrics
    CHECK(lines[0] == "group,metric,n,min,q1,median,q3,max");
    bool found = false;
    for (const auto& l : lines) {
        const auto c = split_csv(l);
        if (c.size() >= 8 && c[0] == "g2" && c[1] == "overlap_coef") {
            CHECK(std::stod(c[5]) == Catch::Approx(0.5));  // single sample: median is it
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("relative error summary matches a hand-computed t interval") {
    const auto png = temp_dir() / "relerr.png";
    const auto csv = temp_dir() / "relerr.csv";
    std::map<std::string, std::vector<double>> groups;
    groups["g"] = {0.1, 0.2, 0.3};
    groups["tiny"] = {0.4};
    relative_error_ci(groups, png.string(), csv.string());
    CHECK(file_is_png(png));
    const auto lines = read_lines(csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "group,n,mean,ci_lo,ci_hi,note");

    // mean 0.2, sd 0.1, t(2, 0.975) = 4.302653
    const auto g = split_csv(lines[1]);
    REQUIRE(g[0] == "g");
    CHECK(g[1] == "3");
    CHECK(std::stod(g[2]) == Catch::Approx(0.2));
    CHECK(std::stod(g[3]) == Catch::Approx(0.2 - 4.302653 * 0.1 / std::sqrt(3.0)).margin(1e-4));
    CHECK(std::stod(g[4]) == Catch::Approx(0.2 + 4.302653 * 0.1 / std::sqrt(3.0)).margin(1e-4));

    const auto tiny = split_csv(lines[2]);
    REQUIRE(tiny[0] == "tiny");
    CHECK(tiny[5] == "too few samples");
}

TEST_CASE("latency figure drops outliers past the cutoff") {
    const auto png = temp_dir() / "latency.png";
    const auto csv = temp_dir() / "latency.csv";
    std::vector<TrialRecord> records;
    for (double lat : {1.0, 2.0, 150.0, 3.0}) {
        TrialRecord r;
        r.plan.condition = {true, true, ContextMode::Contextualized, "m"};
        r.latency_seconds = lat;
        records.push_back(r);
    }
    latency_timeseries(records, png.string(), csv.string());
    CHECK(file_is_png(png));
    const auto lines = read_lines(csv);
    REQUIRE(lines.size() == 4);  // header + the 3 kept latencies
    CHECK(lines[0] == "model,trial_index,latency_seconds");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split_csv(lines[i]);
        CHECK(std::stod(c[2]) <= 100.0);
    }
}
