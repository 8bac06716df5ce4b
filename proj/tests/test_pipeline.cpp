#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "vlbench/pipeline.hpp"

using namespace vlbench;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.out_dir = out.string();
    c.n_per_question = 12;
    c.bootstrap_resamples = 10;
    c.experiments = {"e1", "e2"};
    c.backends = {{"m1", "mock-uniform", json::object()}, {"m2", "mock-uniform", json::object()}};
    return c;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::size_t n = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) ++n;
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config validation rejects broken setups") {
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), ConfigInvalid);

    const auto bad = fs::temp_directory_path() / "vlbench_bad_config.json";
    {
        std::ofstream f(bad);
        f << "{not json";
    }
    CHECK_THROWS_AS(RunConfig::load(bad.string()), ConfigInvalid);
    fs::remove(bad);

    RunConfig none;
    CHECK_THROWS_AS(none.validate(), ConfigInvalid);  // no backends

    RunConfig empty_id;
    empty_id.backends = {{"", "mock-uniform", json::object()}};
    CHECK_THROWS_AS(empty_id.validate(), ConfigInvalid);

    RunConfig dup;
    dup.backends = {{"m", "mock-uniform", json::object()},
                    {"m", "mock-perfect", json::object()}};
    CHECK_THROWS_AS(dup.validate(), ConfigInvalid);

    RunConfig exp;
    exp.backends = {{"m", "mock-uniform", json::object()}};
    exp.experiments = {"e9"};
    CHECK_THROWS_AS(exp.validate(), ConfigInvalid);

    RunConfig zero;
    zero.backends = {{"m", "mock-uniform", json::object()}};
    zero.n_per_question = 0;
    CHECK_THROWS_AS(zero.validate(), ConfigInvalid);

    RunConfig ok;
    ok.backends = {{"m", "mock-uniform", json::object()}};
    CHECK_NOTHROW(ok.validate());
    const auto back = RunConfig::from_json(ok.to_json());
    CHECK(back.to_json().dump() == ok.to_json().dump());
}

TEST_CASE("experiment definitions map ids to conditions") {
    CHECK(experiment_def("e1").vis_states == std::vector<bool>{true});
    CHECK(experiment_def("e1").choices);
    CHECK(experiment_def("e1").mode == ContextMode::Contextualized);
    CHECK(experiment_def("e2").vis_states == std::vector<bool>{false});
    CHECK(!experiment_def("e3").choices);
    CHECK(experiment_def("e3").vis_states == std::vector<bool>{true});
    CHECK(!experiment_def("e4").choices);
    CHECK(experiment_def("e5").mode == ContextMode::Decontextualized);
    CHECK(experiment_def("e5").vis_states == std::vector<bool>{true, false});
    CHECK_THROWS_AS(experiment_def("e6"), ConfigInvalid);
}

TEST_CASE("pipeline stages run in order and leave the expected layout") {
    const auto out = fs::temp_directory_path() / "vlbench_pipeline_test";
    fs::remove_all(out);
    Pipeline p(small_config(out));

    // stages refuse to run ahead of their inputs
    CHECK_THROWS_AS(p.cmd_run("e1"), MissingStageInput);
    CHECK_THROWS_AS(p.cmd_score("e1"), MissingStageInput);
    CHECK_THROWS_AS(p.cmd_report("e1"), MissingStageInput);

    for (const std::string exp : {"e1", "e2"}) {
        p.cmd_generate(exp);
        p.cmd_bank(exp);
        p.cmd_run(exp);
        p.cmd_score(exp);
    }

    CHECK(fs::exists(out / "e1" / "charts" / "manifest.json"));
    CHECK(fs::exists(out / "e1" / "bank" / "bank.json"));
    // one trial file per condition, 53 items x 12 repetitions each
    for (const std::string exp : {"e1", "e2"}) {
        const std::string vis = exp == "e1" ? "vis" : "novis";
        for (const std::string m : {"m1", "m2"}) {
            const auto f = out / exp / "trials" / (vis + "-choices-ctx-" + m + ".jsonl");
            REQUIRE(fs::exists(f));
            CHECK(line_count(f) == 53u * 12u);
            const auto s = out / exp / "scores" / (vis + "-choices-ctx-" + m + ".jsonl");
            REQUIRE(fs::exists(s));
            CHECK(line_count(s) == 53u * 12u);
        }
    }

    // resumption adds no duplicate records
    p.cmd_run("e1", true);
    CHECK(line_count(out / "e1" / "trials" / "vis-choices-ctx-m1.jsonl") == 53u * 12u);

    p.cmd_analyze();
    const auto adir = out / "analysis_e1e2";
    REQUIRE(fs::exists(adir / "analysis.json"));
    json alog;
    std::ifstream(adir / "analysis.json") >> alog;
    CHECK(alog["n_rows"] == 53 * 12 * 2 * 2);
    CHECK(alog["n_columns"] == 629);
    CHECK(alog["column_groups"]["one_way"] == 24);
    CHECK(alog["column_groups"]["four_way"] == 196);

    CHECK(fs::exists(adir / "fit.json"));
    CHECK(line_count(adir / "bootstrap_coefficients.csv") == 11u);  // header + 10 resamples
    CHECK(line_count(adir / "bootstrap_cells.csv") == 11u);
    CHECK(fs::exists(adir / "ridge.png"));
    CHECK(fs::exists(adir / "ridge.csv"));
    // too few resamples for coefficient tests: the file holds an empty list
    json jtests;
    std::ifstream(adir / "coefficient_tests.json") >> jtests;
    CHECK(jtests.empty());
    CHECK(fs::exists(adir / "probability_tests.json"));

    p.cmd_report("e1");
    p.cmd_report("e2");
    CHECK(fs::exists(out / "e1" / "report" / "accuracy.csv"));
    CHECK(fs::exists(out / "e1" / "report" / "latency.png"));
    CHECK(fs::exists(out / "e1" / "report" / "latency.csv"));
    json costs;
    std::ifstream(out / "e1" / "report" / "costs.json") >> costs;
    CHECK(costs["n_trials"] == 53 * 12 * 2);
    CHECK(costs["total_cost"].get<double>() == Catch::Approx(53 * 12 * 2 * 0.01));
    // choices experiments carry no open-ended figures
    CHECK(!fs::exists(out / "e1" / "report" / "overlap.png"));

    // a second full pass reuses every cached stage and leaves outputs identical
    const auto scores_before = slurp(out / "e1" / "scores" / "vis-choices-ctx-m1.jsonl");
    const auto hashes_before = slurp(out / "e1" / "hashes.json");
    p.cmd_all(true);
    CHECK(slurp(out / "e1" / "scores" / "vis-choices-ctx-m1.jsonl") == scores_before);
    CHECK(slurp(out / "e1" / "hashes.json") == hashes_before);

    fs::remove_all(out);
}

TEST_CASE("open-ended experiments emit overlap and relative error figures") {
    const auto out = fs::temp_directory_path() / "vlbench_pipeline_open";
    fs::remove_all(out);
    RunConfig c;
    c.out_dir = out.string();
    c.n_per_question = 12;
    c.experiments = {"e4"};
    c.backends = {{"m1", "mock-perfect", json::object()}};
    Pipeline p(c);
    p.cmd_bank("e4");
    p.cmd_run("e4");
    p.cmd_score("e4");
    p.cmd_report("e4");
    CHECK(fs::exists(out / "e4" / "report" / "overlap.png"));
    CHECK(fs::exists(out / "e4" / "report" / "overlap.csv"));
    CHECK(fs::exists(out / "e4" / "report" / "relative_error.png"));
    CHECK(fs::exists(out / "e4" / "report" / "relative_error.csv"));
    fs::remove_all(out);
}
