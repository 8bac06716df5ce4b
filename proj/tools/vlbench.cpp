#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlbench/pipeline.hpp"

namespace {

int fail(const std::string& kind, const std::string& message) {
    vlbench::json j = {{"error", kind}, {"message", message}};
    std::fprintf(stderr, "%s\n", j.dump().c_str());
    return 1;
}

std::vector<std::string> selected_experiments(const vlbench::RunConfig& cfg,
                                              const std::string& only) {
    if (only.empty()) return cfg.experiments;
    return {only};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"visualization literacy benchmark pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand too

    std::string config_path;
    std::string experiment;
    std::string condition;
    std::string backend;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool resume = false;

    app.add_option("--config", config_path, "run configuration JSON")->required();
    app.add_option("--experiment", experiment, "restrict to one experiment (e1..e5)");
    app.add_option("--condition", condition, "restrict run to one condition key");
    app.add_option("--backend", backend, "restrict run to one backend llm id");
    app.add_option("--seed", seed, "override the chart seed")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_flag("--resume", resume, "skip trials already recorded");

    auto* gen = app.add_subcommand("gen", "generate and render charts");
    auto* bank = app.add_subcommand("bank", "build the question bank");
    auto* run = app.add_subcommand("run", "execute trials against backends");
    auto* score = app.add_subcommand("score", "score recorded trials");
    auto* analyze = app.add_subcommand("analyze", "fit, bootstrap, and test");
    auto* report = app.add_subcommand("report", "emit tables and figures");
    auto* all = app.add_subcommand("all", "run the full pipeline");

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = vlbench::RunConfig::load(config_path);
        if (seed_set) cfg.chart_seed = seed;
        if (!backend.empty()) {
            std::vector<vlbench::BackendEntry> kept;
            for (const auto& b : cfg.backends)
                if (b.llm_id == backend) kept.push_back(b);
            if (kept.empty())
                return fail("ConfigInvalid", "no backend with llm_id " + backend);
            cfg.backends = kept;
        }
        vlbench::Pipeline pipe(cfg);

        if (gen->parsed()) {
            for (const auto& e : selected_experiments(cfg, experiment)) pipe.cmd_generate(e);
        } else if (bank->parsed()) {
            for (const auto& e : selected_experiments(cfg, experiment)) pipe.cmd_bank(e);
        } else if (run->parsed()) {
            for (const auto& e : selected_experiments(cfg, experiment))
                pipe.cmd_run(e, resume, condition);
        } else if (score->parsed()) {
            for (const auto& e : selected_experiments(cfg, experiment)) pipe.cmd_score(e);
        } else if (analyze->parsed()) {
            pipe.cmd_analyze();
        } else if (report->parsed()) {
            for (const auto& e : selected_experiments(cfg, experiment)) pipe.cmd_report(e);
        } else if (all->parsed()) {
            pipe.cmd_all(resume);
        }
    } catch (const vlbench::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("Unexpected", e.what());
    }
    return 0;
}
