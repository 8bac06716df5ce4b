#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlbench/backends.hpp"
#include "vlbench/chartgen.hpp"
#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/render/chart_render.hpp"
#include "vlbench/render/png.hpp"
#include "vlbench/report.hpp"
#include "vlbench/runner.hpp"
#include "vlbench/scoring.hpp"
#include "vlbench/sha256.hpp"
#include "vlbench/stats/bootstrap.hpp"
#include "vlbench/stats/design.hpp"
#include "vlbench/stats/tests.hpp"
#include "vlbench/stats/tune.hpp"
#include "vlbench/trial.hpp"

namespace vlbench {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct BackendEntry {
    std::string llm_id;
    std::string spec;  // mock-perfect | mock-uniform | mock-knowledge | replay | live
    json options = json::object();
};

struct RunConfig {
    std::uint64_t chart_seed = 1;
    std::uint64_t shuffle_seed = 2;
    std::uint64_t bootstrap_seed = 3;
    std::string out_dir = "out";
    int n_per_question = 120;
    int bootstrap_resamples = 1000;
    std::vector<std::string> experiments = {"e1", "e2", "e3", "e4", "e5"};
    std::vector<BackendEntry> backends;
    std::string synonyms_path;
    std::string baseline_path;
    ExclusionLists exclusions;
    bool tune_enabled = false;
    int tune_subsample = 10;  // keep every Nth row for the tuning sweep
    int tune_reps = 10;
    int tune_folds = 10;

    json to_json() const {
        json jb = json::array();
        for (const auto& b : backends)
            jb.push_back({{"llm_id", b.llm_id}, {"spec", b.spec}, {"options", b.options}});
        json jex = json::object();
        for (const auto& [tid, vals] : exclusions) jex[std::to_string(tid)] = vals;
        return {{"seeds",
                 {{"chart", chart_seed}, {"shuffle", shuffle_seed}, {"bootstrap", bootstrap_seed}}},
                {"out_dir", out_dir},
                {"n_per_question", n_per_question},
                {"bootstrap_resamples", bootstrap_resamples},
                {"experiments", experiments},
                {"backends", jb},
                {"synonyms_path", synonyms_path},
                {"baseline_path", baseline_path},
                {"exclusions", jex},
                {"tune",
                 {{"enabled", tune_enabled},
                  {"subsample", tune_subsample},
                  {"reps", tune_reps},
                  {"folds", tune_folds}}}};
    }

    static RunConfig from_json(const json& j) {
        RunConfig c;
        if (j.contains("seeds")) {
            c.chart_seed = j["seeds"].value("chart", c.chart_seed);
            c.shuffle_seed = j["seeds"].value("shuffle", c.shuffle_seed);
            c.bootstrap_seed = j["seeds"].value("bootstrap", c.bootstrap_seed);
        }
        c.out_dir = j.value("out_dir", c.out_dir);
        c.n_per_question = j.value("n_per_question", c.n_per_question);
        c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
        if (j.contains("experiments")) c.experiments = j["experiments"].get<std::vector<std::string>>();
        if (j.contains("backends")) {
            for (const auto& b : j["backends"]) {
                BackendEntry e;
                e.llm_id = b.at("llm_id");
                e.spec = b.at("spec");
                e.options = b.value("options", json::object());
                c.backends.push_back(std::move(e));
            }
        }
        c.synonyms_path = j.value("synonyms_path", std::string());
        c.baseline_path = j.value("baseline_path", std::string());
        if (j.contains("exclusions")) {
            for (auto it = j["exclusions"].begin(); it != j["exclusions"].end(); ++it)
                c.exclusions[std::stoi(it.key())] = it.value().get<std::vector<std::string>>();
        }
        if (j.contains("tune")) {
            c.tune_enabled = j["tune"].value("enabled", false);
            c.tune_subsample = j["tune"].value("subsample", 10);
            c.tune_reps = j["tune"].value("reps", 10);
            c.tune_folds = j["tune"].value("folds", 10);
        }
        c.validate();
        return c;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigInvalid("cannot read config " + path);
        json j;
        try {
            f >> j;
        } catch (const std::exception& e) {
            throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
        }
        return from_json(j);
    }

    void validate() const {
        if (backends.empty()) throw ConfigInvalid("config needs at least one backend");
        if (n_per_question <= 0) throw ConfigInvalid("n_per_question must be positive");
        std::set<std::string> ids;
        for (const auto& b : backends) {
            if (b.llm_id.empty()) throw ConfigInvalid("backend llm_id must not be empty");
            if (!ids.insert(b.llm_id).second)
                throw ConfigInvalid("duplicate backend llm_id: " + b.llm_id);
        }
        static const std::set<std::string> known = {"e1", "e2", "e3", "e4", "e5"};
        for (const auto& e : experiments)
            if (!known.count(e)) throw ConfigInvalid("unknown experiment id: " + e);
    }
};

// ---------------------------------------------------------------------------
// Experiment definitions
// ---------------------------------------------------------------------------

struct ExperimentDef {
    std::vector<bool> vis_states;
    bool choices = true;
    ContextMode mode = ContextMode::Contextualized;
};

inline ExperimentDef experiment_def(const std::string& name) {
    if (name == "e1") return {{true}, true, ContextMode::Contextualized};
    if (name == "e2") return {{false}, true, ContextMode::Contextualized};
    if (name == "e3") return {{true}, false, ContextMode::Contextualized};
    if (name == "e4") return {{false}, false, ContextMode::Contextualized};
    if (name == "e5") return {{true, false}, true, ContextMode::Decontextualized};
    throw ConfigInvalid("unknown experiment id: " + name);
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

class Pipeline {
public:
    explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        synonyms_ = cfg_.synonyms_path.empty() ? SynonymTable::builtin()
                                               : SynonymTable::load(cfg_.synonyms_path);
    }

    const RunConfig& config() const { return cfg_; }

    // ---- stage: chart generation + rendering ----
    void cmd_generate(const std::string& exp) {
        const auto dir = exp_dir(exp) / "charts";
        fs::create_directories(dir);
        const ItemBank& bank = bank_for(exp);
        json manifest = json::object();
        for (const auto& chart : bank.charts) {
            const std::string id = chart_id_of(chart);
            const auto png = encode_png_for(chart);
            const auto path = dir / (id + ".png");
            std::ofstream f(path, std::ios::binary);
            f.write(reinterpret_cast<const char*>(png.data()),
                    static_cast<std::streamsize>(png.size()));
            manifest[id] = {{"file", id + ".png"},
                            {"sha256", Sha256::hash({reinterpret_cast<const char*>(png.data()),
                                                     png.size()})},
                            {"chart", chart.to_json()}};
        }
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
        record_hash(exp, "charts", hash_file(dir / "manifest.json"));
    }

    // ---- stage: question bank ----
    void cmd_bank(const std::string& exp) {
        const auto dir = exp_dir(exp) / "bank";
        fs::create_directories(dir);
        const ItemBank& bank = bank_for(exp);
        write_text(dir / "bank.json", bank.to_json().dump(2) + "\n");
        record_hash(exp, "bank", hash_file(dir / "bank.json"));
    }

    // ---- stage: trial execution ----
    void cmd_run(const std::string& exp, bool resume = false,
                 const std::string& only_condition = "") {
        require_stage(exp, "bank", "run");
        const ItemBank& bank = bank_for(exp);
        const auto def = experiment_def(exp);
        const auto dir = exp_dir(exp) / "trials";
        fs::create_directories(dir);

        const auto images = load_images(exp, def);
        for (const auto& be : cfg_.backends) {
            auto backend = make_backend(be.spec, be.options);
            for (bool vis : def.vis_states) {
                Condition cond{vis, def.choices, def.mode, be.llm_id};
                if (!only_condition.empty() && cond.key() != only_condition) continue;
                const auto plans = plan_trials(bank, cond, cfg_.n_per_question, cfg_.shuffle_seed);
                TrialStore store((dir / (cond.key() + ".jsonl")).string());
                if (!resume && fs::exists(store.path())) fs::remove(store.path());
                execute_trials(plans, bank, *backend, store, images, resume);
            }
        }
        record_hash(exp, "trials", hash_dir(dir));
    }

    // ---- stage: scoring ----
    void cmd_score(const std::string& exp) {
        require_stage(exp, "trials", "score");
        const ItemBank& bank = bank_for(exp);
        const auto dir = exp_dir(exp) / "scores";
        fs::create_directories(dir);
        for (const auto& entry : sorted_files(exp_dir(exp) / "trials", ".jsonl")) {
            TrialStore store(entry.string());
            const auto scores = score_trials(store.load(), bank, synonyms_);
            std::ofstream f(dir / entry.filename());
            for (const auto& s : scores) f << s.to_json().dump() << "\n";
        }
        record_hash(exp, "scores", hash_dir(dir));
    }

    // ---- stage: statistical analysis ----
    // The regression spans both chart-presence levels, so it pools the two
    // choices experiments (e1+e2) and separately handles e5, which carries
    // both presence levels itself.
    void cmd_analyze() {
        if (has_scores("e1") && has_scores("e2"))
            analyze_group("analysis_e1e2", {"e1", "e2"});
        if (has_scores("e5")) analyze_group("analysis_e5", {"e5"});
    }

    // ---- stage: tables + figures ----
    void cmd_report(const std::string& exp) {
        require_stage(exp, "scores", "report");
        const ItemBank& bank = bank_for(exp);
        const auto dir = exp_dir(exp) / "report";
        fs::create_directories(dir);

        std::vector<ScoreRecord> scores;
        std::vector<TrialRecord> trials;
        for (const auto& entry : sorted_files(exp_dir(exp) / "scores", ".jsonl"))
            for (const auto& s : load_scores(entry)) scores.push_back(s);
        for (const auto& entry : sorted_files(exp_dir(exp) / "trials", ".jsonl")) {
            TrialStore store(entry.string());
            for (const auto& t : store.load()) trials.push_back(t);
        }

        const auto table = accuracy_table(scores, bank, load_baseline());
        write_comparison_csv(table, (dir / "accuracy.csv").string());

        latency_timeseries(trials, (dir / "latency.png").string(),
                           (dir / "latency.csv").string());
        write_text(dir / "costs.json",
                   cost_summary_to_json(summarize_costs(trials)).dump(2) + "\n");

        const auto def = experiment_def(exp);
        if (!def.choices) {
            std::map<std::string, std::vector<OverlapMetrics>> overlap_groups;
            std::map<std::string, std::vector<double>> err_groups;
            for (const auto& s : scores) {
                if (s.has_overlap) overlap_groups[s.condition.llm_id].push_back(s.overlap);
                if (s.has_relative_error)
                    err_groups[s.condition.llm_id].push_back(s.relative_error);
            }
            overlap_boxplots(overlap_groups, (dir / "overlap.png").string(),
                             (dir / "overlap.csv").string());
            relative_error_ci(err_groups, (dir / "relative_error.png").string(),
                              (dir / "relative_error.csv").string());
        }
        record_hash(exp, "report", hash_dir(dir));
    }

    // ---- full pipeline, skipping stages whose recorded hashes still match ----
    void cmd_all(bool resume = false) {
        for (const auto& exp : cfg_.experiments) {
            if (!stage_fresh(exp, "charts")) cmd_generate(exp);
            if (!stage_fresh(exp, "bank")) cmd_bank(exp);
            if (!stage_fresh(exp, "trials")) cmd_run(exp, resume);
            if (!stage_fresh(exp, "scores")) cmd_score(exp);
        }
        cmd_analyze();
        for (const auto& exp : cfg_.experiments) cmd_report(exp);
    }

    fs::path exp_dir(const std::string& exp) const { return fs::path(cfg_.out_dir) / exp; }

    const ItemBank& bank_for(const std::string& exp) {
        const auto def = experiment_def(exp);
        const std::string key = to_string(def.mode);
        auto it = banks_.find(key);
        if (it == banks_.end()) {
            GenerationConstraints gc;
            it = banks_.emplace(key, build_item_bank(cfg_.chart_seed, def.mode, cfg_.exclusions, gc))
                     .first;
        }
        return it->second;
    }

private:
    static std::string chart_id_of(const ChartInstance& c) {
        return to_string(c.type) + "_" + std::to_string(c.seed) + "_" + to_string(c.context_mode);
    }

    static std::vector<std::uint8_t> encode_png_for(const ChartInstance& chart) {
        return encode_png(render_chart(chart));
    }

    std::map<std::string, std::vector<std::uint8_t>> load_images(const std::string& exp,
                                                                 const ExperimentDef& def) {
        std::map<std::string, std::vector<std::uint8_t>> images;
        bool needs_images = false;
        for (bool v : def.vis_states) needs_images |= v;
        if (!needs_images) return images;
        require_stage(exp, "charts", "run");
        const ItemBank& bank = bank_for(exp);
        for (const auto& chart : bank.charts) {
            const auto path = exp_dir(exp) / "charts" / (chart_id_of(chart) + ".png");
            std::ifstream f(path, std::ios::binary);
            if (!f)
                throw MissingStageInput("chart image missing: " + path.string());
            std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                            std::istreambuf_iterator<char>());
            images[chart_id_of(chart)] = std::move(bytes);
        }
        return images;
    }

    std::vector<ScoreRecord> load_scores(const fs::path& path) const {
        std::vector<ScoreRecord> out;
        std::ifstream f(path);
        std::string line;
        while (std::getline(f, line))
            if (!line.empty()) out.push_back(ScoreRecord::from_json(json::parse(line)));
        return out;
    }

    bool has_scores(const std::string& exp) const {
        return fs::exists(exp_dir(exp) / "scores") &&
               !sorted_files(exp_dir(exp) / "scores", ".jsonl").empty();
    }

    void analyze_group(const std::string& name, const std::vector<std::string>& exps) {
        std::vector<ScoreRecord> scores;
        for (const auto& exp : exps)
            for (const auto& entry : sorted_files(exp_dir(exp) / "scores", ".jsonl"))
                for (const auto& s : load_scores(entry)) scores.push_back(s);
        if (scores.empty()) throw MissingStageInput("no score records for " + name);

        std::vector<std::string> llms;
        for (const auto& b : cfg_.backends) llms.push_back(b.llm_id);
        DesignMatrix dm(llms);
        const auto data = build_dataset(dm, scores);

        const auto dir = fs::path(cfg_.out_dir) / name;
        fs::create_directories(dir);

        json log = {{"n_rows", data.rows.size()},
                    {"n_columns", dm.n_columns()},
                    {"column_groups",
                     {{"one_way", dm.n_one_way()},
                      {"two_way", dm.n_two_way()},
                      {"three_way", dm.n_three_way()},
                      {"four_way", dm.n_four_way()}}}};

        LogisticConfig fit_cfg;
        // ridge default keeps the fit well-posed under perfectly separated cells
        fit_cfg.penalty = Penalty::L2;
        fit_cfg.C = 1.0;
        if (cfg_.tune_enabled) {
            SparseDataset sub;
            sub.n_columns = data.n_columns;
            for (std::size_t i = 0; i < data.rows.size();
                 i += static_cast<std::size_t>(cfg_.tune_subsample)) {
                sub.rows.push_back(data.rows[i]);
                sub.y.push_back(data.y[i]);
            }
            const auto tuned = tune_hyperparameters(sub, cfg_.tune_reps, cfg_.tune_folds,
                                                    cfg_.bootstrap_seed);
            const auto& best = tuned.combos[static_cast<std::size_t>(tuned.best_index)];
            fit_cfg.penalty = best.combo.penalty;
            fit_cfg.C = best.combo.C;
            fit_cfg.l1_ratio = best.combo.l1_ratio;
            json jt = json::array();
            for (const auto& cr : tuned.combos)
                jt.push_back({{"penalty", to_string(cr.combo.penalty)},
                              {"solver", cr.combo.solver},
                              {"C", cr.combo.C},
                              {"l1_ratio", cr.combo.l1_ratio},
                              {"mean_auprc", cr.mean_auprc},
                              {"mean_auroc", cr.mean_auroc},
                              {"mean_f1", cr.mean_f1},
                              {"mean_accuracy", cr.mean_accuracy},
                              {"n_scores", cr.folds.size()}});
            write_text(dir / "tuning.json",
                       json{{"combos", jt},
                            {"best_index", tuned.best_index},
                            {"total_cv_scores", tuned.total_cv_scores}}
                               .dump(2) +
                           "\n");
            log["tuning"] = {{"total_cv_scores", tuned.total_cv_scores},
                             {"selected_penalty", to_string(fit_cfg.penalty)}};
        }

        const auto fit = fit_logistic(data, fit_cfg);
        json jfit = {{"intercept", fit.intercept},
                     {"converged", fit.converged},
                     {"n_iter", fit.n_iter},
                     {"objective", fit.objective}};
        json jcoef = json::array();
        for (int j = 0; j < dm.n_columns(); ++j)
            jcoef.push_back({{"name", dm.column_names()[static_cast<std::size_t>(j)]},
                             {"coef", fit.coef[static_cast<std::size_t>(j)]}});
        jfit["coefficients"] = jcoef;
        write_text(dir / "fit.json", jfit.dump(2) + "\n");

        const auto boot = bootstrap_fit(dm, data, cfg_.bootstrap_resamples, cfg_.bootstrap_seed,
                                        fit_cfg);
        {
            std::ofstream f(dir / "bootstrap_coefficients.csv");
            f << "resample,intercept";
            for (const auto& n : dm.column_names()) f << "," << n;
            f << "\n";
            for (std::size_t b = 0; b < boot.coefficients.size(); ++b) {
                f << b;
                for (double v : boot.coefficients[b]) f << "," << format_number(v, 6);
                f << "\n";
            }
        }
        {
            std::ofstream f(dir / "bootstrap_cells.csv");
            f << "resample";
            for (const auto& n : boot.cell_names) f << "," << n;
            f << "\n";
            for (std::size_t b = 0; b < boot.cell_probabilities.size(); ++b) {
                f << b;
                for (double v : boot.cell_probabilities[b]) f << "," << format_number(v, 6);
                f << "\n";
            }
        }

        // coefficient significance for the main-effect columns
        json jtests = json::array();
        std::vector<std::pair<std::string, std::vector<double>>> ridge_samples;
        if (boot.coefficients.size() >= 100) {
            for (int j = 0; j < dm.n_one_way(); ++j) {
                const auto samples = coefficient_samples(boot, j + 1);
                const auto t = test_coefficient(samples);
                jtests.push_back({{"name", dm.column_names()[static_cast<std::size_t>(j)]},
                                  {"method", t.method},
                                  {"statistic", t.statistic},
                                  {"p_value", t.p_value},
                                  {"ci_lo", t.ci_lo},
                                  {"ci_hi", t.ci_hi},
                                  {"estimate", t.estimate},
                                  {"significant", t.significant}});
            }
        }
        for (int j = 0; j < std::min(12, dm.n_one_way()); ++j)
            ridge_samples.push_back({dm.column_names()[static_cast<std::size_t>(j)],
                                     coefficient_samples(boot, j + 1)});
        write_text(dir / "coefficient_tests.json", jtests.dump(2) + "\n");
        ridge_plot(ridge_samples, (dir / "ridge.png").string(), (dir / "ridge.csv").string());

        // presence effect per model on the bootstrap cell probabilities:
        // mean over cells with the chart shown vs hidden
        json jprob = json::array();
        if (dm.presence_levels().size() == 2 && boot.cell_probabilities.size() >= 2) {
            for (const auto& llm : dm.llm_ids()) {
                std::vector<double> with_vis(boot.cell_probabilities.size(), 0.0);
                std::vector<double> without(boot.cell_probabilities.size(), 0.0);
                int n_with = 0, n_without = 0;
                for (std::size_t c = 0; c < boot.cell_names.size(); ++c) {
                    const auto& cn = boot.cell_names[c];
                    if (cn.find("|" + llm + "|") == std::string::npos) continue;
                    const bool is_vis = cn.size() >= 4 && cn.compare(cn.size() - 4, 4, "|vis") == 0;
                    for (std::size_t b = 0; b < boot.cell_probabilities.size(); ++b)
                        (is_vis ? with_vis : without)[b] += boot.cell_probabilities[b][c];
                    (is_vis ? n_with : n_without) += 1;
                }
                if (n_with == 0 || n_without == 0) continue;
                for (auto& v : with_vis) v /= n_with;
                for (auto& v : without) v /= n_without;
                const auto t = test_probability_difference(with_vis, without,
                                                           Alternative::Greater, 0.05, 200000);
                jprob.push_back({{"llm", llm},
                                 {"method", t.method},
                                 {"p_value", t.p_value},
                                 {"ci_lo", t.ci_lo},
                                 {"ci_hi", t.ci_hi},
                                 {"estimate", t.estimate},
                                 {"significant", t.significant}});
            }
        }
        write_text(dir / "probability_tests.json", jprob.dump(2) + "\n");
        write_text(dir / "analysis.json", log.dump(2) + "\n");
    }

    // ---- bookkeeping ----

    static std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
        std::vector<fs::path> out;
        if (!fs::exists(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ext) out.push_back(e.path());
        std::sort(out.begin(), out.end());
        return out;
    }

    static void write_text(const fs::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw MissingStageInput("cannot write " + path.string());
        f << text;
    }

    static std::string hash_file(const fs::path& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) return "";
        std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        return Sha256::hash(data);
    }

    std::string hash_dir(const fs::path& dir) const {
        Sha256 h;
        for (const auto& p : sorted_files(dir, ".jsonl")) {
            const auto fh = hash_file(p);
            h.update(p.filename().string());
            h.update(fh);
        }
        for (const auto& p : sorted_files(dir, ".csv")) {
            h.update(p.filename().string());
            h.update(hash_file(p));
        }
        for (const auto& p : sorted_files(dir, ".json")) {
            h.update(p.filename().string());
            h.update(hash_file(p));
        }
        for (const auto& p : sorted_files(dir, ".png")) {
            h.update(p.filename().string());
            h.update(hash_file(p));
        }
        return h.hex_digest();
    }

    fs::path hashes_path(const std::string& exp) const { return exp_dir(exp) / "hashes.json"; }

    json load_hashes(const std::string& exp) const {
        std::ifstream f(hashes_path(exp));
        if (!f) return json::object();
        json j;
        try {
            f >> j;
        } catch (...) {
            return json::object();
        }
        return j;
    }

    void record_hash(const std::string& exp, const std::string& stage, const std::string& digest) {
        auto j = load_hashes(exp);
        j[stage] = digest;
        fs::create_directories(exp_dir(exp));
        write_text(hashes_path(exp), j.dump(2) + "\n");
    }

    // a stage is fresh when its recorded hash matches the current content
    bool stage_fresh(const std::string& exp, const std::string& stage) const {
        const auto j = load_hashes(exp);
        if (!j.contains(stage)) return false;
        const std::string recorded = j[stage];
        std::string current;
        if (stage == "charts") current = hash_file(exp_dir(exp) / "charts" / "manifest.json");
        else if (stage == "bank") current = hash_file(exp_dir(exp) / "bank" / "bank.json");
        else current = hash_dir(exp_dir(exp) / (stage == "trials" ? "trials" : stage));
        return !current.empty() && current == recorded;
    }

    void require_stage(const std::string& exp, const std::string& stage,
                       const std::string& for_stage) const {
        const fs::path probe = stage == "charts" ? exp_dir(exp) / "charts" / "manifest.json"
                               : stage == "bank" ? exp_dir(exp) / "bank" / "bank.json"
                                                 : exp_dir(exp) / stage;
        if (!fs::exists(probe))
            throw MissingStageInput("stage '" + for_stage + "' of " + exp + " needs '" + stage +
                                    "' output at " + probe.string());
    }

    std::map<int, double> load_baseline() const {
        std::map<int, double> out;
        if (cfg_.baseline_path.empty()) return out;
        std::ifstream f(cfg_.baseline_path);
        if (!f) throw ConfigInvalid("cannot read baseline file " + cfg_.baseline_path);
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line.rfind("template_id", 0) == 0) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            out[std::stoi(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
        }
        return out;
    }

    RunConfig cfg_;
    SynonymTable synonyms_;
    std::map<std::string, ItemBank> banks_;
};

}  // namespace vlbench
