#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlbench/backends.hpp"
#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/trial.hpp"

namespace vlbench {

inline std::string make_session_id(const Condition& c, int template_id, int repetition) {
    return c.key() + "/q" + std::to_string(template_id) + "/r" + std::to_string(repetition);
}

// One plan per (question, repetition). The option rotation cycles with the
// repetition index, so n repetitions of a k-option question see each rotation
// exactly n/k times. Presentation order is a seeded global shuffle.
inline std::vector<TrialPlan> plan_trials(const ItemBank& bank, const Condition& condition,
                                          int n_per_question, std::uint64_t shuffle_seed) {
    std::vector<TrialPlan> plans;
    plans.reserve(bank.items.size() * static_cast<std::size_t>(n_per_question));
    for (const auto& item : bank.items) {
        const int k = static_cast<int>(item.options.size());
        if (n_per_question % k != 0)
            throw IndivisibleRepetition("n_per_question=" + std::to_string(n_per_question) +
                                        " is not a multiple of the " + std::to_string(k) +
                                        " options of question " + std::to_string(item.template_id));
        for (int rep = 0; rep < n_per_question; ++rep) {
            TrialPlan p;
            p.template_id = item.template_id;
            p.condition = condition;
            p.rotation = rep % k;
            p.repetition = rep;
            p.session_id = make_session_id(condition, item.template_id, rep);
            plans.push_back(std::move(p));
        }
    }
    auto rng = Rng::derived(shuffle_seed, "runner/shuffle/" + condition.key());
    rng.shuffle(plans);
    return plans;
}

// Append-only JSONL store of trial records; resume reads back session ids.
class TrialStore {
public:
    explicit TrialStore(std::string path) : path_(std::move(path)) {}

    const std::string& path() const { return path_; }

    std::vector<TrialRecord> load() const {
        std::vector<TrialRecord> out;
        std::ifstream f(path_);
        if (!f) return out;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            out.push_back(TrialRecord::from_json(json::parse(line)));
        }
        return out;
    }

    std::set<std::string> completed_sessions() const {
        std::set<std::string> out;
        for (const auto& r : load()) out.insert(r.plan.session_id);
        return out;
    }

    void append(const TrialRecord& r) {
        std::ofstream f(path_, std::ios::app);
        if (!f) throw MissingStageInput("cannot open trial store " + path_ + " for append");
        f << r.to_json().dump() << "\n";
        f.flush();
    }

private:
    std::string path_;
};

struct ExecuteResult {
    int executed = 0;
    int skipped = 0;   // already present in the store (resume)
    int errored = 0;   // recorded with a transport error
};

// Runs plans sequentially against a backend. BackendUnavailable (thrown by
// the backend) aborts the run; per-trial transport failures are recorded in
// the trial's error field and execution continues. Images are looked up by
// chart id and attached only when the condition shows the chart.
inline ExecuteResult execute_trials(
    const std::vector<TrialPlan>& plans, const ItemBank& bank, Backend& backend, TrialStore& store,
    const std::map<std::string, std::vector<std::uint8_t>>& images = {}, bool resume = false) {
    std::set<std::string> done;
    if (resume) done = store.completed_sessions();

    ExecuteResult result;
    for (const auto& plan : plans) {
        if (resume && done.count(plan.session_id)) {
            ++result.skipped;
            continue;
        }
        const QuestionItem& q = bank.item_for(plan.template_id);

        BackendRequest req;
        req.plan = plan;
        req.question = &q;
        req.prompt = build_prompt(plan, q);
        req.image_attached = plan.condition.vis_present;
        if (req.image_attached) {
            auto it = images.find(q.chart_id);
            if (it == images.end())
                throw MissingChart("no rendered image for chart " + q.chart_id);
            req.image_png = &it->second;
        }

        const BackendResponse resp = backend.complete(req);

        TrialRecord rec;
        rec.plan = plan;
        rec.prompt_text = req.prompt;
        rec.image_attached = req.image_attached;
        rec.raw_response = resp.text;
        rec.latency_seconds = resp.latency_seconds;
        rec.prompt_tokens = resp.prompt_tokens;
        rec.completion_tokens = resp.completion_tokens;
        rec.cost_dollars = resp.cost_dollars;
        rec.timestamp_ms = resp.timestamp_ms;
        rec.backend_id = backend.id();
        rec.error = resp.error;
        store.append(rec);

        ++result.executed;
        if (!resp.error.empty()) ++result.errored;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Cost and latency accounting
// ---------------------------------------------------------------------------

struct ModelCosts {
    int n_trials = 0;
    double total_cost = 0;
    double mean_cost = 0;
    double mean_latency = 0;           // all trials
    double mean_latency_filtered = 0;  // excludes latencies above the cutoff
    int n_latency_excluded = 0;
};

struct CostSummary {
    int n_trials = 0;
    double total_cost = 0;
    std::int64_t total_prompt_tokens = 0;
    std::int64_t total_completion_tokens = 0;
    double mean_latency = 0;
    double mean_latency_filtered = 0;
    int n_latency_excluded = 0;
    double latency_cutoff_seconds = 100.0;
    std::map<std::string, ModelCosts> per_model;  // keyed by llm id
};

inline CostSummary summarize_costs(const std::vector<TrialRecord>& records,
                                   double latency_cutoff_seconds = 100.0) {
    CostSummary s;
    s.latency_cutoff_seconds = latency_cutoff_seconds;
    if (records.empty()) return s;

    double latency_sum = 0, latency_sum_f = 0;
    int n_f = 0;
    for (const auto& r : records) {
        s.n_trials += 1;
        s.total_cost += r.cost_dollars;
        s.total_prompt_tokens += r.prompt_tokens;
        s.total_completion_tokens += r.completion_tokens;
        latency_sum += r.latency_seconds;
        if (r.latency_seconds <= latency_cutoff_seconds) {
            latency_sum_f += r.latency_seconds;
            ++n_f;
        } else {
            ++s.n_latency_excluded;
        }

        auto& m = s.per_model[r.plan.condition.llm_id];
        m.n_trials += 1;
        m.total_cost += r.cost_dollars;
        m.mean_latency += r.latency_seconds;  // accumulate, normalize below
        if (r.latency_seconds <= latency_cutoff_seconds) {
            m.mean_latency_filtered += r.latency_seconds;
        } else {
            ++m.n_latency_excluded;
        }
    }
    s.mean_latency = latency_sum / s.n_trials;
    s.mean_latency_filtered = n_f > 0 ? latency_sum_f / n_f : 0.0;
    for (auto& [_, m] : s.per_model) {
        m.mean_cost = m.total_cost / m.n_trials;
        const int kept = m.n_trials - m.n_latency_excluded;
        m.mean_latency /= m.n_trials;
        m.mean_latency_filtered = kept > 0 ? m.mean_latency_filtered / kept : 0.0;
    }
    return s;
}

inline json cost_summary_to_json(const CostSummary& s) {
    json per_model = json::object();
    for (const auto& [id, m] : s.per_model) {
        per_model[id] = {{"n_trials", m.n_trials},
                         {"total_cost", m.total_cost},
                         {"mean_cost", m.mean_cost},
                         {"mean_latency", m.mean_latency},
                         {"mean_latency_filtered", m.mean_latency_filtered},
                         {"n_latency_excluded", m.n_latency_excluded}};
    }
    return {{"n_trials", s.n_trials},
            {"total_cost", s.total_cost},
            {"total_prompt_tokens", s.total_prompt_tokens},
            {"total_completion_tokens", s.total_completion_tokens},
            {"mean_latency", s.mean_latency},
            {"mean_latency_filtered", s.mean_latency_filtered},
            {"n_latency_excluded", s.n_latency_excluded},
            {"latency_cutoff_seconds", s.latency_cutoff_seconds},
            {"per_model", per_model}};
}

}  // namespace vlbench
