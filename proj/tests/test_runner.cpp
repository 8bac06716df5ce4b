#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <map>

#include "vlbench/backends.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/runner.hpp"
#include "vlbench/trial.hpp"

using namespace vlbench;

namespace {

const ItemBank& test_bank() {
    static const ItemBank bank = build_item_bank(500, ContextMode::Contextualized);
    return bank;
}

Condition cond_e2(const std::string& llm = "m") {
    return {false, true, ContextMode::Contextualized, llm};
}

}  // namespace

TEST_CASE("system prompts are the exact protocol strings") {
    CHECK(std::string(kPromptVisChoices) ==
          "You are a helpful assistant for analyzing data visualizations. Please answer with "
          "the letter corresponding to the best option, or make a random guess if unsure. For "
          "example, if option (a) is correct, only reply with (a).");
    CHECK(std::string(kPromptNoVisChoices) ==
          "You are a helpful assistant for answering questions. Please answer with the letter "
          "corresponding to the best option, or make a random guess if unsure. For instance, if "
          "option (a) is correct, please reply with (a).");
    CHECK(std::string(kPromptVisOpen) ==
          "You are a helpful assistant for analyzing data visualizations. Please answer with "
          "the best response in one word.");
    CHECK(std::string(kPromptNoVisOpen) ==
          "You are a helpful assistant for answering questions. Please answer with the best "
          "response in one word.");

    CHECK(system_prompt({true, true, ContextMode::Contextualized, "m"}) == kPromptVisChoices);
    CHECK(system_prompt({false, true, ContextMode::Contextualized, "m"}) == kPromptNoVisChoices);
    CHECK(system_prompt({true, false, ContextMode::Contextualized, "m"}) == kPromptVisOpen);
    CHECK(system_prompt({false, false, ContextMode::Contextualized, "m"}) == kPromptNoVisOpen);
}

TEST_CASE("rotation math round-trips") {
    const auto& q = test_bank().item_for(1);  // 4 options
    for (int r = 0; r < 4; ++r) {
        const auto opts = rotated_options(q, r);
        const int disp = displayed_correct_index(q, r);
        CHECK(opts[static_cast<std::size_t>(disp)] ==
              q.options[static_cast<std::size_t>(q.correct_index)]);
        // displayed -> canonical inversion used by the scorer
        CHECK((r + disp) % 4 == q.correct_index);
    }
}

TEST_CASE("prompt text lists rotated options for choices conditions") {
    TrialPlan plan;
    plan.template_id = 1;
    plan.condition = cond_e2();
    plan.rotation = 1;
    const auto& q = test_bank().item_for(1);
    const auto p = build_prompt(plan, q);
    CHECK(p.rfind(kPromptNoVisChoices, 0) == 0);
    CHECK(p.find(q.stem) != std::string::npos);
    CHECK(p.find("(a) " + q.options[1]) != std::string::npos);
    CHECK(p.find("(d) " + q.options[0]) != std::string::npos);

    plan.condition.choices_present = false;
    const auto open = build_prompt(plan, q);
    CHECK(open.find("(a)") == std::string::npos);
}

TEST_CASE("trial planning counterbalances rotations exactly") {
    const auto plans = plan_trials(test_bank(), cond_e2(), 120, 7);
    REQUIRE(plans.size() == 53u * 120u);

    std::map<int, std::map<int, int>> rot_counts;
    for (const auto& p : plans) rot_counts[p.template_id][p.rotation] += 1;
    for (const auto& [tid, rc] : rot_counts) {
        const int k = question_template(tid).n_options;
        REQUIRE(static_cast<int>(rc.size()) == k);
        for (const auto& [rot, n] : rc) CHECK(n == 120 / k);
    }

    // the shuffle is seeded: same inputs replay, other conditions differ
    const auto again = plan_trials(test_bank(), cond_e2(), 120, 7);
    REQUIRE(again.size() == plans.size());
    bool same = true, other_same = true;
    const auto other = plan_trials(test_bank(), cond_e2("n"), 120, 7);
    for (std::size_t i = 0; i < plans.size(); ++i) {
        same &= plans[i].session_id == again[i].session_id;
        other_same &= plans[i].template_id == other[i].template_id &&
                      plans[i].repetition == other[i].repetition;
    }
    CHECK(same);
    CHECK(!other_same);
}

TEST_CASE("repetition count must divide by every option count") {
    CHECK_THROWS_AS(plan_trials(test_bank(), cond_e2(), 121, 7), IndivisibleRepetition);
    CHECK_THROWS_AS(plan_trials(test_bank(), cond_e2(), 4, 7), IndivisibleRepetition);  // 3-option items
    CHECK_NOTHROW(plan_trials(test_bank(), cond_e2(), 12, 7));
}

TEST_CASE("session ids encode condition, question, and repetition") {
    const auto c = cond_e2("model-x");
    CHECK(c.key() == "novis-choices-ctx-model-x");
    CHECK(make_session_id(c, 12, 3) == "novis-choices-ctx-model-x/q12/r3");
}

TEST_CASE("execution writes records and resume skips them") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "vlbench_runner_test.jsonl";
    fs::remove(path);

    const auto plans = plan_trials(test_bank(), cond_e2(), 12, 7);
    MockPerfectBackend backend;
    TrialStore store(path.string());

    const auto r1 = execute_trials(plans, test_bank(), backend, store);
    CHECK(r1.executed == static_cast<int>(plans.size()));
    CHECK(r1.skipped == 0);
    CHECK(r1.errored == 0);
    CHECK(store.load().size() == plans.size());

    const auto r2 = execute_trials(plans, test_bank(), backend, store, {}, true);
    CHECK(r2.executed == 0);
    CHECK(r2.skipped == static_cast<int>(plans.size()));
    CHECK(store.load().size() == plans.size());

    // records round-trip through the JSONL store
    const auto records = store.load();
    CHECK(records.front().backend_id == backend.id());
    CHECK(TrialRecord::from_json(records.front().to_json()).plan.session_id ==
          records.front().plan.session_id);
    fs::remove(path);
}

TEST_CASE("vis conditions demand a rendered image") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "vlbench_runner_vis.jsonl";
    fs::remove(path);
    Condition vis{true, true, ContextMode::Contextualized, "m"};
    const auto plans = plan_trials(test_bank(), vis, 12, 7);
    MockPerfectBackend backend;
    TrialStore store(path.string());
    CHECK_THROWS_AS(execute_trials(plans, test_bank(), backend, store), MissingChart);
    fs::remove(path);
}

TEST_CASE("cost summary filters latency outliers") {
    std::vector<TrialRecord> records;
    for (double lat : {3.0, 5.0, 10018.0}) {
        TrialRecord r;
        r.plan.condition = cond_e2("m");
        r.latency_seconds = lat;
        r.cost_dollars = 0.01;
        r.prompt_tokens = 100;
        r.completion_tokens = 10;
        records.push_back(r);
    }
    const auto s = summarize_costs(records);
    CHECK(s.n_trials == 3);
    CHECK(s.total_cost == Catch::Approx(0.03));
    CHECK(s.total_prompt_tokens == 300);
    CHECK(s.n_latency_excluded == 1);
    CHECK(s.mean_latency_filtered == Catch::Approx(4.0));
    CHECK(s.mean_latency == Catch::Approx((3.0 + 5.0 + 10018.0) / 3.0));
    const auto& m = s.per_model.at("m");
    CHECK(m.mean_latency_filtered == Catch::Approx(4.0));
    CHECK(m.n_latency_excluded == 1);
    CHECK(m.mean_cost == Catch::Approx(0.01));
}

TEST_CASE("mock backends behave per contract") {
    const auto& q = test_bank().item_for(1);
    TrialPlan plan;
    plan.template_id = 1;
    plan.condition = cond_e2();
    plan.rotation = 2;
    plan.session_id = make_session_id(plan.condition, 1, 0);

    BackendRequest req;
    req.plan = plan;
    req.question = &q;
    req.prompt = build_prompt(plan, q);

    MockPerfectBackend perfect;
    const auto pr = perfect.complete(req);
    const std::string expect = std::string("(") +
        static_cast<char>('a' + displayed_correct_index(q, plan.rotation)) + ")";
    CHECK(pr.text == expect);
    CHECK(pr.cost_dollars == Catch::Approx(0.01));
    CHECK(pr.latency_seconds >= 1.0);
    CHECK(pr.latency_seconds <= 5.0);

    MockUniformBackend uniform;
    const auto u1 = uniform.complete(req);
    const auto u2 = uniform.complete(req);
    CHECK(u1.text == u2.text);  // same session id, same draw
}
