#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"

namespace vlbench {

struct Condition {
    bool vis_present = true;
    bool choices_present = true;
    ContextMode context_mode = ContextMode::Contextualized;
    std::string llm_id;

    std::string key() const {
        return std::string(vis_present ? "vis" : "novis") + "-" +
               (choices_present ? "choices" : "open") + "-" +
               (context_mode == ContextMode::Contextualized ? "ctx" : "dectx") + "-" + llm_id;
    }

    json to_json() const {
        return {{"vis_present", vis_present},
                {"choices_present", choices_present},
                {"context_mode", vlbench::to_string(context_mode)},
                {"llm_id", llm_id}};
    }

    static Condition from_json(const json& j) {
        Condition c;
        c.vis_present = j.at("vis_present");
        c.choices_present = j.at("choices_present");
        c.context_mode = context_mode_from_string(j.at("context_mode").get<std::string>());
        c.llm_id = j.at("llm_id");
        return c;
    }

    bool operator==(const Condition&) const = default;
};

struct TrialPlan {
    int template_id = 0;
    Condition condition;
    int rotation = 0;     // cyclic rotation of the canonical option order
    int repetition = 0;   // 0..n_per_question-1
    std::string session_id;

    json to_json() const {
        return {{"template_id", template_id},
                {"condition", condition.to_json()},
                {"rotation", rotation},
                {"repetition", repetition},
                {"session_id", session_id}};
    }

    static TrialPlan from_json(const json& j) {
        TrialPlan p;
        p.template_id = j.at("template_id");
        p.condition = Condition::from_json(j.at("condition"));
        p.rotation = j.at("rotation");
        p.repetition = j.at("repetition");
        p.session_id = j.at("session_id");
        return p;
    }
};

struct TrialRecord {
    TrialPlan plan;
    std::string prompt_text;
    bool image_attached = false;
    std::string raw_response;  // verbatim, untrimmed
    double latency_seconds = 0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    double cost_dollars = 0;
    std::int64_t timestamp_ms = 0;
    std::string backend_id;
    std::string error;  // transport failure note, empty on success
    int schema_version = 1;

    json to_json() const {
        return {{"schema_version", schema_version},
                {"plan", plan.to_json()},
                {"prompt_text", prompt_text},
                {"image_attached", image_attached},
                {"raw_response", raw_response},
                {"latency_seconds", latency_seconds},
                {"prompt_tokens", prompt_tokens},
                {"completion_tokens", completion_tokens},
                {"cost_dollars", cost_dollars},
                {"timestamp_ms", timestamp_ms},
                {"backend_id", backend_id},
                {"error", error}};
    }

    static TrialRecord from_json(const json& j) {
        TrialRecord r;
        r.schema_version = j.value("schema_version", 1);
        r.plan = TrialPlan::from_json(j.at("plan"));
        r.prompt_text = j.at("prompt_text");
        r.image_attached = j.at("image_attached");
        r.raw_response = j.at("raw_response");
        r.latency_seconds = j.at("latency_seconds");
        r.prompt_tokens = j.at("prompt_tokens");
        r.completion_tokens = j.at("completion_tokens");
        r.cost_dollars = j.at("cost_dollars");
        r.timestamp_ms = j.at("timestamp_ms");
        r.backend_id = j.at("backend_id");
        r.error = j.at("error");
        return r;
    }
};

// ---------------------------------------------------------------------------
// Prompts (verbatim experiment protocol strings)
// ---------------------------------------------------------------------------

inline const char* kPromptVisChoices =
    "You are a helpful assistant for analyzing data visualizations. Please answer with the "
    "letter corresponding to the best option, or make a random guess if unsure. For example, "
    "if option (a) is correct, only reply with (a).";
inline const char* kPromptNoVisChoices =
    "You are a helpful assistant for answering questions. Please answer with the letter "
    "corresponding to the best option, or make a random guess if unsure. For instance, if "
    "option (a) is correct, please reply with (a).";
inline const char* kPromptVisOpen =
    "You are a helpful assistant for analyzing data visualizations. Please answer with the "
    "best response in one word.";
inline const char* kPromptNoVisOpen =
    "You are a helpful assistant for answering questions. Please answer with the best "
    "response in one word.";

inline std::string system_prompt(const Condition& c) {
    if (c.choices_present) return c.vis_present ? kPromptVisChoices : kPromptNoVisChoices;
    return c.vis_present ? kPromptVisOpen : kPromptNoVisOpen;
}

// options as displayed under a cyclic rotation: displayed[i] = canonical[(i+r) % k]
inline std::vector<std::string> rotated_options(const QuestionItem& q, int rotation) {
    const int k = static_cast<int>(q.options.size());
    std::vector<std::string> out(q.options.size());
    for (int i = 0; i < k; ++i) out[i] = q.options[(i + rotation) % k];
    return out;
}

// displayed position of the correct option under a rotation
inline int displayed_correct_index(const QuestionItem& q, int rotation) {
    const int k = static_cast<int>(q.options.size());
    return ((q.correct_index - rotation) % k + k) % k;
}

// full prompt text: system instruction, stem, then options when present; the
// image (when attached) follows the question text
inline std::string build_prompt(const TrialPlan& plan, const QuestionItem& q) {
    std::string p = system_prompt(plan.condition);
    p += "\n\n";
    p += q.stem;
    if (plan.condition.choices_present) {
        const auto opts = rotated_options(q, plan.rotation);
        for (std::size_t i = 0; i < opts.size(); ++i) {
            p += "\n(";
            p += static_cast<char>('a' + i);
            p += ") " + opts[i];
        }
    }
    return p;
}

}  // namespace vlbench
