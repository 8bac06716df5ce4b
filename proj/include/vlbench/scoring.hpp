#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/trial.hpp"

namespace vlbench {

// ---------------------------------------------------------------------------
// Synonym normalization: an ordered list of case-insensitive whole-string
// rewrites; the first matching entry wins.
// ---------------------------------------------------------------------------

class SynonymTable {
public:
    void add(std::string from, std::string to) {
        entries_.emplace_back(std::move(from), std::move(to));
    }

    std::string apply(const std::string& text) const {
        const std::string key = lowercase(trim(text));
        for (const auto& [from, to] : entries_) {
            if (lowercase(from) == key) return to;
        }
        return text;
    }

    std::size_t size() const { return entries_.size(); }

    static SynonymTable builtin() {
        SynonymTable t;
        t.add("Inverse", "False");
        t.add("Correct", "True");
        t.add("Similar", "1/1");
        t.add("likely", "True");
        t.add("Doctoral study", "Postgraduate Study");
        return t;
    }

    // file format: [{"from": "...", "to": "..."}, ...] (order preserved)
    static SynonymTable load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigInvalid("cannot read synonym table " + path);
        json j;
        f >> j;
        if (!j.is_array()) throw ConfigInvalid("synonym table must be a JSON array");
        SynonymTable t;
        for (const auto& e : j) t.add(e.at("from"), e.at("to"));
        return t;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

struct ChoiceParse {
    std::optional<int> displayed_index;
    bool multi = false;
};

namespace score_detail {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// distinct option letters appearing either parenthesized or standalone
inline ChoiceParse parse_choice(const std::string& raw, int n_options) {
    const std::string s = lowercase(raw);
    std::set<int> paren, bare;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c < 'a' || c >= static_cast<char>('a' + n_options)) continue;
        const bool left_ok = i == 0 || !is_word_char(s[i - 1]);
        const bool right_ok = i + 1 == s.size() || !is_word_char(s[i + 1]);
        if (!left_ok || !right_ok) continue;
        const bool parenthesized = i > 0 && s[i - 1] == '(' && i + 1 < s.size() && s[i + 1] == ')';
        (parenthesized ? paren : bare).insert(c - 'a');
    }
    // parenthesized letters are unambiguous; fall back to bare ones
    const std::set<int>& pool = !paren.empty() ? paren : bare;
    ChoiceParse out;
    if (pool.empty()) return out;
    if (pool.size() >= 2) {
        out.multi = true;
        return out;
    }
    out.displayed_index = *pool.begin();
    return out;
}

// numeric tokens with currency/percent prefixes, thousands separators, and
// simple fractions ("3/4"); returns values in appearance order
inline std::vector<double> extract_numbers(const std::string& raw) {
    std::vector<double> out;
    const std::string& s = raw;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        // integer part with optional thousands separators
        std::size_t j = i;
        std::string digits;
        while (j < s.size()) {
            const char c = s[j];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                ++j;
            } else if (c == ',' && j + 3 < s.size() + 1 &&
                       j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1])) &&
                       j + 2 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 2])) &&
                       j + 3 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 3])) &&
                       (j + 4 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j + 4])))) {
                ++j;  // thousands separator
            } else {
                break;
            }
        }
        double value = std::stod(digits);
        if (j < s.size() && s[j] == '.' && j + 1 < s.size() &&
            std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
            std::string frac;
            ++j;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) frac += s[j++];
            value = std::stod(digits + "." + frac);
        }
        // fraction: numerator already parsed, slash, denominator
        if (j < s.size() && s[j] == '/' && j + 1 < s.size() &&
            std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
            std::size_t k = j + 1;
            std::string den;
            while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '.'))
                den += s[k++];
            const double d = std::stod(den);
            if (d != 0) {
                value /= d;
                j = k;
            }
        }
        out.push_back(value);
        i = j;
    }
    return out;
}

inline std::vector<double> distinct_numbers(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) {
        bool seen = false;
        for (double y : out)
            if (std::abs(x - y) < 1e-9) seen = true;
        if (!seen) out.push_back(x);
    }
    return out;
}

// strips wrapping punctuation and quotes for text comparison
inline std::string strip_punct(const std::string& s) {
    std::size_t b = 0, e = s.size();
    auto junk = [](char c) {
        return c == '.' || c == ',' || c == '!' || c == '"' || c == '\'' || c == '(' ||
               c == ')' || c == ':' || c == ';';
    };
    while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) || junk(s[b]))) ++b;
    while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) || junk(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace score_detail

inline double relative_error(double response, double truth) {
    if (truth == 0) throw ZeroTruth("relative error undefined for a zero reference value");
    return std::abs((response - truth) / truth);
}

// ---------------------------------------------------------------------------
// Interval overlap metrics
// ---------------------------------------------------------------------------

struct OverlapMetrics {
    double jaccard = 0;
    double dice = 0;
    double overlap_coef = 0;
    double percentage = 0;
};

// All four metrics are symmetric in the two intervals and clamped to [0, 1].
// The percentage metric divides the intersection length by the shorter
// interval's length, so either interval containing the other scores 1.
inline OverlapMetrics range_overlap_metrics(double a_lo, double a_hi, double b_lo, double b_hi) {
    if (a_lo > a_hi) std::swap(a_lo, a_hi);
    if (b_lo > b_hi) std::swap(b_lo, b_hi);
    const double len_a = a_hi - a_lo;
    const double len_b = b_hi - b_lo;
    if (len_a == 0 && len_b == 0)
        throw BothDegenerate("both intervals have zero length");

    const double inter = std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
    const double uni = len_a + len_b - inter;
    const double min_len = std::min(len_a, len_b);

    auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
    auto point_inside = [](double p, double lo, double hi) { return p >= lo && p <= hi; };

    OverlapMetrics m;
    m.jaccard = uni > 0 ? clamp01(inter / uni) : 0.0;
    // dice denominator uses union + shorter length, which matches the
    // published worked value (0.4 for [0,4] vs [2,6]) and keeps the metric
    // symmetric, 1 on identical intervals, 0 on disjoint ones, and >= jaccard
    m.dice = (uni + min_len) > 0 ? clamp01(2 * inter / (uni + min_len)) : 0.0;
    if (min_len > 0) {
        m.overlap_coef = clamp01(inter / min_len);
    } else {
        // a degenerate interval overlaps fully iff its point lies inside the other
        const double p = len_a == 0 ? a_lo : b_lo;
        const double lo = len_a == 0 ? b_lo : a_lo;
        const double hi = len_a == 0 ? b_hi : a_hi;
        m.overlap_coef = point_inside(p, lo, hi) ? 1.0 : 0.0;
    }
    m.percentage = m.overlap_coef;
    return m;
}

// ---------------------------------------------------------------------------
// Failure-mode classification for unparseable responses
// ---------------------------------------------------------------------------

enum class ErrorCategory { Random, Vague, Unknown, PromptEngineering };

inline std::string to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Random: return "Random";
        case ErrorCategory::Vague: return "Vague";
        case ErrorCategory::Unknown: return "Unknown";
        case ErrorCategory::PromptEngineering: return "PromptEngineering";
    }
    return "Vague";
}

inline ErrorCategory classify_error(const std::string& raw, const QuestionItem& q) {
    const std::string s = lowercase(trim(raw));
    if (s.empty()) return ErrorCategory::Unknown;

    static const char* refusals[] = {"unknown",    "unsure",     "uncertain", "indeterminate",
                                     "cannot",     "can't",      "unable",    "not sure",
                                     "no answer",  "n/a",        "none",      "don't know",
                                     "do not know"};
    for (const char* r : refusals)
        if (s.find(r) != std::string::npos) return ErrorCategory::Unknown;

    static const char* prompty[] = {"as an ai",  "language model", "provide the image",
                                    "the image", "more context",   "please provide",
                                    "prompt",    "i'm sorry",      "i am sorry"};
    for (const char* p : prompty)
        if (s.find(p) != std::string::npos) return ErrorCategory::PromptEngineering;

    // a single word lifted from the question itself answers nothing
    if (s.find(' ') == std::string::npos) {
        const std::string stem = lowercase(q.stem);
        std::size_t pos = 0;
        while ((pos = stem.find(s, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !score_detail::is_word_char(stem[pos - 1]);
            const std::size_t end = pos + s.size();
            const bool right_ok = end >= stem.size() || !score_detail::is_word_char(stem[end]);
            if (left_ok && right_ok) return ErrorCategory::Unknown;
            ++pos;
        }
    }

    // strings with no vowels and no digits read as keyboard noise
    bool has_vowel = false, has_digit = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) has_digit = true;
        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') has_vowel = true;
    }
    if (!has_vowel && !has_digit) return ErrorCategory::Random;

    return ErrorCategory::Vague;
}

// ---------------------------------------------------------------------------
// Score records
// ---------------------------------------------------------------------------

struct ScoreRecord {
    std::string session_id;
    int template_id = 0;
    ChartType chart_type = ChartType::Line;
    TaskType task_type = TaskType::RetrieveValue;
    Condition condition;
    bool correct = false;
    bool parsed = false;
    bool multi_answer = false;
    bool transport_error = false;
    int chosen_canonical_index = -1;  // multiple-choice only, -1 when absent
    bool has_relative_error = false;
    double relative_error = 0;
    bool has_overlap = false;
    OverlapMetrics overlap;
    std::string error_category;  // set when the response was unusable

    json to_json() const {
        json j = {{"session_id", session_id},
                  {"template_id", template_id},
                  {"chart_type", vlbench::to_string(chart_type)},
                  {"task_type", vlbench::to_string(task_type)},
                  {"condition", condition.to_json()},
                  {"correct", correct},
                  {"parsed", parsed},
                  {"multi_answer", multi_answer},
                  {"transport_error", transport_error},
                  {"chosen_canonical_index", chosen_canonical_index},
                  {"error_category", error_category}};
        if (has_relative_error) j["relative_error"] = relative_error;
        if (has_overlap)
            j["overlap"] = {{"jaccard", overlap.jaccard},
                            {"dice", overlap.dice},
                            {"overlap_coef", overlap.overlap_coef},
                            {"percentage", overlap.percentage}};
        return j;
    }

    static ScoreRecord from_json(const json& j) {
        ScoreRecord r;
        r.session_id = j.at("session_id");
        r.template_id = j.at("template_id");
        r.chart_type = chart_type_from_string(j.at("chart_type").get<std::string>());
        r.task_type = task_type_from_string(j.at("task_type").get<std::string>());
        r.condition = Condition::from_json(j.at("condition"));
        r.correct = j.at("correct");
        r.parsed = j.at("parsed");
        r.multi_answer = j.at("multi_answer");
        r.transport_error = j.at("transport_error");
        r.chosen_canonical_index = j.at("chosen_canonical_index");
        r.error_category = j.at("error_category");
        if (j.contains("relative_error")) {
            r.has_relative_error = true;
            r.relative_error = j["relative_error"];
        }
        if (j.contains("overlap")) {
            r.has_overlap = true;
            r.overlap.jaccard = j["overlap"]["jaccard"];
            r.overlap.dice = j["overlap"]["dice"];
            r.overlap.overlap_coef = j["overlap"]["overlap_coef"];
            r.overlap.percentage = j["overlap"]["percentage"];
        }
        return r;
    }
};

namespace score_detail {

inline void score_choices(ScoreRecord& out, const TrialRecord& rec, const QuestionItem& q,
                          const SynonymTable& syn) {
    const int k = static_cast<int>(q.options.size());
    const ChoiceParse parse = parse_choice(rec.raw_response, k);
    if (parse.multi) {
        out.parsed = true;
        out.multi_answer = true;
        return;
    }
    int displayed = -1;
    if (parse.displayed_index) {
        displayed = *parse.displayed_index;
    } else {
        // a reply quoting exactly one option's text still identifies a choice
        const std::string norm = lowercase(strip_punct(syn.apply(rec.raw_response)));
        int match = -1, n_matches = 0;
        const auto opts = rotated_options(q, rec.plan.rotation);
        for (int i = 0; i < k; ++i) {
            if (lowercase(opts[static_cast<std::size_t>(i)]) == norm) {
                match = i;
                ++n_matches;
            }
        }
        if (n_matches == 1) displayed = match;
    }
    if (displayed < 0) {
        if (distinct_numbers(extract_numbers(rec.raw_response)).size() >= 2) {
            out.parsed = true;
            out.multi_answer = true;
            return;
        }
        out.error_category = to_string(classify_error(rec.raw_response, q));
        return;
    }
    out.parsed = true;
    out.chosen_canonical_index = (rec.plan.rotation + displayed) % k;
    out.correct = out.chosen_canonical_index == q.correct_index;
}

inline void score_open(ScoreRecord& out, const TrialRecord& rec, const QuestionItem& q,
                       const SynonymTable& syn) {
    const std::string normalized = syn.apply(strip_punct(rec.raw_response));

    if (q.kind == AnswerKind::Numeric || q.kind == AnswerKind::RangeBand) {
        const auto nums = distinct_numbers(extract_numbers(normalized));
        const bool interval_truth = q.answer_hi > q.answer_lo;
        if (nums.empty()) {
            out.error_category = to_string(classify_error(rec.raw_response, q));
            return;
        }
        if (interval_truth && nums.size() == 2) {
            // an interval reply to an interval-valued question is scored by overlap
            out.parsed = true;
            out.has_overlap = true;
            out.overlap = range_overlap_metrics(q.answer_lo, q.answer_hi,
                                                std::min(nums[0], nums[1]),
                                                std::max(nums[0], nums[1]));
            out.correct = out.overlap.jaccard >= 0.99;
            return;
        }
        if (nums.size() >= 2) {
            out.parsed = true;
            out.multi_answer = true;
            return;
        }
        const double r = nums[0];
        out.parsed = true;
        if (q.kind == AnswerKind::RangeBand) {
            out.correct = r >= q.answer_lo && r <= q.answer_hi;
        } else {
            out.correct = std::abs(r - q.answer_value) <= q.tolerance + 1e-9;
        }
        if (q.answer_value != 0) {
            out.has_relative_error = true;
            out.relative_error = relative_error(r, q.answer_value);
        }
        return;
    }

    // text answers: booleans, trends, labels
    const std::string norm = lowercase(trim(normalized));
    if (norm.empty()) {
        out.error_category = to_string(classify_error(rec.raw_response, q));
        return;
    }
    if (norm == lowercase(q.answer_text)) {
        out.parsed = true;
        out.correct = true;
        return;
    }
    for (const auto& opt : q.options) {
        if (norm == lowercase(opt)) {
            out.parsed = true;  // a valid but wrong option
            return;
        }
    }
    out.error_category = to_string(classify_error(rec.raw_response, q));
}

}  // namespace score_detail

inline ScoreRecord score_trial(const TrialRecord& rec, const QuestionItem& q,
                               const SynonymTable& syn = SynonymTable::builtin()) {
    ScoreRecord out;
    out.session_id = rec.plan.session_id;
    out.template_id = rec.plan.template_id;
    out.chart_type = q.chart_type;
    out.task_type = q.task_type;
    out.condition = rec.plan.condition;

    if (!rec.error.empty()) {
        out.transport_error = true;
        out.error_category = to_string(ErrorCategory::Unknown);
        return out;
    }
    if (rec.plan.condition.choices_present) {
        score_detail::score_choices(out, rec, q, syn);
    } else {
        score_detail::score_open(out, rec, q, syn);
    }
    return out;
}

inline std::vector<ScoreRecord> score_trials(const std::vector<TrialRecord>& records,
                                             const ItemBank& bank,
                                             const SynonymTable& syn = SynonymTable::builtin()) {
    std::vector<ScoreRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(score_trial(r, bank.item_for(r.plan.template_id), syn));
    return out;
}

}  // namespace vlbench
