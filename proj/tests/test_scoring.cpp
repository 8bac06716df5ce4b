#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vlbench/qbank.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/runner.hpp"
#include "vlbench/scoring.hpp"

using namespace vlbench;
using score_detail::extract_numbers;
using score_detail::parse_choice;

namespace {

const ItemBank& bank() {
    static const ItemBank b = build_item_bank(600, ContextMode::Contextualized);
    return b;
}

TrialRecord make_record(const QuestionItem& q, bool choices, int rotation,
                        const std::string& reply) {
    TrialRecord r;
    r.plan.template_id = q.template_id;
    r.plan.condition = {false, choices, ContextMode::Contextualized, "m"};
    r.plan.rotation = rotation;
    r.plan.session_id = make_session_id(r.plan.condition, q.template_id, 0);
    r.raw_response = reply;
    return r;
}

ScoreRecord score_trial(const TrialRecord& rec) {
    return vlbench::score_trial(rec, bank().item_for(rec.plan.template_id));
}

}  // namespace

TEST_CASE("choice parsing handles the common reply shapes") {
    CHECK(parse_choice("(a)", 4).displayed_index == 0);
    CHECK(parse_choice("The answer is (b).", 4).displayed_index == 1);
    CHECK(parse_choice("a", 4).displayed_index == 0);
    CHECK(parse_choice("b.", 4).displayed_index == 1);
    CHECK(parse_choice("(a) or (b)", 4).multi);
    CHECK(!parse_choice("banana", 4).displayed_index.has_value());
    CHECK(!parse_choice("", 4).displayed_index.has_value());
    // parenthesized letters win over incidental bare ones
    const auto p = parse_choice("a word, but the answer is (c)", 4);
    REQUIRE(p.displayed_index.has_value());
    CHECK(*p.displayed_index == 2);
    // letters outside the option range are ignored
    CHECK(!parse_choice("(d)", 3).displayed_index.has_value());
}

TEST_CASE("number extraction") {
    CHECK(extract_numbers("1,234.5") == std::vector<double>{1234.5});
    CHECK(extract_numbers("3/4") == std::vector<double>{0.75});
    CHECK(extract_numbers("$45 and 50%") == std::vector<double>{45, 50});
    CHECK(extract_numbers("no digits here").empty());
    CHECK(extract_numbers("between 10 and 20") == std::vector<double>{10, 20});
    CHECK(score_detail::distinct_numbers({5, 5.0, 7, 5}) == std::vector<double>{5, 7});
}

TEST_CASE("synonym table") {
    const auto builtin = SynonymTable::builtin();
    CHECK(builtin.size() == 5);
    CHECK(builtin.apply("Inverse") == "False");
    CHECK(builtin.apply("  inverse ") == "False");  // case and whitespace insensitive
    CHECK(builtin.apply("Correct") == "True");
    CHECK(builtin.apply("nonsense") == "nonsense");

    SynonymTable t;
    t.add("up", "Increasing");
    t.add("up", "Decreasing");  // first match wins
    CHECK(t.apply("UP") == "Increasing");

    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "vlbench_syn_test.json";
    {
        std::ofstream f(path);
        f << R"([{"from": "roughly flat", "to": "Constant"}])";
    }
    const auto loaded = SynonymTable::load(path.string());
    CHECK(loaded.apply("Roughly Flat") == "Constant");
    fs::remove(path);
    CHECK_THROWS_AS(SynonymTable::load("/nonexistent/syn.json"), ConfigInvalid);
}

TEST_CASE("relative error") {
    CHECK(relative_error(110, 100) == Catch::Approx(0.1));
    CHECK(relative_error(90, 100) == Catch::Approx(0.1));
    CHECK_THROWS_AS(relative_error(1, 0), ZeroTruth);
}

TEST_CASE("overlap metrics reproduce the worked examples exactly") {
    const auto j = range_overlap_metrics(1, 4, 3, 6);
    CHECK(j.jaccard == 0.2);

    const auto d = range_overlap_metrics(0, 4, 2, 6);
    CHECK(d.dice == 0.4);

    const auto o = range_overlap_metrics(1, 3, 2, 8);
    CHECK(o.overlap_coef == 0.5);
    CHECK(o.percentage == 0.5);

    // identical intervals saturate everything
    const auto id = range_overlap_metrics(2, 5, 2, 5);
    CHECK(id.jaccard == 1.0);
    CHECK(id.dice == 1.0);
    CHECK(id.overlap_coef == 1.0);

    // disjoint intervals zero everything
    const auto z = range_overlap_metrics(0, 1, 2, 3);
    CHECK(z.jaccard == 0.0);
    CHECK(z.dice == 0.0);
    CHECK(z.overlap_coef == 0.0);
}

TEST_CASE("overlap metrics degenerate cases") {
    // a point inside an interval counts as full containment
    const auto in = range_overlap_metrics(2, 2, 1, 3);
    CHECK(in.overlap_coef == 1.0);
    CHECK(in.percentage == 1.0);
    CHECK(in.jaccard == 0.0);

    const auto out = range_overlap_metrics(5, 5, 1, 3);
    CHECK(out.overlap_coef == 0.0);

    CHECK_THROWS_AS(range_overlap_metrics(2, 2, 3, 3), BothDegenerate);
}

TEST_CASE("overlap metric properties hold over random pairs") {
    Rng r(77);
    for (int i = 0; i < 2000; ++i) {
        const double a = r.uniform() * 100, b = a + r.uniform() * 50 + 0.01;
        const double c = r.uniform() * 100, d = c + r.uniform() * 50 + 0.01;
        const auto m = range_overlap_metrics(a, b, c, d);
        const auto sw = range_overlap_metrics(c, d, a, b);
        CHECK(m.jaccard == Catch::Approx(sw.jaccard));
        CHECK(m.dice == Catch::Approx(sw.dice));
        CHECK(m.overlap_coef == Catch::Approx(sw.overlap_coef));
        CHECK(m.jaccard >= 0.0);
        CHECK(m.jaccard <= m.dice + 1e-12);
        CHECK(m.dice <= 1.0);
        CHECK(m.overlap_coef <= 1.0);
    }
}

TEST_CASE("error classification") {
    QuestionItem q;
    q.stem = "Which month has the lowest price of a barrel of oil?";
    CHECK(classify_error("", q) == ErrorCategory::Unknown);
    CHECK(classify_error("I cannot determine that.", q) == ErrorCategory::Unknown);
    CHECK(classify_error("unsure", q) == ErrorCategory::Unknown);
    CHECK(classify_error("month", q) == ErrorCategory::Unknown);  // word lifted from the stem
    CHECK(classify_error("xyz", q) == ErrorCategory::Random);
    CHECK(classify_error("As an AI I have my limits", q) == ErrorCategory::PromptEngineering);
    CHECK(classify_error("the image does not load", q) == ErrorCategory::PromptEngineering);
    CHECK(classify_error("somewhere in winter maybe", q) == ErrorCategory::Vague);
}

TEST_CASE("multiple-choice scoring resolves rotations back to canonical indexes") {
    const auto& q = bank().item_for(1);  // 4 options
    for (int rot = 0; rot < 4; ++rot) {
        const int disp = displayed_correct_index(q, rot);
        const std::string reply = std::string("(") + static_cast<char>('a' + disp) + ")";
        const auto s = score_trial(make_record(q, true, rot, reply));
        CHECK(s.parsed);
        CHECK(s.correct);
        CHECK(s.chosen_canonical_index == q.correct_index);

        const int wrong = (disp + 1) % 4;
        const auto w = score_trial(
            make_record(q, true, rot, std::string("(") + static_cast<char>('a' + wrong) + ")"));
        CHECK(w.parsed);
        CHECK(!w.correct);
        CHECK(w.chosen_canonical_index == (rot + wrong) % 4);
    }
}

TEST_CASE("a reply quoting one option's text counts as that choice") {
    const auto& q = bank().item_for(4);  // trend item; textual options
    const auto s = score_trial(make_record(q, true, 1, q.answer_text + "."));
    CHECK(s.parsed);
    CHECK(s.correct);
    CHECK(s.chosen_canonical_index == q.correct_index);
}

TEST_CASE("two distinct numbers in a choices reply mark it multi-answer") {
    const auto& q = bank().item_for(1);
    const auto s = score_trial(make_record(q, true, 0, "12 or 15"));
    CHECK(s.parsed);
    CHECK(s.multi_answer);
    CHECK(!s.correct);

    const auto u = score_trial(make_record(q, true, 0, "zzz"));
    CHECK(!u.parsed);
    CHECK(u.error_category == "Random");
}

TEST_CASE("open numeric scoring applies the tolerance and relative error") {
    const auto& q = bank().item_for(1);
    REQUIRE(q.kind == AnswerKind::Numeric);
    const auto s = score_trial(make_record(q, false, 0, format_number(q.answer_value, 4)));
    CHECK(s.parsed);
    CHECK(s.correct);
    REQUIRE(s.has_relative_error);
    CHECK(s.relative_error == Catch::Approx(0.0).margin(1e-4));

    const double off = q.answer_value * 2 + 10;
    const auto w = score_trial(make_record(q, false, 0, format_number(off, 4)));
    CHECK(w.parsed);
    CHECK(!w.correct);
    CHECK(w.has_relative_error);
    CHECK(w.relative_error > 0.5);
}

TEST_CASE("range-band answers accept any value inside the band") {
    const auto& q = bank().item_for(22);
    REQUIRE(q.kind == AnswerKind::RangeBand);
    const double mid = 0.5 * (q.answer_lo + q.answer_hi);
    CHECK(score_trial(make_record(q, false, 0, format_number(mid, 2))).correct);
    CHECK(score_trial(make_record(q, false, 0, format_number(q.answer_lo, 2))).correct);
    CHECK(!score_trial(make_record(q, false, 0, format_number(q.answer_hi + 50, 2))).correct);
}

TEST_CASE("interval replies to range questions are scored by overlap") {
    const auto& q = bank().item_for(3);
    REQUIRE(q.answer_hi > q.answer_lo);
    REQUIRE(q.answer_lo > 0);  // keeps the reply free of minus signs

    const std::string exact =
        "from " + format_number(q.answer_lo, 6) + " to " + format_number(q.answer_hi, 6);
    const auto s = score_trial(make_record(q, false, 0, exact));
    CHECK(s.parsed);
    REQUIRE(s.has_overlap);
    CHECK(s.overlap.jaccard >= 0.99);
    CHECK(s.correct);

    const std::string shifted = "from " + format_number(q.answer_lo + 1, 6) + " to " +
                                format_number(q.answer_hi + 1, 6);
    const auto w = score_trial(make_record(q, false, 0, shifted));
    CHECK(w.parsed);
    REQUIRE(w.has_overlap);
    CHECK(w.overlap.jaccard < 0.99);
    CHECK(!w.correct);
}

TEST_CASE("open text scoring normalizes synonyms and recognizes wrong options") {
    const auto& q = bank().item_for(4);  // Trend
    const auto s = score_trial(make_record(q, false, 0, lowercase(q.answer_text) + "."));
    CHECK(s.parsed);
    CHECK(s.correct);

    std::string wrong;
    for (const auto& o : q.options)
        if (o != q.answer_text) wrong = o;
    const auto w = score_trial(make_record(q, false, 0, wrong));
    CHECK(w.parsed);
    CHECK(!w.correct);

    const auto junk = score_trial(make_record(q, false, 0, "hard to say really"));
    CHECK(!junk.parsed);
    CHECK(junk.error_category == "Vague");

    // builtin synonym rewrite on a boolean item
    const auto& b = bank().item_for(13);
    REQUIRE(b.kind == AnswerKind::Boolean);
    const std::string synonym = b.answer_text == "True" ? "Correct" : "Inverse";
    CHECK(score_trial(make_record(b, false, 0, synonym)).correct);
}

TEST_CASE("transport errors are recorded without a parse attempt") {
    const auto& q = bank().item_for(1);
    auto rec = make_record(q, true, 0, "(a)");
    rec.error = "connection reset";
    const auto s = score_trial(rec);
    CHECK(s.transport_error);
    CHECK(!s.parsed);
    CHECK(!s.correct);
    CHECK(s.error_category == "Unknown");
}

TEST_CASE("score records serialize losslessly") {
    const auto& q = bank().item_for(3);
    const std::string exact =
        "from " + format_number(q.answer_lo, 6) + " to " + format_number(q.answer_hi, 6);
    const auto s = score_trial(make_record(q, false, 0, exact));
    const auto back = ScoreRecord::from_json(s.to_json());
    CHECK(back.to_json().dump() == s.to_json().dump());
    CHECK(back.has_overlap == s.has_overlap);
    CHECK(back.overlap.jaccard == s.overlap.jaccard);
}
