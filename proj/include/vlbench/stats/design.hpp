#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/scoring.hpp"

namespace vlbench {

// strips a parenthesized variant tag, e.g. "Find Extremum (minimum)"
inline std::string simplify_task(const std::string& name) {
    const auto pos = name.find(" (");
    return pos == std::string::npos ? name : name.substr(0, pos);
}

// (chart type, task type) pairs covered by the question bank
inline std::set<std::pair<ChartType, TaskType>> tested_chart_task_pairs() {
    std::set<std::pair<ChartType, TaskType>> out;
    for (const auto& t : question_templates()) out.insert({t.chart, t.task});
    return out;
}

// Dummy-coded design over chart type (V), task type (T), model (L), and chart
// presence (P), with all interactions up to fourth order. Interactions with V
// and T together only get columns for tested (V,T) pairs.
class DesignMatrix {
public:
    DesignMatrix(std::vector<std::string> llm_ids, bool both_presence = true)
        : llm_ids_(std::move(llm_ids)) {
        if (llm_ids_.size() != 2)
            throw ConfigInvalid("design matrix expects exactly 2 model ids, got " +
                                std::to_string(llm_ids_.size()));
        presence_levels_ = both_presence ? std::vector<bool>{true, false}
                                         : std::vector<bool>{true};
        const auto tested = tested_chart_task_pairs();
        pairs_.assign(tested.begin(), tested.end());
        build_columns();
    }

    int n_columns() const { return static_cast<int>(columns_.size()); }
    const std::vector<std::string>& column_names() const { return columns_; }
    int n_one_way() const { return n1_; }
    int n_two_way() const { return n2_; }
    int n_three_way() const { return n3_; }
    int n_four_way() const { return n4_; }

    // indices of the active (value 1) columns for one observation
    std::vector<int> encode(ChartType v, TaskType t, const std::string& llm,
                            bool vis_present) const {
        const int li = llm_index(llm);
        if (!std::count(presence_levels_.begin(), presence_levels_.end(), vis_present))
            throw UnknownDimensionValue("presence level not in design");
        if (!pair_index_.count({v, t}))
            throw UnknownDimensionValue("chart/task pair not covered by the bank: " +
                                        vlbench::to_string(v) + " / " + vlbench::to_string(t));
        const std::string vs = vlbench::to_string(v);
        const std::string ts = simplify_task(vlbench::to_string(t));
        const std::string ls = llm_ids_[static_cast<std::size_t>(li)];
        const std::string ps = vis_present ? "vis" : "novis";

        std::vector<int> idx;
        idx.reserve(15);
        auto push = [&](const std::string& name) { idx.push_back(index_.at(name)); };
        push("V:" + vs);
        push("T:" + ts);
        push("L:" + ls);
        push("P:" + ps);
        push("VT:" + vs + "|" + ts);
        push("VL:" + vs + "|" + ls);
        push("VP:" + vs + "|" + ps);
        push("TL:" + ts + "|" + ls);
        push("TP:" + ts + "|" + ps);
        push("LP:" + ls + "|" + ps);
        push("VTL:" + vs + "|" + ts + "|" + ls);
        push("VTP:" + vs + "|" + ts + "|" + ps);
        push("VLP:" + vs + "|" + ls + "|" + ps);
        push("TLP:" + ts + "|" + ls + "|" + ps);
        push("VTLP:" + vs + "|" + ts + "|" + ls + "|" + ps);
        return idx;
    }

    std::vector<int> encode(const ScoreRecord& s) const {
        return encode(s.chart_type, s.task_type, s.condition.llm_id, s.condition.vis_present);
    }

    int llm_index(const std::string& llm) const {
        for (std::size_t i = 0; i < llm_ids_.size(); ++i)
            if (llm_ids_[i] == llm) return static_cast<int>(i);
        throw UnknownDimensionValue("model id not in design: " + llm);
    }

    const std::vector<std::string>& llm_ids() const { return llm_ids_; }
    const std::vector<bool>& presence_levels() const { return presence_levels_; }
    const std::vector<std::pair<ChartType, TaskType>>& tested_pairs() const { return pairs_; }

private:
    void build_columns() {
        auto add = [&](const std::string& name) {
            index_[name] = static_cast<int>(columns_.size());
            columns_.push_back(name);
        };
        std::vector<std::string> vs, ts, ls, ps;
        for (auto v : kAllChartTypes) vs.push_back(vlbench::to_string(v));
        for (auto t : kAllTaskTypes) ts.push_back(simplify_task(vlbench::to_string(t)));
        for (const auto& l : llm_ids_) ls.push_back(l);
        for (bool p : presence_levels_) ps.push_back(p ? "vis" : "novis");

        for (const auto& v : vs) add("V:" + v);
        for (const auto& t : ts) add("T:" + t);
        for (const auto& l : ls) add("L:" + l);
        for (const auto& p : ps) add("P:" + p);
        n1_ = static_cast<int>(columns_.size());

        for (const auto& [v, t] : pairs_) {
            pair_index_[{v, t}] = true;
            add("VT:" + vlbench::to_string(v) + "|" + simplify_task(vlbench::to_string(t)));
        }
        for (const auto& v : vs)
            for (const auto& l : ls) add("VL:" + v + "|" + l);
        for (const auto& v : vs)
            for (const auto& p : ps) add("VP:" + v + "|" + p);
        for (const auto& t : ts)
            for (const auto& l : ls) add("TL:" + t + "|" + l);
        for (const auto& t : ts)
            for (const auto& p : ps) add("TP:" + t + "|" + p);
        for (const auto& l : ls)
            for (const auto& p : ps) add("LP:" + l + "|" + p);
        n2_ = static_cast<int>(columns_.size()) - n1_;

        for (const auto& [v, t] : pairs_)
            for (const auto& l : ls)
                add("VTL:" + vlbench::to_string(v) + "|" + simplify_task(vlbench::to_string(t)) +
                    "|" + l);
        for (const auto& [v, t] : pairs_)
            for (const auto& p : ps)
                add("VTP:" + vlbench::to_string(v) + "|" + simplify_task(vlbench::to_string(t)) +
                    "|" + p);
        for (const auto& v : vs)
            for (const auto& l : ls)
                for (const auto& p : ps) add("VLP:" + v + "|" + l + "|" + p);
        for (const auto& t : ts)
            for (const auto& l : ls)
                for (const auto& p : ps) add("TLP:" + t + "|" + l + "|" + p);
        n3_ = static_cast<int>(columns_.size()) - n1_ - n2_;

        for (const auto& [v, t] : pairs_)
            for (const auto& l : ls)
                for (const auto& p : ps)
                    add("VTLP:" + vlbench::to_string(v) + "|" +
                        simplify_task(vlbench::to_string(t)) + "|" + l + "|" + p);
        n4_ = static_cast<int>(columns_.size()) - n1_ - n2_ - n3_;
    }

    std::vector<std::string> llm_ids_;
    std::vector<bool> presence_levels_;
    std::vector<std::pair<ChartType, TaskType>> pairs_;
    std::map<std::pair<ChartType, TaskType>, bool> pair_index_;
    std::vector<std::string> columns_;
    std::map<std::string, int> index_;
    int n1_ = 0, n2_ = 0, n3_ = 0, n4_ = 0;
};

// sparse observations: active column indices per row plus the 0/1 outcome
struct SparseDataset {
    std::vector<std::vector<int>> rows;
    std::vector<int> y;
    int n_columns = 0;
};

inline SparseDataset build_dataset(const DesignMatrix& dm, const std::vector<ScoreRecord>& scores) {
    SparseDataset d;
    d.n_columns = dm.n_columns();
    d.rows.reserve(scores.size());
    d.y.reserve(scores.size());
    for (const auto& s : scores) {
        d.rows.push_back(dm.encode(s));
        d.y.push_back(s.correct ? 1 : 0);
    }
    return d;
}

}  // namespace vlbench
