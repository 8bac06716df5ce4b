#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vlbench {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const { return "Error"; }
};

#define VLBENCH_DEFINE_ERROR(Name)                           \
    struct Name : Error {                                    \
        using Error::Error;                                  \
        const char* kind() const override { return #Name; }  \
    }

VLBENCH_DEFINE_ERROR(ConstraintUnsatisfiable);
VLBENCH_DEFINE_ERROR(IncompatibleConstraint);
VLBENCH_DEFINE_ERROR(RenderFailure);
VLBENCH_DEFINE_ERROR(NotDecontextualizable);
VLBENCH_DEFINE_ERROR(ConstraintViolation);
VLBENCH_DEFINE_ERROR(DistractorExhaustion);
VLBENCH_DEFINE_ERROR(MissingChart);
VLBENCH_DEFINE_ERROR(IndivisibleRepetition);
VLBENCH_DEFINE_ERROR(BackendUnavailable);
VLBENCH_DEFINE_ERROR(TransportError);
VLBENCH_DEFINE_ERROR(ZeroTruth);
VLBENCH_DEFINE_ERROR(BothDegenerate);
VLBENCH_DEFINE_ERROR(UnknownDimensionValue);
VLBENCH_DEFINE_ERROR(NonConvergence);
VLBENCH_DEFINE_ERROR(EmptyGrid);
VLBENCH_DEFINE_ERROR(InsufficientSamples);
VLBENCH_DEFINE_ERROR(LengthMismatch);
VLBENCH_DEFINE_ERROR(UntestedCell);
VLBENCH_DEFINE_ERROR(MissingStageInput);
VLBENCH_DEFINE_ERROR(ConfigInvalid);

#undef VLBENCH_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Chart and task taxonomies
// ---------------------------------------------------------------------------

enum class ChartType {
    Line,
    Bar,
    StackedBar,
    StackedBar100,
    Pie,
    Histogram,
    Scatterplot,
    Area,
    StackedArea,
    Bubble,
    Choropleth,
    Treemap,
};

inline constexpr std::array<ChartType, 12> kAllChartTypes = {
    ChartType::Line,        ChartType::Bar,    ChartType::StackedBar,
    ChartType::StackedBar100, ChartType::Pie,  ChartType::Histogram,
    ChartType::Scatterplot, ChartType::Area,   ChartType::StackedArea,
    ChartType::Bubble,      ChartType::Choropleth, ChartType::Treemap,
};

inline std::string to_string(ChartType t) {
    switch (t) {
        case ChartType::Line: return "line";
        case ChartType::Bar: return "bar";
        case ChartType::StackedBar: return "stacked-bar";
        case ChartType::StackedBar100: return "stacked-bar-100";
        case ChartType::Pie: return "pie";
        case ChartType::Histogram: return "histogram";
        case ChartType::Scatterplot: return "scatterplot";
        case ChartType::Area: return "area";
        case ChartType::StackedArea: return "stacked-area";
        case ChartType::Bubble: return "bubble";
        case ChartType::Choropleth: return "choropleth";
        case ChartType::Treemap: return "treemap";
    }
    throw Error("bad ChartType");
}

inline ChartType chart_type_from_string(std::string_view s) {
    for (ChartType t : kAllChartTypes)
        if (to_string(t) == s) return t;
    throw UnknownDimensionValue("unknown chart type: " + std::string(s));
}

enum class TaskType {
    RetrieveValue,
    FindExtremum,
    DetermineRange,
    FindCorrelationTrend,
    MakeComparisons,
    FindAnomalies,
    FindClusters,
    IdentifyHierarchy,
};

inline constexpr std::array<TaskType, 8> kAllTaskTypes = {
    TaskType::RetrieveValue,  TaskType::FindExtremum,   TaskType::DetermineRange,
    TaskType::FindCorrelationTrend, TaskType::MakeComparisons, TaskType::FindAnomalies,
    TaskType::FindClusters,   TaskType::IdentifyHierarchy,
};

inline std::string to_string(TaskType t) {
    switch (t) {
        case TaskType::RetrieveValue: return "Retrieve Value";
        case TaskType::FindExtremum: return "Find Extremum";
        case TaskType::DetermineRange: return "Determine Range";
        case TaskType::FindCorrelationTrend: return "Find Correlation/Trend";
        case TaskType::MakeComparisons: return "Make Comparisons";
        case TaskType::FindAnomalies: return "Find Anomalies";
        case TaskType::FindClusters: return "Find Clusters";
        case TaskType::IdentifyHierarchy: return "Identify the Hierarchical Structure";
    }
    throw Error("bad TaskType");
}

inline TaskType task_type_from_string(std::string_view s) {
    for (TaskType t : kAllTaskTypes)
        if (to_string(t) == s) return t;
    throw UnknownDimensionValue("unknown task type: " + std::string(s));
}

enum class ContextMode { Contextualized, Decontextualized };

inline std::string to_string(ContextMode m) {
    return m == ContextMode::Contextualized ? "contextualized" : "decontextualized";
}

inline ContextMode context_mode_from_string(std::string_view s) {
    if (s == "contextualized") return ContextMode::Contextualized;
    if (s == "decontextualized") return ContextMode::Decontextualized;
    throw UnknownDimensionValue("unknown context mode: " + std::string(s));
}

enum class TrendDirection { Increasing, Decreasing, Constant };

inline std::string to_string(TrendDirection d) {
    switch (d) {
        case TrendDirection::Increasing: return "increasing";
        case TrendDirection::Decreasing: return "decreasing";
        case TrendDirection::Constant: return "constant";
    }
    throw Error("bad TrendDirection");
}

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

// Stable numeric formatting: fixed decimals derived from the value grid, with
// trailing zeros trimmed. Used everywhere an answer value becomes text so that
// option construction, manifests, and scoring agree on representation.
inline std::string format_number(double v, int max_decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", max_decimals, v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

inline bool almost_equal(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol;
}

}  // namespace vlbench
