#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "icl/gateway.hpp"
#include "icl/task.hpp"

namespace icl {

enum class ScoreMode { compliance_and_learning, learning_only };

std::string_view score_mode_name(ScoreMode mode);
ScoreMode score_mode_from_name(std::string_view name);

struct ParseResult {
  enum class Kind { label, integer, error };
  Kind kind = Kind::error;
  long long value = 0;
  std::string error_kind;  // empty | foreign_token | truncated
};

// Never throws: every failure is a parse_error value. Binary tasks take the
// first standalone 0/1 token; CoT outputs prefer the token after the final
// "the answer is" cue; integer tasks take the first parseable integer.
ParseResult parse_output(const std::string& raw, bool binary_task, bool cot_mode);

// Percent accuracy over records sharing one grid cell. compliance_and_learning
// counts parse and transport failures as incorrect; learning_only drops them
// from the denominator. Out-of-token records are excluded from both per the
// aggregate-reporting rule.
double accuracy(const std::vector<RunRecord>& records, ScoreMode mode);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Closed-form least squares; throws DegenerateFitError when all xs coincide.
OlsFit ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct CellKey {
  std::string model;
  std::string task;
  std::string strategy;
  int shots = 0;
  double delta = 0.0;
  auto operator<=>(const CellKey&) const = default;
};

struct CellStats {
  double accuracy = 0.0;
  int n = 0;
  double parse_error_rate = 0.0;
};

struct MetricsTable {
  std::map<CellKey, CellStats> cells;
};

MetricsTable build_metrics(const std::vector<RunRecord>& records, ScoreMode mode);

struct AggregateResult {
  double mean = 0.0;
  double sigma = 0.0;  // population sigma over the aggregated cells
  int cells = 0;
};

// Mean +/- sigma over every cell the filter admits. Throws UndefinedCellError
// when nothing matches.
AggregateResult aggregate(const MetricsTable& table,
                          const std::function<bool(const CellKey&)>& filter);

// Slope tables and plot data. Shot- and delta-axis fits use ordinal level
// indices; the raw-axis fits are emitted alongside for comparison.
void emit_report(const MetricsTable& table, const std::filesystem::path& dir,
                 const std::string& score_mode_label);

}  // namespace icl
