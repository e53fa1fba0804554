#include "icl/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "icl/errors.hpp"
#include "icl/fsio.hpp"
#include "icl/text.hpp"

namespace icl {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> standalone_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  // Strip punctuation fringes so "0." or "(1)" still count as labels.
  for (std::string& tok : out) {
    std::size_t b = 0, e = tok.size();
    auto is_punct = [](char c) {
      return std::string_view("()[]{}\"'`.,:;!?*").find(c) != std::string_view::npos;
    };
    while (b < e && is_punct(tok[b])) ++b;
    while (e > b && is_punct(tok[e - 1])) --e;
    tok = tok.substr(b, e - b);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& t) { return t.empty(); }),
            out.end());
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_delta(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string_view score_mode_name(ScoreMode mode) {
  return mode == ScoreMode::compliance_and_learning ? "compliance_and_learning" : "learning_only";
}

ScoreMode score_mode_from_name(std::string_view name) {
  if (name == "compliance_and_learning") return ScoreMode::compliance_and_learning;
  if (name == "learning_only") return ScoreMode::learning_only;
  throw ConfigError("unknown score mode '" + std::string(name) + "'");
}

ParseResult parse_output(const std::string& raw, bool binary_task, bool cot_mode) {
  std::string trimmed(trim(raw));
  if (trimmed.empty()) return {ParseResult::Kind::error, 0, "empty"};

  if (cot_mode) {
    const std::string cue = "the answer is";
    std::string low = lowercase(trimmed);
    std::size_t pos = low.rfind(cue);
    if (pos != std::string::npos) {
      for (const std::string& tok : standalone_tokens(trimmed.substr(pos + cue.size()))) {
        if (is_integer_token(tok)) {
          long long v = std::stoll(tok);
          if (!binary_task || v == 0 || v == 1) {
            return {binary_task ? ParseResult::Kind::label : ParseResult::Kind::integer, v, ""};
          }
        }
      }
    }
  }

  for (const std::string& tok : standalone_tokens(trimmed)) {
    if (binary_task) {
      if (tok == "0" || tok == "1") return {ParseResult::Kind::label, tok == "1" ? 1 : 0, ""};
    } else if (is_integer_token(tok)) {
      return {ParseResult::Kind::integer, std::stoll(tok), ""};
    }
  }
  // A trace that never reached its answer line was cut off; anything else is
  // a foreign token.
  return {ParseResult::Kind::error, 0, cot_mode ? "truncated" : "foreign_token"};
}

double accuracy(const std::vector<RunRecord>& records, ScoreMode mode) {
  long long n = 0, correct = 0;
  for (const RunRecord& r : records) {
    if (r.outcome == "out_of_tokens") continue;
    bool parsed = r.outcome == "label" || r.outcome == "integer";
    if (mode == ScoreMode::learning_only && !parsed) continue;
    ++n;
    if (parsed && r.correct) ++correct;
  }
  if (n == 0) throw UndefinedCellError("accuracy over an empty record set");
  return 100.0 * static_cast<double>(correct) / static_cast<double>(n);
}

OlsFit ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DegenerateFitError("ols_slope needs at least two points");
  }
  const double n = static_cast<double>(xs.size());
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) throw DegenerateFitError("ols_slope: all x values coincide");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

MetricsTable build_metrics(const std::vector<RunRecord>& records, ScoreMode mode) {
  std::map<CellKey, std::vector<RunRecord>> grouped;
  for (const RunRecord& r : records) {
    grouped[{r.model, r.task, r.strategy, r.shots, r.delta}].push_back(r);
  }
  MetricsTable table;
  for (const auto& [key, cell_records] : grouped) {
    CellStats stats;
    long long counted = 0, errors = 0;
    for (const RunRecord& r : cell_records) {
      if (r.outcome == "out_of_tokens") continue;
      ++counted;
      if (r.outcome != "label" && r.outcome != "integer") ++errors;
    }
    if (counted == 0) continue;  // cell fully excluded
    stats.n = static_cast<int>(counted);
    stats.accuracy = accuracy(cell_records, mode);
    stats.parse_error_rate = 100.0 * static_cast<double>(errors) / static_cast<double>(counted);
    table.cells[key] = stats;
  }
  return table;
}

AggregateResult aggregate(const MetricsTable& table,
                          const std::function<bool(const CellKey&)>& filter) {
  std::vector<double> values;
  for (const auto& [key, stats] : table.cells) {
    if (filter(key)) values.push_back(stats.accuracy);
  }
  if (values.empty()) throw UndefinedCellError("aggregate over an empty cell set");
  AggregateResult out;
  out.cells = static_cast<int>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  for (double v : values) out.sigma += (v - out.mean) * (v - out.mean);
  out.sigma = std::sqrt(out.sigma / static_cast<double>(values.size()));
  return out;
}

namespace {

template <typename T>
std::vector<T> sorted_unique(std::set<T> s) {
  return std::vector<T>(s.begin(), s.end());
}

int index_of(const std::vector<int>& v, int x) {
  return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
}

int index_of(const std::vector<double>& v, double x) {
  return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

void emit_report(const MetricsTable& table, const std::filesystem::path& dir,
                 const std::string& score_mode_label) {
  std::set<std::string> models, tasks, strategies;
  std::set<int> shot_set;
  std::set<double> delta_set;
  for (const auto& [key, stats] : table.cells) {
    models.insert(key.model);
    tasks.insert(key.task);
    strategies.insert(key.strategy);
    shot_set.insert(key.shots);
    delta_set.insert(key.delta);
  }
  const std::vector<int> shots = sorted_unique(shot_set);
  const std::vector<double> deltas = sorted_unique(delta_set);

  // Cell-level table.
  {
    std::ostringstream out;
    out << "model,task,strategy,shots,delta,n,accuracy,parse_error_rate\n";
    for (const auto& [key, stats] : table.cells) {
      out << key.model << "," << key.task << "," << key.strategy << "," << key.shots << ","
          << fmt_delta(key.delta) << "," << stats.n << "," << fmt(stats.accuracy) << ","
          << fmt(stats.parse_error_rate) << "\n";
    }
    write_file_atomic(dir / "cells.csv", out.str());
  }

  auto mean_over = [&](const std::string& model, const std::string& strategy,
                       const std::function<bool(const CellKey&)>& extra) -> std::vector<double> {
    std::vector<double> acc;
    for (const auto& [key, stats] : table.cells) {
      if (key.model == model && key.strategy == strategy && extra(key)) {
        acc.push_back(stats.accuracy);
      }
    }
    return acc;
  };

  // Slopes over shot and delta level indices, plus raw-axis fits.
  {
    std::ostringstream out;
    out << "model,strategy,axis,x_scale,slope,intercept,points\n";
    for (const std::string& model : models) {
      for (const std::string& strategy : strategies) {
        // Shot axis: per-level means over (task, delta).
        std::vector<double> xs_idx, xs_raw, ys;
        for (int s : shots) {
          auto acc = mean_over(model, strategy, [&](const CellKey& k) { return k.shots == s; });
          if (acc.empty()) continue;
          double mean = 0;
          for (double v : acc) mean += v;
          mean /= static_cast<double>(acc.size());
          xs_idx.push_back(index_of(shots, s));
          xs_raw.push_back(s);
          ys.push_back(mean);
        }
        if (xs_idx.size() >= 2 && std::set<double>(xs_idx.begin(), xs_idx.end()).size() >= 2) {
          OlsFit by_index = ols_slope(xs_idx, ys);
          OlsFit by_raw = ols_slope(xs_raw, ys);
          out << model << "," << strategy << ",shots,index," << fmt(by_index.slope) << ","
              << fmt(by_index.intercept) << "," << xs_idx.size() << "\n";
          out << model << "," << strategy << ",shots,raw," << fmt(by_raw.slope) << ","
              << fmt(by_raw.intercept) << "," << xs_raw.size() << "\n";
        }
        // Delta axis.
        xs_idx.clear();
        xs_raw.clear();
        ys.clear();
        for (double d : deltas) {
          auto acc = mean_over(model, strategy, [&](const CellKey& k) { return k.delta == d; });
          if (acc.empty()) continue;
          double mean = 0;
          for (double v : acc) mean += v;
          mean /= static_cast<double>(acc.size());
          xs_idx.push_back(index_of(deltas, d));
          xs_raw.push_back(d);
          ys.push_back(mean);
        }
        if (xs_idx.size() >= 2 && std::set<double>(xs_idx.begin(), xs_idx.end()).size() >= 2) {
          OlsFit by_index = ols_slope(xs_idx, ys);
          OlsFit by_raw = ols_slope(xs_raw, ys);
          out << model << "," << strategy << ",delta,index," << fmt(by_index.slope) << ","
              << fmt(by_index.intercept) << "," << xs_idx.size() << "\n";
          out << model << "," << strategy << ",delta,raw," << fmt(by_raw.slope) << ","
              << fmt(by_raw.intercept) << "," << xs_raw.size() << "\n";
        }
      }
    }
    write_file_atomic(dir / "slopes.csv", out.str());
  }

  // Plot data: accuracy vs shots with per-shot delta fan-out, aggregated over
  // tasks (mean +/- sigma).
  {
    std::ostringstream out;
    out << "model,strategy,delta,shot_index,shots,accuracy,sigma\n";
    for (const std::string& model : models) {
      for (const std::string& strategy : strategies) {
        for (double d : deltas) {
          for (int s : shots) {
            std::vector<double> acc = mean_over(model, strategy, [&](const CellKey& k) {
              return k.delta == d && k.shots == s;
            });
            if (acc.empty()) continue;
            double mean = 0;
            for (double v : acc) mean += v;
            mean /= static_cast<double>(acc.size());
            double sigma = 0;
            for (double v : acc) sigma += (v - mean) * (v - mean);
            sigma = std::sqrt(sigma / static_cast<double>(acc.size()));
            out << model << "," << strategy << "," << fmt_delta(d) << "," << index_of(shots, s)
                << "," << s << "," << fmt(mean) << "," << fmt(sigma) << "\n";
          }
        }
      }
    }
    write_file_atomic(dir / "plot_accuracy_vs_shots.csv", out.str());
  }

  // Summary with every aggregate and its filter set.
  {
    std::ostringstream out;
    out << "# Run summary\n\nscore mode: " << score_mode_label << "\n\n";
    auto print_aggregate = [&](const std::string& label,
                               const std::function<bool(const CellKey&)>& f) {
      try {
        AggregateResult agg = aggregate(table, f);
        out << "- " << label << ": " << fmt(agg.mean) << " +/- " << fmt(agg.sigma) << " ("
            << agg.cells << " cells)\n";
      } catch (const UndefinedCellError&) {
      }
    };
    print_aggregate("all cells", [](const CellKey&) { return true; });
    print_aggregate("all cells excluding vm_sum",
                    [](const CellKey& k) { return k.task != "vm_sum"; });
    for (const std::string& model : models) {
      print_aggregate("model " + model, [&](const CellKey& k) { return k.model == model; });
    }
    for (const std::string& strategy : strategies) {
      print_aggregate("strategy " + strategy,
                      [&](const CellKey& k) { return k.strategy == strategy; });
    }
    for (const std::string& task : tasks) {
      print_aggregate("task " + task, [&](const CellKey& k) { return k.task == task; });
    }
    write_file_atomic(dir / "summary.md", out.str());
  }
}

}  // namespace icl
