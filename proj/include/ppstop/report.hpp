#pragma once

// Output formats: line-delimited JSON records, fixed-width text tables, CSV
// series, and small static SVG line charts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppstop/harness.hpp"
#include "ppstop/ingest.hpp"
#include "ppstop/methods.hpp"
#include "ppstop/metrics.hpp"

namespace ppstop {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Structured records
// ---------------------------------------------------------------------------

inline json params_record(const MethodParams& p) {
  return {{"recall", p.target_recall}, {"confidence", p.confidence},
          {"alpha", p.alpha_frac},     {"beta", p.beta_frac},
          {"gamma", p.gamma},          {"delta", p.delta},
          {"target_count", p.target_count}, {"epsilon", p.epsilon}};
}

inline json topic_record(const MethodReport& r, const TopicResult& t) {
  return {{"type", "topic"},       {"method", r.method_name},
          {"run", r.run_tag},      {"topic", t.topic_id},
          {"size", t.size},        {"effort", t.effort},
          {"recall", t.recall},    {"acceptable", t.acceptable},
          {"predicted", t.predicted}};
}

inline json run_record(const MethodReport& r) {
  return {{"type", "run"},
          {"method", r.method_name},
          {"run", r.run_tag},
          {"topics", r.per_topic.size()},
          {"total_effort", r.total_effort},
          {"total_size", r.total_size},
          {"reliability", r.reliability},
          {"pct_effort_saved", r.mean_pct_effort_saved}};
}

inline json summary_record(const std::string& group, const GroupSummary& s) {
  return {{"type", "summary"},      {"group", group},
          {"method", s.method_name}, {"runs", s.runs},
          {"topics", s.topics},      {"mean_effort", s.mean_effort},
          {"mean_pct_saved", s.mean_pct_saved},
          {"reliability", s.reliability}};
}

inline void write_jsonl(std::ostream& os, const std::vector<json>& records) {
  for (const auto& r : records) os << r.dump() << '\n';
}

/// Per-topic and per-run records for every report, in report order.
inline std::vector<json> report_records(const std::vector<MethodReport>& reports) {
  std::vector<json> out;
  for (const auto& r : reports) {
    for (const auto& t : r.per_topic) out.push_back(topic_record(r, t));
    out.push_back(run_record(r));
  }
  return out;
}

/// A labelled group of runs (e.g. "all", "top5") summarised per method.
struct GroupTable {
  std::string label;
  std::vector<GroupSummary> rows;
};

inline GroupTable group_table(const std::string& label,
                              const std::vector<MethodReport>& reports,
                              const std::vector<MethodSpec>& methods,
                              const std::vector<std::string>& run_tags = {}) {
  GroupTable g{label, {}};
  for (const auto& m : methods) {
    const auto sel = select_reports(reports, m.name, run_tags);
    if (!sel.empty()) g.rows.push_back(summarize(sel));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

/// 68122.4 -> "68,122"
inline std::string with_thousands(double v) {
  auto n = static_cast<std::int64_t>(std::llround(v));
  const bool neg = n < 0;
  std::string digits = std::to_string(neg ? -n : n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return neg ? "-" + out : out;
}

inline std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

inline void write_table(std::ostream& os, const std::vector<GroupTable>& groups) {
  os << std::left << std::setw(12) << "Method" << std::right << std::setw(12)
     << "Mean Eff." << std::setw(20) << "Mean % Eff. Saved" << std::setw(13)
     << "Reliability" << std::setw(7) << "Runs" << std::setw(8) << "Topics"
     << '\n';
  for (const auto& g : groups) {
    os << "-- " << g.label << " --\n";
    for (const auto& r : g.rows)
      os << std::left << std::setw(12) << r.method_name << std::right
         << std::setw(12) << with_thousands(r.mean_effort) << std::setw(19)
         << fixed(r.mean_pct_saved, 1) << '%' << std::setw(13)
         << fixed(r.reliability, 3) << std::setw(7) << r.runs << std::setw(8)
         << r.topics << '\n';
  }
}

// ---------------------------------------------------------------------------
// Dataset validation
// ---------------------------------------------------------------------------

inline json validation_record(const ValidationSummary& s) {
  json checks = json::array();
  for (const auto& c : s.checks)
    checks.push_back({{"name", c.name},
                      {"expected", c.expected},
                      {"observed", c.observed},
                      {"status", to_string(c.status)}});
  json topics = json::array();
  for (const auto& t : s.topics)
    topics.push_back({{"topic", t.topic_id}, {"size", t.size}, {"relevant", t.relevant}});
  return {{"type", "validation"},
          {"topics", topics},
          {"size_min", s.size_min},
          {"size_max", s.size_max},
          {"size_median", s.size_median},
          {"total_docs", s.total_docs},
          {"relevant_min", s.rel_min},
          {"relevant_max", s.rel_max},
          {"relevant_median", s.rel_median},
          {"total_relevant", s.total_relevant},
          {"relevant_pct", s.relevant_pct},
          {"mean_relevant_pct", s.mean_relevant_pct},
          {"checks", checks},
          {"warnings", s.warnings}};
}

inline void write_validation_text(std::ostream& os, const ValidationSummary& s) {
  os << "topics " << s.topics.size() << ", documents " << s.total_docs
     << ", relevant " << s.total_relevant << " (" << fixed(s.relevant_pct, 2)
     << "% pooled, " << fixed(s.mean_relevant_pct, 2) << "% mean per topic)\n";
  os << "topic size min/median/max " << s.size_min << " / " << s.size_median
     << " / " << s.size_max << "\n";
  os << "relevant min/median/max " << s.rel_min << " / " << s.rel_median
     << " / " << s.rel_max << "\n";
  for (const auto& c : s.checks)
    os << "  " << std::left << std::setw(16) << c.name << std::right
       << std::setw(5) << to_string(c.status) << "  expected " << c.expected
       << ", observed " << c.observed << '\n';
  for (const auto& w : s.warnings) os << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

inline json simulation_record(const SimulationSummary& s,
                              const MethodParams& params) {
  json methods = json::array();
  for (const auto& m : s.methods)
    methods.push_back({{"method", m.method_name},
                       {"topics", m.topics},
                       {"reliability", m.reliability},
                       {"mean_effort", m.mean_effort},
                       {"mean_pct_saved", m.mean_pct_saved},
                       {"predicted_fraction", m.predicted_fraction}});
  return {{"type", "simulation"},
          {"family", s.family},
          {"n", s.n},
          {"trials", s.trials},
          {"seed", s.seed},
          {"params", params_record(params)},
          {"expected_relevant", s.expected_relevant},
          {"mean_relevant", s.mean_relevant},
          {"coverage", s.coverage.coverage()},
          {"covered", s.coverage.covered},
          {"fit_failures", s.coverage.fit_failures},
          {"skipped_empty", s.skipped_empty},
          {"methods", methods}};
}

inline void write_simulation_text(std::ostream& os, const SimulationSummary& s) {
  os << "family " << s.family << ", n " << s.n << ", trials " << s.trials
     << ", seed " << s.seed << '\n';
  os << "expected relevant " << fixed(s.expected_relevant, 3)
     << ", observed mean " << fixed(s.mean_relevant, 3) << '\n';
  os << "credible-bound coverage " << fixed(s.coverage.coverage(), 4) << " ("
     << s.coverage.covered << '/' << s.coverage.trials << ", fit failures "
     << s.coverage.fit_failures << ")\n";
  os << std::left << std::setw(12) << "Method" << std::right << std::setw(8)
     << "Topics" << std::setw(13) << "Reliability" << std::setw(13)
     << "Mean Eff." << std::setw(12) << "% Saved" << std::setw(12)
     << "Predicted" << '\n';
  for (const auto& m : s.methods)
    os << std::left << std::setw(12) << m.method_name << std::right
       << std::setw(8) << m.topics << std::setw(13) << fixed(m.reliability, 3)
       << std::setw(13) << fixed(m.mean_effort, 1) << std::setw(11)
       << fixed(m.mean_pct_saved, 1) << '%' << std::setw(12)
       << fixed(m.predicted_fraction, 3) << '\n';
}

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

struct GainRow {
  std::int64_t rank = 0;
  std::int64_t actual = 0;
  std::optional<double> estimated;  // sum_{i<=rank} lambda(i)
};

/// Actual gain curve and the model's cumulative expectation, from rank 0.
inline std::vector<GainRow> gain_series(const Topic& topic,
                                        const std::optional<RateModel>& model) {
  std::vector<GainRow> rows;
  rows.reserve(static_cast<std::size_t>(topic.size() + 1));
  double cum = 0.0;
  bool overflow = false;
  for (std::int64_t r = 0; r <= topic.size(); ++r) {
    GainRow row{r, topic.rel_at(r), std::nullopt};
    if (model && !overflow) {
      if (r > 0) {
        const double e = model->k * static_cast<double>(r);
        if (e > kMaxExponent)
          overflow = true;
        else
          cum += model->d * std::exp(e);
      }
      if (!overflow) row.estimated = cum;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Model used for plotting: the last accepted Poisson fit, else a fit over
/// the initial sample, else none.
inline std::optional<RateModel> plotting_model(const Topic& topic,
                                               const MethodParams& params) {
  const auto trace = poisson_trace(topic, params);
  if (auto m = trace.accepted_model()) return m;
  const auto sched = BatchSchedule::for_topic(topic.size(), params);
  try {
    return fit_exponential(
        bin_prefix(topic, sched.initial, static_cast<double>(sched.batch)));
  } catch (const ComputationError&) {
    return std::nullopt;
  }
}

inline void write_gain_csv(std::ostream& os, const std::vector<GainRow>& rows) {
  os << "rank,actual,estimated\n";
  for (const auto& r : rows) {
    os << r.rank << ',' << r.actual << ',';
    if (r.estimated) os << fixed(*r.estimated, 6);
    os << '\n';
  }
}

struct EffortAurcRow {
  std::string run_tag;
  double aurc = 0.0;
  std::int64_t oracle_effort = 0;
  std::int64_t pp_effort = 0;
};

inline void write_effort_csv(std::ostream& os,
                             const std::vector<EffortAurcRow>& rows) {
  os << "run,aurc,oracle_effort,pp_effort\n";
  for (const auto& r : rows)
    os << r.run_tag << ',' << fixed(r.aurc, 6) << ',' << r.oracle_effort << ','
       << r.pp_effort << '\n';
}

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool markers = false;
};

/// Minimal static SVG line/scatter chart with axes and a legend.
inline void write_svg(std::ostream& os, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  ymin = std::min(ymin, 0.0);
  if (ymax == ymin) ymax = ymin + 1;
  const auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
     << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
     << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16
       << "\" text-anchor=\"middle\">" << fixed(xv, xmax - xmin < 10 ? 2 : 0)
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\">" << fixed(yv, ymax - ymin < 10 ? 2 : 0)
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
     << ")\">" << ylabel << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.markers) {
      for (const auto& [x, y] : s.points)
        os << "<circle cx=\"" << fixed(px(x), 2) << "\" cy=\"" << fixed(py(y), 2)
           << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    } else if (!s.points.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\" points=\"";
      // Thin dense series to at most ~2000 vertices.
      const std::size_t step = std::max<std::size_t>(1, s.points.size() / 2000);
      for (std::size_t j = 0; j < s.points.size(); j += step)
        os << fixed(px(s.points[j].first), 2) << ',' << fixed(py(s.points[j].second), 2) << ' ';
      os << fixed(px(s.points.back().first), 2) << ','
         << fixed(py(s.points.back().second), 2);
      os << "\"/>\n";
    }
    const double ly = T + 8 + 16.0 * static_cast<double>(i);
    os << "<rect x=\"" << L + 12 << "\" y=\"" << ly - 8
       << "\" width=\"12\" height=\"4\" fill=\"" << s.color << "\"/>\n";
    os << "<text x=\"" << L + 30 << "\" y=\"" << ly - 2 << "\">" << s.name
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace ppstop
