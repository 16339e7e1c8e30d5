#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "keyopt/effort.hpp"
#include "keyopt/geometry.hpp"
#include "keyopt/stats.hpp"

namespace keyopt {

struct OptimizationResult;

/// Percentage effort reduction, 100 * (qwerty - optimized) / qwerty.
/// Throws unless d_qwerty > 0.
double percentage_effort_reduction(double d_qwerty, double d_opt);

struct PairRow {
  std::string pair;
  double usage_pct = 0.0;
  double d_qwerty_cm = 0.0;
  double d_opt_cm = 0.0;
  double ratio = 1.0;
};

struct TopPairsTable {
  std::vector<PairRow> rows;
  /// Distinct letters (spacebar excluded) among the rows.
  int n_let = 0;
  double usage_sum_pct = 0.0;
};

/// The k most used pairs, ranked under `qwerty`, with their distances on
/// both layouts. Fewer rows when fewer pairs occur.
TopPairsTable top_pairs_table(const BigramStats& stats, const KeyboardGeometry& g,
                              const Layout& qwerty, const Layout& optimized, int k = 15);

/// pair,usage_pct,d_qwerty_cm,d_opt_cm,ratio with two decimals.
std::string top_pairs_csv(const TopPairsTable& table);
void to_json(nlohmann::json& j, const TopPairsTable& table);

struct UserReport {
  std::string user_id;
  std::int64_t usable_letters = 0;
  std::int64_t transitions = 0;
  double qwerty_total_cm = 0.0;
  double optimized_total_cm = 0.0;
  double qwerty_avg_cm = 0.0;
  double optimized_avg_cm = 0.0;
  double per = 0.0;
  std::string swaps;
  TopPairsTable top_pairs;
};

UserReport make_user_report(std::string user_id, std::int64_t usable_letters,
                            const BigramStats& stats, const KeyboardGeometry& g,
                            const OptimizationResult& result, int top_k = 15);

void to_json(nlohmann::json& j, const UserReport& report);
void from_json(const nlohmann::json& j, UserReport& report);

/// Undirected slot pair with its traversal count.
struct HeatSegment {
  Slot a;
  Slot b;
  std::int64_t count = 0;
};

/// Every nonzero-length slot pair the finger travels, a < b, sorted.
std::vector<HeatSegment> heatmap_segments(const KeyboardGeometry& g, const Layout& layout,
                                          const BigramStats& stats);

/// Keyboard in light grey with traversed paths drawn over it; opacity is
/// log(1 + f) / log(1 + f_max). Each swapped pair gets its own colour.
std::string heatmap_svg(const KeyboardGeometry& g, const Layout& layout,
                        const BigramStats& stats, const std::optional<SwapSet>& highlight);

/// Key-pair distance (cm) against usage (%) for every used pair.
std::string pair_scatter_svg(const BigramStats& stats, const KeyboardGeometry& g,
                             const Layout& layout, const std::string& title);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares. Throws with fewer than two points or zero
/// variance in x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Linear interpolation between order statistics at position p * (n - 1).
double quantile(std::vector<double> values, double p);

struct Distribution {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double iqr = 0.0;
};

Distribution summarize(const std::vector<double>& values);

struct AggregateStats {
  std::vector<std::string> users;
  std::vector<double> usable_letters;
  std::vector<double> qwerty_total_cm;
  std::vector<double> optimized_total_cm;
  /// Empty when every user has the same letter count.
  std::optional<LinearFit> qwerty_fit;
  std::optional<LinearFit> optimized_fit;
  Distribution qwerty_avg_cm;
  Distribution optimized_avg_cm;
  Distribution per;
};

/// Needs at least two reports.
AggregateStats aggregate(std::span<const UserReport> reports);

void to_json(nlohmann::json& j, const AggregateStats& stats);

/// Panels A-G: totals vs letters for both keyboards, average-distance and
/// PER distributions, PER against QWERTY average and against letters.
/// Returned as (file stem, svg) in panel order.
std::vector<std::pair<std::string, std::string>> aggregate_panels(
    std::span<const UserReport> reports, const AggregateStats& stats);

}  // namespace keyopt
