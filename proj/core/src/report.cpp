#include "keyopt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "keyopt/error.hpp"
#include "keyopt/optimizer.hpp"
#include "keyopt/svg.hpp"

namespace keyopt {

namespace {

std::string fixed2(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double ratio_of(double qwerty, double opt) {
  if (opt == 0.0) return qwerty == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return qwerty / opt;
}

}  // namespace

double percentage_effort_reduction(double d_qwerty, double d_opt) {
  if (!(d_qwerty > 0.0)) throw Error("PER needs a positive QWERTY distance");
  return 100.0 * (d_qwerty - d_opt) / d_qwerty;
}

// ---------------------------------------------------------------------------
// Top pairs

TopPairsTable top_pairs_table(const BigramStats& stats, const KeyboardGeometry& g,
                              const Layout& qwerty, const Layout& optimized, int k) {
  if (k <= 0) throw Error("top pairs: k must be positive");
  const auto usage = pair_usage(stats, g, qwerty);
  TopPairsTable table;
  std::set<int> letters;
  const auto rows = std::min<std::size_t>(usage.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& u = usage[i];
    const double d_opt = mean_pair_distance(stats, g, optimized, u.key);
    table.rows.push_back({u.label, u.usage_pct, u.mean_distance_mm / 10.0, d_opt / 10.0,
                          ratio_of(u.mean_distance_mm, d_opt)});
    table.usage_sum_pct += u.usage_pct;
    if (u.key.kind != PairKey::Kind::SpaceLetter) letters.insert(u.key.first);
    if (u.key.kind != PairKey::Kind::LetterSpace) letters.insert(u.key.second);
  }
  table.n_let = static_cast<int>(letters.size());
  return table;
}

std::string top_pairs_csv(const TopPairsTable& table) {
  std::string out = "pair,usage_pct,d_qwerty_cm,d_opt_cm,ratio\n";
  for (const auto& r : table.rows) {
    out += r.pair + "," + fixed2(r.usage_pct) + "," + fixed2(r.d_qwerty_cm) + "," +
           fixed2(r.d_opt_cm) + "," + fixed2(r.ratio) + "\n";
  }
  return out;
}

void to_json(nlohmann::json& j, const TopPairsTable& table) {
  j = nlohmann::json{{"rows", nlohmann::json::array()},
                     {"n_let", table.n_let},
                     {"usage_sum_pct", table.usage_sum_pct}};
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"pair", r.pair},
                         {"usage_pct", r.usage_pct},
                         {"d_qwerty_cm", r.d_qwerty_cm},
                         {"d_opt_cm", r.d_opt_cm},
                         {"ratio", r.ratio}});
  }
}

// ---------------------------------------------------------------------------
// User report

UserReport make_user_report(std::string user_id, std::int64_t usable_letters,
                            const BigramStats& stats, const KeyboardGeometry& g,
                            const OptimizationResult& result, int top_k) {
  if (stats.empty()) throw Error("user report: empty stats");
  const Layout qwerty = qwerty_layout();
  const Layout optimized = apply_swaps(qwerty, result.best_swaps);
  const auto n = static_cast<double>(stats.total_transitions());

  UserReport r;
  r.user_id = std::move(user_id);
  r.usable_letters = usable_letters;
  r.transitions = stats.total_transitions();
  r.qwerty_total_cm = result.qwerty_cost / 10.0;
  r.optimized_total_cm = result.best_cost / 10.0;
  r.qwerty_avg_cm = r.qwerty_total_cm / n;
  r.optimized_avg_cm = r.optimized_total_cm / n;
  r.per = r.qwerty_avg_cm > 0.0 ? percentage_effort_reduction(r.qwerty_avg_cm, r.optimized_avg_cm)
                                : 0.0;
  r.swaps = result.best_swaps.notation();
  r.top_pairs = top_pairs_table(stats, g, qwerty, optimized, top_k);
  return r;
}

void to_json(nlohmann::json& j, const UserReport& report) {
  j = nlohmann::json{
      {"user", report.user_id},
      {"usable_letters", report.usable_letters},
      {"transitions", report.transitions},
      {"qwerty_total_cm", report.qwerty_total_cm},
      {"optimized_total_cm", report.optimized_total_cm},
      {"qwerty_avg_cm", report.qwerty_avg_cm},
      {"optimized_avg_cm", report.optimized_avg_cm},
      {"per_pct", report.per},
      {"swaps", report.swaps},
      {"top_pairs", report.top_pairs},
  };
}

void from_json(const nlohmann::json& j, UserReport& report) {
  try {
    UserReport r;
    r.user_id = j.at("user").get<std::string>();
    r.usable_letters = j.at("usable_letters").get<std::int64_t>();
    r.transitions = j.at("transitions").get<std::int64_t>();
    r.qwerty_total_cm = j.at("qwerty_total_cm").get<double>();
    r.optimized_total_cm = j.at("optimized_total_cm").get<double>();
    r.qwerty_avg_cm = j.at("qwerty_avg_cm").get<double>();
    r.optimized_avg_cm = j.at("optimized_avg_cm").get<double>();
    r.per = j.at("per_pct").get<double>();
    r.swaps = j.at("swaps").get<std::string>();
    const auto& tp = j.at("top_pairs");
    r.top_pairs.n_let = tp.at("n_let").get<int>();
    r.top_pairs.usage_sum_pct = tp.at("usage_sum_pct").get<double>();
    for (const auto& row : tp.at("rows")) {
      r.top_pairs.rows.push_back({row.at("pair").get<std::string>(),
                                  row.at("usage_pct").get<double>(),
                                  row.at("d_qwerty_cm").get<double>(),
                                  row.at("d_opt_cm").get<double>(),
                                  row.at("ratio").get<double>()});
    }
    report = std::move(r);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("user report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Heat maps

std::vector<HeatSegment> heatmap_segments(const KeyboardGeometry& g, const Layout& layout,
                                          const BigramStats& stats) {
  std::map<std::pair<int, int>, std::int64_t> counts;
  auto add = [&](Slot a, Slot b, std::int64_t c) {
    if (c == 0 || a == b) return;
    counts[std::minmax(a.index(), b.index())] += c;
  };
  for (int a = 0; a < kLetterCount; ++a) {
    const Slot sa = layout.slot_of(a);
    const Slot sp = g.nearest_space_slot(sa);
    std::int64_t final_count = 0;
    for (int b = 0; b < kLetterCount; ++b) {
      add(sa, layout.slot_of(b), stats.letter(a, b));
      add(sp, layout.slot_of(b), stats.space(a, b));
      final_count += stats.space(a, b);
    }
    final_count += stats.space(a, BigramStats::kEnd);
    add(sa, sp, final_count);
  }
  std::vector<HeatSegment> out;
  out.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    out.push_back({Slot::from_index(key.first), Slot::from_index(key.second), c});
  }
  return out;
}

std::string heatmap_svg(const KeyboardGeometry& g, const Layout& layout,
                        const BigramStats& stats, const std::optional<SwapSet>& highlight) {
  static constexpr double kScale = 10.0;  // px per mm
  static constexpr double kMargin = 20.0;
  static constexpr std::array<const char*, 3> kPairColours = {"#e41a1c", "#4daf4a", "#377eb8"};

  const auto& spec = g.spec();
  double min_x = 0.0;
  double max_x = 0.0;
  for (int s = 0; s < kSlotCount; ++s) {
    const auto c = g.center(Slot::from_index(s));
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
  }
  const double ox = kMargin + (spec.key_width / 2 - min_x) * kScale;
  const double oy = kMargin + spec.key_height / 2 * kScale;
  auto X = [&](double x) { return ox + x * kScale; };
  auto Y = [&](double y) { return oy + y * kScale; };

  svg::Document doc((max_x - min_x + spec.key_width) * kScale + 2 * kMargin,
                    g.height() * kScale + 2 * kMargin);

  std::array<const char*, kSlotCount> fill{};
  fill.fill("#eeeeee");
  if (highlight) {
    for (std::size_t i = 0; i < highlight->pairs().size() && i < kPairColours.size(); ++i) {
      const auto& [a, b] = highlight->pairs()[i];
      fill[layout.slot_of(int{a}).index()] = kPairColours[i];
      fill[layout.slot_of(int{b}).index()] = kPairColours[i];
    }
  }

  doc.comment("keys");
  for (int s = 0; s < kSlotCount; ++s) {
    const Slot slot = Slot::from_index(s);
    const auto c = g.center(slot);
    const bool lit = fill[s] != std::string_view("#eeeeee");
    doc.rect(X(c.x - spec.key_width / 2), Y(c.y - spec.key_height / 2), spec.key_width * kScale,
             spec.key_height * kScale, fill[s], "#bbbbbb", 1.0, lit ? 0.55 : 1.0);
    const std::string label =
        slot.is_letter() ? std::string(1, letter_char(layout.letter_at(slot))) : slot.id();
    doc.text(X(c.x), Y(c.y) + 5, label, slot.is_letter() ? 16 : 11, "middle", "#999999");
  }

  const auto segments = heatmap_segments(g, layout, stats);
  std::int64_t peak = 0;
  for (const auto& s : segments) peak = std::max(peak, s.count);
  doc.comment("paths");
  for (const auto& s : segments) {
    const double intensity =
        std::log1p(static_cast<double>(s.count)) / std::log1p(static_cast<double>(peak));
    const auto a = g.center(s.a);
    const auto b = g.center(s.b);
    doc.line(X(a.x), Y(a.y), X(b.x), Y(b.y), "#b30000", 1.0 + 4.0 * intensity, intensity);
  }
  return doc.str();
}

std::string pair_scatter_svg(const BigramStats& stats, const KeyboardGeometry& g,
                             const Layout& layout, const std::string& title) {
  svg::Series series;
  for (const auto& u : pair_usage(stats, g, layout)) {
    series.points.emplace_back(u.usage_pct, u.mean_distance_mm / 10.0);
  }
  return svg::scatter_plot(title, "usage (%)", "distance (cm)", series);
}

// ---------------------------------------------------------------------------
// Aggregates

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("fit: x and y lengths differ");
  if (x.size() < 2) throw Error("fit: need at least two points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("fit: x has zero variance");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("quantile of an empty set");
  if (p < 0.0 || p > 1.0) throw Error("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Distribution summarize(const std::vector<double>& values) {
  Distribution d;
  d.min = quantile(values, 0.0);
  d.q1 = quantile(values, 0.25);
  d.median = quantile(values, 0.5);
  d.q3 = quantile(values, 0.75);
  d.max = quantile(values, 1.0);
  d.iqr = d.q3 - d.q1;
  return d;
}

AggregateStats aggregate(std::span<const UserReport> reports) {
  if (reports.size() < 2) throw Error("aggregate: need at least two user reports");
  AggregateStats out;
  std::vector<double> q_avg;
  std::vector<double> o_avg;
  std::vector<double> per;
  for (const auto& r : reports) {
    out.users.push_back(r.user_id);
    out.usable_letters.push_back(static_cast<double>(r.usable_letters));
    out.qwerty_total_cm.push_back(r.qwerty_total_cm);
    out.optimized_total_cm.push_back(r.optimized_total_cm);
    q_avg.push_back(r.qwerty_avg_cm);
    o_avg.push_back(r.optimized_avg_cm);
    per.push_back(r.per);
  }
  const bool spread = std::any_of(out.usable_letters.begin(), out.usable_letters.end(),
                                  [&](double v) { return v != out.usable_letters.front(); });
  if (spread) {
    out.qwerty_fit = fit_line(out.usable_letters, out.qwerty_total_cm);
    out.optimized_fit = fit_line(out.usable_letters, out.optimized_total_cm);
  }
  out.qwerty_avg_cm = summarize(q_avg);
  out.optimized_avg_cm = summarize(o_avg);
  out.per = summarize(per);
  return out;
}

namespace {

nlohmann::json fit_json(const std::optional<LinearFit>& fit) {
  if (!fit) return nullptr;
  return {{"m", fit->slope}, {"c", fit->intercept}};
}

nlohmann::json distribution_json(const Distribution& d) {
  return {{"min", d.min}, {"q1", d.q1},   {"median", d.median},
          {"q3", d.q3},   {"max", d.max}, {"iqr", d.iqr}};
}

}  // namespace

void to_json(nlohmann::json& j, const AggregateStats& stats) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < stats.users.size(); ++i) {
    points.push_back({{"user", stats.users[i]},
                      {"usable_letters", stats.usable_letters[i]},
                      {"qwerty_total_cm", stats.qwerty_total_cm[i]},
                      {"optimized_total_cm", stats.optimized_total_cm[i]}});
  }
  j = nlohmann::json{
      {"points", points},
      {"qwerty_fit", fit_json(stats.qwerty_fit)},
      {"optimized_fit", fit_json(stats.optimized_fit)},
      {"qwerty_avg_cm", distribution_json(stats.qwerty_avg_cm)},
      {"optimized_avg_cm", distribution_json(stats.optimized_avg_cm)},
      {"per_pct", distribution_json(stats.per)},
  };
}

std::vector<std::pair<std::string, std::string>> aggregate_panels(
    std::span<const UserReport> reports, const AggregateStats& stats) {
  std::vector<std::pair<std::string, std::string>> panels;
  auto series = [&](auto x_of, auto y_of) {
    svg::Series s;
    for (const auto& r : reports) s.points.emplace_back(x_of(r), y_of(r));
    return s;
  };
  auto letters = [](const UserReport& r) { return static_cast<double>(r.usable_letters); };

  auto a = series(letters, [](const UserReport& r) { return r.qwerty_total_cm; });
  if (stats.qwerty_fit) a.fit = {{stats.qwerty_fit->slope, stats.qwerty_fit->intercept}};
  panels.emplace_back("panel_a_qwerty_total",
                      svg::scatter_plot("QWERTY total distance", "usable letters",
                                        "total distance (cm)", a));
  auto b = series(letters, [](const UserReport& r) { return r.optimized_total_cm; });
  if (stats.optimized_fit) b.fit = {{stats.optimized_fit->slope, stats.optimized_fit->intercept}};
  panels.emplace_back("panel_b_optimized_total",
                      svg::scatter_plot("Optimized total distance", "usable letters",
                                        "total distance (cm)", b));

  std::vector<double> q_avg, o_avg, per;
  for (const auto& r : reports) {
    q_avg.push_back(r.qwerty_avg_cm);
    o_avg.push_back(r.optimized_avg_cm);
    per.push_back(r.per);
  }
  panels.emplace_back("panel_c_qwerty_avg",
                      svg::histogram("QWERTY average key-to-key distance", "distance (cm)", q_avg));
  panels.emplace_back("panel_d_optimized_avg",
                      svg::histogram("Optimized average key-to-key distance", "distance (cm)",
                                     o_avg));
  panels.emplace_back("panel_e_per", svg::histogram("Percentage effort reduction", "PER (%)", per));
  panels.emplace_back(
      "panel_f_per_vs_avg",
      svg::scatter_plot("PER vs QWERTY average distance", "QWERTY average distance (cm)",
                        "PER (%)",
                        series([](const UserReport& r) { return r.qwerty_avg_cm; },
                               [](const UserReport& r) { return r.per; })));
  panels.emplace_back("panel_g_per_vs_letters",
                      svg::scatter_plot("PER vs usable letters", "usable letters", "PER (%)",
                                        series(letters, [](const UserReport& r) { return r.per; })));
  return panels;
}

}  // namespace keyopt
