#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "keyopt/report.hpp"
#include "keyopt/stats.hpp"

namespace keyopt::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kConfigKeys = {"ingest", "search", "model",    "geometry",
                                           "threads", "out_dir", "top_pairs", "timing"};

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

unsigned parse_threads(const std::string& text, const char* origin) {
  try {
    std::size_t used = 0;
    const long value = std::stol(text, &used);
    if (used == text.size() && value >= 1 && value <= 4096) return static_cast<unsigned>(value);
  } catch (const std::exception&) {
  }
  throw UsageError(std::string(origin) + ": expected a positive thread count, got '" + text + "'");
}

EffortModel parse_model_name(const std::string& name) {
  EffortModel m;
  if (name == "distance") {
    m.kind = EffortKind::Distance;
  } else if (name == "fitts") {
    m.kind = EffortKind::Fitts;
  } else {
    throw UsageError("unknown effort model '" + name + "' (expected distance or fitts)");
  }
  return m;
}

GeometrySpec load_geometry_file(const fs::path& path) {
  try {
    return json::parse(read_file(path)).get<GeometrySpec>();
  } catch (const json::exception& e) {
    throw Error("geometry file " + path.string() + ": " + e.what());
  }
}

KeySequence load_corpus(const fs::path& path) {
  try {
    return KeySequence::parse(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

struct Prepared {
  KeySequence seq;
  std::size_t usable_letters = 0;
};

Prepared ingest_to(const fs::path& input, const fs::path& text_out, const Settings& settings,
                   std::ostream& log) {
  const auto records = read_tweet_file(input);
  const std::string raw = ingest_tweets(records, settings.policy);
  const KeySequence seq = normalize(raw, settings.policy);
  const std::size_t letters = usable_letter_count(seq);
  if (letters == 0) throw EmptyCorpusError("no letters left after normalisation");

  write_file(text_out, seq.render());
  const json meta = {
      {"source", input.filename().string()},
      {"records", records.size()},
      {"usable_letters", letters},
      {"tokens", seq.size()},
      {"policy", settings.policy},
  };
  write_file(text_out.parent_path() / (text_out.stem().string() + ".meta.json"),
             to_pretty_json(meta));
  log << "ingest: " << input.filename().string() << " -> " << text_out.filename().string() << " ("
      << letters << " letters)\n";
  return {seq, letters};
}

OptimizationResult run_search(const KeySequence& seq, const Settings& settings) {
  const KeyboardGeometry g(settings.geometry);
  auto result = optimize(g, count_bigrams(seq), settings.search);
  if (!settings.timing) result.wall_time_s.reset();
  return result;
}

UserReport write_report(const std::string& user_id, const KeySequence& seq,
                        const OptimizationResult& result, const fs::path& out_dir,
                        const fs::path& svg_dir, const Settings& settings) {
  const KeyboardGeometry g(settings.geometry);
  const auto stats = count_bigrams(seq);
  if (!verify_result(g, stats, result)) {
    throw Error("result does not verify against the corpus (costs, PER or swap encoding differ)");
  }
  const auto report = make_user_report(user_id, static_cast<std::int64_t>(usable_letter_count(seq)),
                                       stats, g, result, settings.top_pairs);
  const Layout qwerty = qwerty_layout();
  write_file(out_dir / "report.json", to_pretty_json(report));
  write_file(out_dir / "top_pairs.csv", top_pairs_csv(report.top_pairs));
  write_file(svg_dir / "heatmap_qwerty.svg", heatmap_svg(g, qwerty, stats, std::nullopt));
  write_file(svg_dir / "heatmap_optimized.svg",
             heatmap_svg(g, apply_swaps(qwerty, result.best_swaps), stats, result.best_swaps));
  return report;
}

std::string summary_csv(const std::vector<UserReport>& reports) {
  std::string out =
      "user,usable_letters,transitions,qwerty_total_cm,optimized_total_cm,qwerty_avg_cm,"
      "optimized_avg_cm,per_pct,swaps\n";
  for (const auto& r : reports) {
    out += r.user_id + ',' + std::to_string(r.usable_letters) + ',' + std::to_string(r.transitions) +
           ',' + fixed(r.qwerty_total_cm, 4) + ',' + fixed(r.optimized_total_cm, 4) + ',' +
           fixed(r.qwerty_avg_cm, 4) + ',' + fixed(r.optimized_avg_cm, 4) + ',' + fixed(r.per, 4) +
           ',' + r.swaps + '\n';
  }
  return out;
}

}  // namespace

std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

Settings apply_config(Settings s, const json& config, const fs::path& base_dir) {
  if (!config.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (!kConfigKeys.contains(key)) throw Error("unknown config key '" + key + "'");
  }
  try {
    if (config.contains("ingest")) {
      json merged = s.policy;
      merged.update(config.at("ingest"));
      s.policy = merged.get<IngestPolicy>();
    }
    if (config.contains("search")) {
      const auto& search = config.at("search");
      s.search.n_swap_pairs = search.value("swaps", s.search.n_swap_pairs);
      if (search.contains("mode")) {
        s.search.mode = parse_search_mode(search.at("mode").get<std::string>());
      }
      s.search.cumulative = search.value("cumulative", s.search.cumulative);
    }
    if (config.contains("model")) s.search.model = config.at("model").get<EffortModel>();
    if (config.contains("geometry")) {
      const auto& geo = config.at("geometry");
      if (geo.is_string()) {
        s.geometry = load_geometry_file(base_dir / geo.get<std::string>());
      } else {
        json merged = s.geometry;
        merged.update(geo);
        s.geometry = merged.get<GeometrySpec>();
      }
    }
    if (config.contains("threads")) {
      s.search.workers = parse_threads(config.at("threads").dump(), "config threads");
    }
    if (config.contains("out_dir")) s.out_dir = base_dir / config.at("out_dir").get<std::string>();
    if (config.contains("top_pairs")) s.top_pairs = config.at("top_pairs").get<int>();
    if (config.contains("timing")) s.timing = config.at("timing").get<bool>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return s;
}

Settings resolve_settings(const FlagOverrides& flags, const EnvLookup& env,
                          std::optional<Settings> base) {
  Settings s;
  if (base) {
    s = *base;
  } else {
    s.search.workers = default_threads();
  }
  if (flags.config) {
    json config;
    try {
      config = json::parse(read_file(*flags.config));
    } catch (const json::exception& e) {
      throw Error("config file " + flags.config->string() + ": " + e.what());
    }
    s = apply_config(std::move(s), config, flags.config->parent_path());
  }

  if (auto v = env("KEYOPT_OUT_DIR")) s.out_dir = fs::path(*v);
  if (auto v = env("KEYOPT_THREADS")) s.search.workers = parse_threads(*v, "KEYOPT_THREADS");

  if (flags.max_chars) s.policy.max_raw_chars = *flags.max_chars;
  if (flags.drop_retweets) s.policy.drop_retweets = *flags.drop_retweets;
  if (flags.strip_urls) s.policy.strip_urls = *flags.strip_urls;
  if (flags.diacritic_folding) s.policy.diacritic_folding = *flags.diacritic_folding;
  if (flags.swaps) s.search.n_swap_pairs = *flags.swaps;
  if (flags.mode) {
    try {
      s.search.mode = parse_search_mode(*flags.mode);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (flags.cumulative) s.search.cumulative = *flags.cumulative;
  if (flags.threads) s.search.workers = *flags.threads;
  if (flags.geometry) s.geometry = load_geometry_file(*flags.geometry);
  if (flags.model) s.search.model = parse_model_name(*flags.model);
  if (flags.out_dir) s.out_dir = *flags.out_dir;
  if (flags.top_pairs) s.top_pairs = *flags.top_pairs;
  if (flags.timing) s.timing = *flags.timing;

  try {
    s.policy.validate();
    s.search.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (s.top_pairs < 1) throw UsageError("--top-pairs must be at least 1");
  return s;
}

fs::path cmd_ingest(const fs::path& input, const std::optional<fs::path>& out,
                    const Settings& settings, std::ostream& log) {
  const fs::path target =
      out ? *out : settings.out_dir.value_or(input.parent_path()) / (input.stem().string() + ".txt");
  if (fs::exists(target) && fs::exists(input) && fs::equivalent(target, input)) {
    throw UsageError("ingest output would overwrite its input " + input.string());
  }
  ingest_to(input, target, settings, log);
  return target;
}

fs::path cmd_optimize(const fs::path& corpus, const std::optional<fs::path>& out,
                      const Settings& settings, std::ostream& sink, std::ostream& log) {
  const KeySequence seq = load_corpus(corpus);
  const auto result = run_search(seq, settings);
  const std::string text = to_pretty_json(result);
  log << "optimize: " << corpus.filename().string() << " swaps " << result.best_swaps.notation()
      << " per " << fixed(result.per, 2) << "% over " << result.candidates_evaluated
      << " candidates\n";
  if (out && out->string() == "-") {
    sink << text;
    return *out;
  }
  const fs::path target = out ? *out
                              : settings.out_dir.value_or(corpus.parent_path()) /
                                    (corpus.stem().string() + ".result.json");
  write_file(target, text);
  return target;
}

void cmd_report(const fs::path& result_path, const fs::path& corpus, const ReportOptions& options,
                const Settings& settings, std::ostream& log) {
  OptimizationResult result;
  try {
    result = optimization_result_from_json(json::parse(read_file(result_path)));
  } catch (const json::exception& e) {
    throw Error(result_path.string() + ": " + e.what());
  }
  const KeySequence seq = load_corpus(corpus);
  const fs::path out_dir = settings.out_dir.value_or(result_path.parent_path());
  const fs::path svg_dir = options.svg_dir.value_or(out_dir);
  const auto report = write_report(options.user_id.value_or(corpus.stem().string()), seq, result,
                                   out_dir, svg_dir, settings);
  log << "report: " << report.user_id << " per " << fixed(report.per, 2) << "% -> "
      << out_dir.string() << '\n';
}

Manifest load_manifest(const fs::path& path, const FlagOverrides& flags, const EnvLookup& env) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("users") || !doc.at("users").is_array()) {
    throw Error("manifest " + path.string() + ": needs a \"users\" array");
  }
  const fs::path base_dir = path.parent_path();
  Manifest m;
  std::set<std::string> seen;
  try {
    for (const auto& u : doc.at("users")) {
      ManifestUser user{u.at("id").get<std::string>(), base_dir / u.at("corpus").get<std::string>()};
      if (!safe_id(user.id)) throw Error("user id '" + user.id + "' is not a safe directory name");
      if (!seen.insert(user.id).second) throw Error("duplicate user id '" + user.id + "'");
      m.users.push_back(std::move(user));
    }
  } catch (const json::exception& e) {
    throw Error("manifest " + path.string() + ": " + e.what());
  }
  if (m.users.empty()) throw Error("manifest " + path.string() + ": no users");

  json config = doc;
  config.erase("users");
  std::optional<fs::path> declared_out;
  if (config.contains("output_dir")) {
    declared_out = base_dir / config.at("output_dir").get<std::string>();
    config.erase("output_dir");
  }
  Settings base;
  base.search.workers = default_threads();
  base = apply_config(base, config, base_dir);
  FlagOverrides no_config = flags;
  no_config.config.reset();
  m.settings = resolve_settings(no_config, env, base);
  m.output_dir = m.settings.out_dir.value_or(declared_out.value_or(base_dir / "out"));
  return m;
}

int cmd_batch(const Manifest& manifest, std::ostream& log) {
  struct Outcome {
    std::optional<UserReport> report;
    std::string error;
    std::string log;
  };
  const std::size_t n = manifest.users.size();
  std::vector<Outcome> outcomes(n);
  const unsigned budget = std::max(1u, manifest.settings.search.workers);
  const unsigned lanes = static_cast<unsigned>(std::min<std::size_t>(budget, n));
  Settings per_user = manifest.settings;
  per_user.search.workers = std::max(1u, budget / lanes);

  std::atomic<std::size_t> next{0};
  auto lane = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& user = manifest.users[i];
      std::ostringstream user_log;
      try {
        const fs::path dir = manifest.output_dir / "users" / user.id;
        Settings s = per_user;
        s.out_dir = dir;
        const auto prepared = ingest_to(user.corpus, dir / "corpus.txt", s, user_log);
        const auto result = run_search(prepared.seq, s);
        write_file(dir / "result.json", to_pretty_json(result));
        outcomes[i].report = write_report(user.id, prepared.seq, result, dir, dir, s);
        user_log << "batch: " << user.id << " swaps " << result.best_swaps.notation() << " per "
                 << fixed(result.per, 2) << "%\n";
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
        user_log << "batch: " << user.id << " failed: " << e.what() << '\n';
      }
      outcomes[i].log = user_log.str();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < lanes; ++w) pool.emplace_back(lane);
    lane();
  }

  std::vector<UserReport> reports;
  json status = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    log << outcomes[i].log;
    json entry = {{"id", manifest.users[i].id}};
    if (outcomes[i].report) {
      entry["status"] = "ok";
      reports.push_back(*outcomes[i].report);
    } else {
      entry["status"] = "failed";
      entry["error"] = outcomes[i].error;
    }
    status.push_back(std::move(entry));
  }
  const std::size_t failed = n - reports.size();
  write_file(manifest.output_dir / "status.json",
             to_pretty_json({{"users", status},
                             {"succeeded", reports.size()},
                             {"failed", failed}}));
  write_file(manifest.output_dir / "summary.csv", summary_csv(reports));

  if (reports.size() >= 2) {
    const auto agg = aggregate(reports);
    write_file(manifest.output_dir / "aggregate.json", to_pretty_json(agg));
    for (const auto& [stem, svg] : aggregate_panels(reports, agg)) {
      write_file(manifest.output_dir / "panels" / (stem + ".svg"), svg);
    }
  } else {
    log << "batch: fewer than two users succeeded, aggregate skipped\n";
  }
  log << "batch: " << reports.size() << " of " << n << " users succeeded\n";
  if (failed == 0) return kExitOk;
  return reports.empty() ? kExitData : kExitPartial;
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const UsageError& e) {
    log << "keyopt: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "keyopt: error: " << e.what() << '\n';
    return kExitData;
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string to_pretty_json(const nlohmann::json& j) { return j.dump(2) + '\n'; }

}  // namespace keyopt::cli
