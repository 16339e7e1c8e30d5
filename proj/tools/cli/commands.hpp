#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "keyopt/corpus.hpp"
#include "keyopt/error.hpp"
#include "keyopt/geometry.hpp"
#include "keyopt/optimizer.hpp"

namespace keyopt::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitPartial = 3,
};

/// Bad flags or flag combinations; maps to kExitUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Everything a command needs besides its positional paths.
struct Settings {
  IngestPolicy policy;
  SearchConfig search;
  GeometrySpec geometry;
  std::optional<fs::path> out_dir;
  int top_pairs = 15;
  bool timing = false;
};

/// Values given on the command line. Unset fields leave lower layers alone.
struct FlagOverrides {
  std::optional<fs::path> config;
  std::optional<std::size_t> max_chars;
  std::optional<bool> drop_retweets;
  std::optional<bool> strip_urls;
  std::optional<bool> diacritic_folding;
  std::optional<int> swaps;
  std::optional<std::string> mode;
  std::optional<bool> cumulative;
  std::optional<unsigned> threads;
  std::optional<fs::path> geometry;
  std::optional<std::string> model;
  std::optional<fs::path> out_dir;
  std::optional<int> top_pairs;
  std::optional<bool> timing;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// Reads the process environment.
std::optional<std::string> process_env(const char* name);

/// Applies a config object (same keys as a manifest, minus users) on top of
/// `base`. Relative paths inside it resolve against `base_dir`.
Settings apply_config(Settings base, const nlohmann::json& config, const fs::path& base_dir);

/// Built-in defaults, then the --config file, then KEYOPT_OUT_DIR /
/// KEYOPT_THREADS, then flags. Throws UsageError on conflicting values.
Settings resolve_settings(const FlagOverrides& flags, const EnvLookup& env = process_env,
                          std::optional<Settings> base = std::nullopt);

/// Normalises a tweet file into <out>.txt plus <out>.meta.json. Returns
/// the path of the text file.
fs::path cmd_ingest(const fs::path& input, const std::optional<fs::path>& out,
                    const Settings& settings, std::ostream& log);

/// Runs the search on a normalised corpus and writes the result JSON to
/// `out`, or to `sink` when `out` is "-".
fs::path cmd_optimize(const fs::path& corpus, const std::optional<fs::path>& out,
                      const Settings& settings, std::ostream& sink, std::ostream& log);

struct ReportOptions {
  std::optional<fs::path> svg_dir;
  std::optional<std::string> user_id;
};

/// Verifies `result` against `corpus`, then writes report.json,
/// top_pairs.csv and both heat maps. Throws Error when verification fails.
void cmd_report(const fs::path& result, const fs::path& corpus, const ReportOptions& options,
                const Settings& settings, std::ostream& log);

struct ManifestUser {
  std::string id;
  fs::path corpus;
};

struct Manifest {
  fs::path output_dir;
  std::vector<ManifestUser> users;
  Settings settings;
};

/// Parses and validates a manifest. User ids must be unique and safe as
/// directory names; corpus paths are resolved against the manifest's
/// directory but not opened.
Manifest load_manifest(const fs::path& path, const FlagOverrides& flags,
                       const EnvLookup& env = process_env);

/// Full pipeline per user, users in parallel, then the cross-user
/// aggregate. Returns kExitOk, or kExitPartial when some users failed.
int cmd_batch(const Manifest& manifest, std::ostream& log);

/// Runs `body` and converts exceptions into exit codes with a one-line
/// diagnostic on `log`.
int guarded(const std::function<int()>& body, std::ostream& log);

void write_file(const fs::path& path, const std::string& contents);
std::string read_file(const fs::path& path);
std::string to_pretty_json(const nlohmann::json& j);

}  // namespace keyopt::cli
