#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

using keyopt::cli::FlagOverrides;
using keyopt::cli::fs::path;

template <typename T>
void optional_option(CLI::App* app, const std::string& name, std::optional<T>& target,
                     const std::string& help) {
  app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void flag_pair(CLI::App* app, const std::string& on, const std::string& off,
               std::optional<bool>& target, const std::string& help) {
  app->add_flag_callback(on, [&target] { target = true; }, help);
  app->add_flag_callback(off, [&target] { target = false; }, "Opposite of " + on);
}

void config_option(CLI::App* app, FlagOverrides& flags) {
  optional_option(app, "--config", flags.config, "JSON file with default settings");
}

void search_options(CLI::App* app, FlagOverrides& flags) {
  optional_option(app, "--swaps", flags.swaps, "Number of swapped key pairs (1-3)");
  optional_option(app, "--mode", flags.mode, "canonical or triplets");
  flag_pair(app, "--cumulative", "--exact", flags.cumulative,
            "Also consider fewer swaps, so the result never loses to QWERTY");
  optional_option(app, "--threads", flags.threads, "Worker threads");
  optional_option(app, "--model", flags.model, "Effort model: distance or fitts");
  app->add_flag_callback("--timing", [&flags] { flags.timing = true; },
                         "Record wall-clock time in the result (breaks byte-identical output)");
}

void geometry_options(CLI::App* app, FlagOverrides& flags) {
  optional_option(app, "--geometry", flags.geometry, "Keyboard geometry JSON");
}

void ingest_options(CLI::App* app, FlagOverrides& flags) {
  optional_option(app, "--max-chars", flags.max_chars, "Raw characters kept per user (1200)");
  flag_pair(app, "--drop-retweets", "--keep-retweets", flags.drop_retweets,
            "Skip retweets (default)");
  flag_pair(app, "--strip-urls", "--keep-urls", flags.strip_urls, "Remove URLs (default)");
  flag_pair(app, "--fold", "--no-fold", flags.diacritic_folding,
            "Fold accented letters to a-z (default)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = keyopt::cli;

  CLI::App app{"Keyboard layout search by key swaps from QWERTY"};
  app.require_subcommand(1);
  FlagOverrides flags;

  path ingest_input;
  std::optional<path> ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Normalise a tweet file into a key sequence");
  ingest->add_option("input", ingest_input, "Tweets, .jsonl or one per line")->required();
  optional_option(ingest, "--out,-o", ingest_out, "Output .txt (sidecar .meta.json beside it)");
  optional_option(ingest, "--out-dir", flags.out_dir, "Directory for default output names");
  ingest_options(ingest, flags);
  config_option(ingest, flags);

  path opt_corpus;
  std::optional<path> opt_out;
  auto* optimize = app.add_subcommand("optimize", "Search for the best key swaps");
  optimize->add_option("corpus", opt_corpus, "Normalised corpus from 'ingest'")->required();
  optional_option(optimize, "--out,-o", opt_out, "Result JSON, or - for stdout");
  optional_option(optimize, "--out-dir", flags.out_dir, "Directory for the default output name");
  search_options(optimize, flags);
  geometry_options(optimize, flags);
  config_option(optimize, flags);

  path rep_result;
  path rep_corpus;
  cli::ReportOptions rep_options;
  auto* report = app.add_subcommand("report", "Verify a result and render tables and heat maps");
  report->add_option("result", rep_result, "Result JSON from 'optimize'")->required();
  report->add_option("corpus", rep_corpus, "The corpus it was computed on")->required();
  optional_option(report, "--out-dir", flags.out_dir, "Directory for report.json and the CSV");
  optional_option(report, "--svg-dir", rep_options.svg_dir, "Directory for heat maps");
  optional_option(report, "--user", rep_options.user_id, "User id in the report");
  optional_option(report, "--top-pairs", flags.top_pairs, "Rows in the pair table (15)");
  geometry_options(report, flags);
  config_option(report, flags);

  path manifest_path;
  auto* batch = app.add_subcommand("batch", "Run every user in a manifest and aggregate");
  batch->add_option("manifest", manifest_path, "Manifest JSON")->required();
  optional_option(batch, "--out-dir", flags.out_dir, "Overrides the manifest's output_dir");
  search_options(batch, flags);
  optional_option(batch, "--top-pairs", flags.top_pairs, "Rows in each pair table (15)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  return cli::guarded(
      [&]() -> int {
        if (*batch) {
          const auto manifest = cli::load_manifest(manifest_path, flags);
          return cli::cmd_batch(manifest, std::cerr);
        }
        const auto settings = cli::resolve_settings(flags);
        if (*ingest) {
          cli::cmd_ingest(ingest_input, ingest_out, settings, std::cerr);
        } else if (*optimize) {
          cli::cmd_optimize(opt_corpus, opt_out, settings, std::cout, std::cerr);
        } else if (*report) {
          cli::cmd_report(rep_result, rep_corpus, rep_options, settings, std::cerr);
        }
        return cli::kExitOk;
      },
      std::cerr);
}
