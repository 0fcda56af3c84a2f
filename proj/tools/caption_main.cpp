// Copyright 2026 The Caption Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// caption: command-line driver for the labelling and evaluation pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caption/config.hpp"
#include "caption/error.hpp"
#include "caption/explorer.hpp"
#include "caption/workspace.hpp"

namespace fs = std::filesystem;
using namespace caption;

namespace {

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const std::string& n : names) out.push_back(parse_strategy(n));
  if (out.empty()) out.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  return out;
}

std::vector<Family> parse_families(const std::string& name) {
  if (name == "all") return {std::begin(kAllFamilies), std::end(kAllFamilies)};
  return {parse_family(name)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-label generation and pairwise evaluation for image-based buttons"};
  app.require_subcommand(1);

  std::string workspace_dir = "workspace";
  std::optional<std::string> config_path;
  app.add_option("-w,--workspace", workspace_dir, "Workspace directory")->capture_default_str();
  app.add_option("-c,--config", config_path, "JSON config file");

  auto* ingest = app.add_subcommand("ingest", "Validate and register dataset manifests");
  std::vector<std::string> manifests;
  ingest->add_option("manifests", manifests, "Manifest files")->required()->check(CLI::ExistingFile);

  auto* sample = app.add_subcommand("sample", "Draw a seeded sample of eligible buttons");
  std::string dataset_id;
  std::size_t sample_n = 160;
  std::optional<std::uint64_t> sample_seed;
  sample->add_option("--dataset", dataset_id, "Dataset id")->required();
  sample->add_option("--n", sample_n, "Sample size")->capture_default_str();
  sample->add_option("--seed", sample_seed, "Seed (defaults to the config value)");

  auto* generate = app.add_subcommand("generate", "Generate labels for every sampled button");
  std::vector<std::string> strategy_names;
  std::string provider_mode = "replay";
  generate->add_option("--strategy", strategy_names, "s1, s2, s3 or baseline; repeatable (default: all)")
      ->delimiter(',');
  generate->add_option("--provider", provider_mode, "live, record or replay")->capture_default_str();

  auto* import_human = app.add_subcommand("import-human", "Import human-authored labels ({sample_id, text} lines)");
  std::string human_file;
  import_human->add_option("file", human_file)->required()->check(CLI::ExistingFile);

  auto* pairs = app.add_subcommand("pairs", "Build pairwise comparisons for a family");
  std::string pairs_family;
  pairs->add_option("--family", pairs_family, "prompt, vs-human or vs-baseline")->required();

  auto* assign = app.add_subcommand("assign", "Assign unassigned comparisons to two raters each");
  std::string raters_file;
  std::optional<std::uint64_t> assign_seed;
  assign->add_option("--raters", raters_file, "One rater id per line")->required()->check(CLI::ExistingFile);
  assign->add_option("--seed", assign_seed, "Seed (defaults to the config value)");

  auto* serve = app.add_subcommand("serve", "Serve rating sessions over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::string> static_dir;
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of built rater UI assets")->check(CLI::ExistingDirectory);

  auto* rate = app.add_subcommand("rate-scripted", "Replay a ratings fixture through the rating service");
  std::string ratings_fixture;
  rate->add_option("fixture", ratings_fixture)->required()->check(CLI::ExistingFile);

  auto* review = app.add_subcommand("review", "List samples awaiting an exclusion decision, or decide one");
  std::optional<std::string> decide_sample;
  bool exclude = false;
  bool retain = false;
  std::string reason = "other";
  std::string note;
  review->add_option("--decide", decide_sample, "Sample id to decide");
  review->add_flag("--exclude", exclude, "Exclude the sample from analysis");
  review->add_flag("--retain", retain, "Keep the sample");
  review->add_option("--reason", reason, "implausible_transition, wrong_highlight or other")->capture_default_str();
  review->add_option("--note", note);

  auto* analyze = app.add_subcommand("analyze", "Write per-family statistical reports");
  std::string analyze_family = "all";
  analyze->add_option("--family", analyze_family, "prompt, vs-human, vs-baseline or all")->capture_default_str();

  auto* explore = app.add_subcommand("explore", "Tap through a simulated app graph and print each transition");
  std::string graph_file;
  std::vector<std::string> taps;
  std::optional<std::int64_t> explore_timeout;
  explore->add_option("graph", graph_file)->required()->check(CLI::ExistingFile);
  explore->add_option("--tap", taps, "Node ids to tap in order")->required()->delimiter(',');
  explore->add_option("--timeout-ms", explore_timeout, "Capture timeout (defaults to the config value)");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config = load_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt);

    if (*explore) {
      SimApp sim = load_sim_app(graph_file);
      const std::int64_t timeout = explore_timeout.value_or(config.explore_timeout_ms);
      for (const std::string& node : taps) std::cout << to_json(explore_tap(sim, node, timeout)).dump() << "\n";
      return 0;
    }

    Workspace ws(workspace_dir, config);

    if (*ingest) {
      std::vector<fs::path> paths(manifests.begin(), manifests.end());
      for (const std::string& id : ws.ingest(paths)) std::cout << "ingested " << id << "\n";
    } else if (*sample) {
      const SamplePlan plan = ws.sample(dataset_id, sample_n, sample_seed.value_or(config.sample_seed));
      std::cout << "sampled " << plan.sampled_ids.size() << " buttons from " << plan.dataset_id << "\n";
    } else if (*generate) {
      const auto report = ws.run_generation(parse_strategies(strategy_names), parse_client_mode(provider_mode));
      for (const auto& o : report.outcomes) {
        if (!o.error.empty()) {
          std::cerr << o.sample_id << " " << to_string(o.strategy) << ": " << o.error << ": " << o.message << "\n";
        }
      }
      std::cout << report.successes() << " candidates, " << report.failures() << " failures\n";
      return report.failures() == 0 ? 0 : 1;
    } else if (*import_human) {
      std::cout << "imported " << ws.import_human(human_file) << " human labels\n";
    } else if (*pairs) {
      const auto comparisons = ws.build_pairs(parse_family(pairs_family));
      std::cout << comparisons.size() << " comparisons, " << 2 * comparisons.size() << " expected choices\n";
    } else if (*assign) {
      const auto raters = read_raters(raters_file);
      std::cout << "added " << ws.assign(raters, assign_seed.value_or(config.assign_seed)) << " assignments\n";
    } else if (*serve) {
      auto service = ws.make_rating_service();
      HttpService http(*service, static_dir ? std::optional<fs::path>(*static_dir) : std::nullopt);
      std::cout << "serving on http://" << host << ":" << port << std::endl;
      if (!http.listen(host, port)) {
        std::cerr << "error: could not listen on " << host << ":" << port << "\n";
        return 1;
      }
    } else if (*rate) {
      const auto result = ws.rate_scripted(ratings_fixture);
      for (const std::string& e : result.errors) std::cerr << e << "\n";
      std::cout << result.appended << " ratings recorded, " << result.already_recorded << " already present, "
                << result.errors.size() << " rejected\n";
      return result.errors.empty() ? 0 : 1;
    } else if (*review) {
      if (decide_sample) {
        if (exclude == retain) {
          std::cerr << "error: pass exactly one of --exclude or --retain\n";
          return 2;
        }
        ws.store().apply_exclusion({*decide_sample, exclude, parse_exclusion_reason(reason), note});
        std::cout << (exclude ? "excluded " : "retained ") << *decide_sample << "\n";
      } else {
        for (const std::string& id : ws.store().review_queue()) std::cout << id << "\n";
      }
    } else if (*analyze) {
      int status = 0;
      for (Family f : parse_families(analyze_family)) {
        const AnalysisReport report = ws.run_analysis(f);
        std::cout << report.text << "\n";
        if (report.empty) status = 1;
      }
      return status;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
