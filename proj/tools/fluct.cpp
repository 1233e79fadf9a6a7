// Command-line driver for the forum fluctuation pipeline.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fluct/config.hpp"
#include "fluct/pipeline.hpp"

namespace {

constexpr int kUsage = 1;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

fluct::PipelineConfig resolve(const Options& opts) {
  fluct::PipelineConfig config;
  if (!opts.config_path.empty()) config = fluct::load_config(opts.config_path);
  if (opts.seed) config.cv.seed = *opts.seed;
  if (!opts.out.empty()) config.out = opts.out;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community fluctuation pipeline: snapshots, communities, roles, churn models"};
  app.require_subcommand(1);

  Options opts;
  app.add_option("--config", opts.config_path, "Pipeline config file (key = value)");
  app.add_option("--seed", opts.seed, "Seed for synthetic data and cross-validation");
  app.add_option("--out", opts.out, "Output directory");
  app.add_flag("--quiet", opts.quiet, "Suppress progress messages");

  struct Stage {
    const char* name;
    const char* help;
  };
  const Stage stages[] = {
      {"synth", "Write a seeded synthetic corpus"},
      {"ingest", "Validate the corpus; write posts.jsonl and corpus_stats.json"},
      {"snapshots", "Slice into windows; write graphs/ edge lists and centralities"},
      {"communities", "Detect communities; write communities.csv and modularity.csv"},
      {"roles", "Label joining/previous/leaving/staying users; write roles.csv"},
      {"features", "Assemble feature rows; write dataset.csv"},
      {"train", "Monte Carlo cross-validation per preset; write reports/"},
      {"report", "Print and write report_table.txt"},
      {"run", "Run ingest through report"},
      {"config", "Print the effective configuration"},
  };
  for (const auto& stage : stages) {
    auto* sub = app.add_subcommand(stage.name, stage.help);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  fluct::PipelineConfig config;
  try {
    config = resolve(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  fluct::Logger log;
  if (!opts.quiet) log = [](std::string_view message) { std::cerr << message << "\n"; };
  fluct::Pipeline pipeline(config, log);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "synth") pipeline.synth();
    else if (command == "ingest") pipeline.ingest();
    else if (command == "snapshots") pipeline.snapshots();
    else if (command == "communities") pipeline.communities();
    else if (command == "roles") pipeline.roles();
    else if (command == "features") pipeline.features();
    else if (command == "train") pipeline.train();
    else if (command == "report") std::cout << pipeline.report();
    else if (command == "config") std::cout << fluct::dump_config(config);
    else if (command == "run") {
      pipeline.run();
      if (!opts.quiet) std::cout << pipeline.report();
    }
  } catch (const fluct::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  return 0;
}
