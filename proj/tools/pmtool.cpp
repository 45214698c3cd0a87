#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"experiment harness for intermittent interval maps"};
  app.name("pmtool");

  std::string kind;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  std::string kinds_help;
  for (const auto& k : pm::tool::experiment_kinds()) {
    if (!kinds_help.empty()) kinds_help += ", ";
    kinds_help += k;
  }
  app.add_option("kind", kind, "experiment kind: " + kinds_help)->required();
  app.add_option("--config", config_path, "key=value experiment file")
      ->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* threads_opt =
      app.add_option("--threads", threads, "override the worker count");
  auto* out_opt =
      app.add_option("--out", out_dir, "override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  pm::tool::ExperimentConfig cfg;
  try {
    cfg = pm::tool::ExperimentConfig::parse_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "pmtool: " << e.what() << "\n";
    return 2;
  }
  if (cfg.kind.empty())
    cfg.kind = kind;
  else if (cfg.kind != kind) {
    std::cerr << "pmtool: config kind '" << cfg.kind
              << "' does not match requested kind '" << kind << "'\n";
    return 2;
  }
  if (*seed_opt) cfg.seed = seed;
  if (*threads_opt) cfg.threads = threads;
  if (*out_opt) cfg.output_path = out_dir;

  const auto violations = cfg.validate();
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "pmtool: invalid " << v.field << " = '" << v.value
                << "': " << v.constraint << "\n";
    return 2;
  }

  try {
    const pm::tool::RunManifest man = pm::tool::run_experiment(cfg);
    std::cout << man.serialize();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "pmtool: numerical failure: " << e.what() << "\n";
    return 3;
  }
}
