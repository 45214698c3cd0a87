#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace pm::tool {

struct OutputRecord {
  std::string file;      // basename under output_path
  std::string digest;    // hex64 FNV-1a of the bytes
};

// Sidecar record of one experiment run. Chunk seeds are not listed one by
// one: they are splitmix64(seed xor golden * (chunk + 1)), so the rule plus
// the base seed reproduces all of them.
struct RunManifest {
  std::string kind;
  std::string config_hash;  // hex64 FNV-1a of ExperimentConfig::canonical()
  std::string code_version;
  std::uint64_t seed = 0;
  int threads = 0;          // as configured; 0 defers to PMTOOL_THREADS
  std::uint64_t samples = 0;
  std::uint64_t chunk_size = 8192;
  std::string chunk_seed_rule;
  double wall_seconds = 0.0;
  std::vector<OutputRecord> outputs;
  std::vector<std::pair<std::string, std::string>> extras;

  std::string serialize() const;
};

// Runs the experiment, writes its outputs plus <kind>-manifest.txt under
// cfg.output_path, and returns the manifest. The config must validate; a
// violated precondition throws std::invalid_argument. All outputs are
// composed in memory and flushed at the end through atomic renames, so a
// failure at any point leaves the output directory untouched.
RunManifest run_experiment(const ExperimentConfig& cfg);

}  // namespace pm::tool
