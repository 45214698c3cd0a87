#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pm/map.hpp"

namespace pm::tool {

struct Violation {
  std::string field;
  std::string value;
  std::string constraint;
};

// One experiment per file, flat key=value lines, '#' comments. Every key has
// a default except kind; unknown keys are validation errors so typos cannot
// silently change an experiment.
struct ExperimentConfig {
  std::string kind;
  double beta = 0.5;
  std::string alpha_sequence = "constant";  // constant[:a] | list:a,b | cycle:a,b
  std::string observable = "coord";
  std::vector<long long> n_grid;
  std::string k_rule = "default";  // default -> floor(N^beta), or an integer
  std::uint64_t samples = 100000;
  int bins = 4096;
  std::uint64_t seed = 12345;
  int threads = 0;
  std::string output_path = ".";

  std::vector<std::string> unknown_keys;  // collected by the parser

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text);

  // Empty result iff runnable; each violation names field, value, constraint.
  std::vector<Violation> validate() const;

  // Canonical serialized form; its hash identifies the experiment in the
  // manifest regardless of comment or ordering differences in the source.
  std::string canonical() const;

  AdmissibleSequence sequence() const;
  long long gap_radius(long long N) const;
};

const std::vector<std::string>& experiment_kinds();

}  // namespace pm::tool
