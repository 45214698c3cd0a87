#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "pm/csv.hpp"
#include "pm/grid_density.hpp"
#include "pm/parallel.hpp"
#include "pm/stein.hpp"
#include "runner.hpp"

using namespace pm;
using namespace pm::tool;

namespace {

namespace fs = std::filesystem;

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("pm-harness-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

bool names_field(const std::vector<Violation>& vs, const std::string& field) {
  for (const auto& v : vs)
    if (v.field == field) return true;
  return false;
}

std::string extra(const RunManifest& man, const std::string& key) {
  for (const auto& [k, v] : man.extras)
    if (k == key) return v;
  return "<missing:" + key + ">";
}

// Small enough that all nine kinds together run in seconds, large enough
// that every code path past validation is exercised.
ExperimentConfig tiny(const std::string& kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.samples = 2000;
  cfg.bins = 128;
  if (kind == "cone-check") {
    cfg.observable = "one";
    cfg.bins = 64;
  } else if (kind == "partition-law") {
    cfg.n_grid = {4, 6, 8, 10};
  } else if (kind == "correlation-decay") {
    cfg.n_grid = {1, 2, 4, 8};
  } else if (kind == "clt-smooth" || kind == "clt-kantorovich") {
    cfg.beta = 0.25;
    cfg.n_grid = {16, 32};
  } else if (kind == "stein-budget") {
    cfg.beta = 0.25;
    cfg.n_grid = {64};
  } else if (kind == "rio-b2") {
    cfg.n_grid = {1, 2};
  } else if (kind == "coboundary-screen") {
    cfg.n_grid = {8, 16, 32, 64};
  }
  return cfg;
}

// A run whose limiting variance estimate is negative: the coboundary
// observable has true variance zero, and seed 1 at this sample count lands
// the noisy series sum below it.
ExperimentConfig degenerate_variance_config() {
  ExperimentConfig cfg;
  cfg.kind = "clt-kantorovich";
  cfg.beta = 0.25;
  cfg.observable = "coboundary-sin";
  cfg.n_grid = {16, 32};
  cfg.samples = 4000;
  cfg.bins = 256;
  cfg.seed = 1;
  return cfg;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  ScratchDir io;
  const std::string out_file = (io.path / "out.txt").string();
  const std::string err_file = (io.path / "err.txt").string();
  const std::string cmd = std::string(PMTOOL_BIN) + " " + args + " >" +
                          out_file + " 2>" + err_file;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = read_text(out_file);
  r.err = read_text(err_file);
  return r;
}

std::string write_config(const ScratchDir& dir, const std::string& text) {
  const std::string path = (dir.path / "experiment.cfg").string();
  write_text_atomic(path, text);
  return path;
}

}  // namespace

TEST_CASE("the nine experiment kinds are registered") {
  const auto& kinds = experiment_kinds();
  CHECK(kinds.size() == 9);
  for (const char* k :
       {"invariant-density", "cone-check", "partition-law",
        "correlation-decay", "clt-smooth", "clt-kantorovich", "stein-budget",
        "rio-b2", "coboundary-screen"})
    CHECK(std::find(kinds.begin(), kinds.end(), k) != kinds.end());
}

TEST_CASE("parse_text reads every key, strips comments, collects unknowns") {
  const std::string text =
      "# experiment file\n"
      "kind = correlation-decay   # trailing comment\n"
      "\n"
      "beta=0.25\n"
      "alpha_sequence = cycle:0.2,0.25\n"
      "observable = cos\n"
      "  n_grid = 2, 4, 8 \n"
      "k_rule = 12\n"
      "samples = 5000\n"
      "bins = 512\n"
      "seed = 99\n"
      "threads = 3\n"
      "output_path = /tmp/somewhere\n"
      "fnord = 1\n";
  const ExperimentConfig cfg = ExperimentConfig::parse_text(text);
  CHECK(cfg.kind == "correlation-decay");
  CHECK(cfg.beta == 0.25);
  CHECK(cfg.alpha_sequence == "cycle:0.2,0.25");
  CHECK(cfg.observable == "cos");
  CHECK(cfg.n_grid == std::vector<long long>{2, 4, 8});
  CHECK(cfg.k_rule == "12");
  CHECK(cfg.samples == 5000);
  CHECK(cfg.bins == 512);
  CHECK(cfg.seed == 99);
  CHECK(cfg.threads == 3);
  CHECK(cfg.output_path == "/tmp/somewhere");
  CHECK(cfg.unknown_keys == std::vector<std::string>{"fnord"});
}

TEST_CASE("parse_text rejects malformed lines with their line number") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("kind=cone-check\nbogus line\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("beta = abc\n"),
                       doctest::Contains("cannot parse value for 'beta'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      ExperimentConfig::parse_text("bins = 99999999999999999999\n"),
      doctest::Contains("out of range"), std::invalid_argument);
}

TEST_CASE("parse_file loads a config and rejects missing paths") {
  ScratchDir dir;
  const std::string text = "kind=cone-check\nobservable=one\nbins=64\n";
  const std::string path = write_config(dir, text);
  const ExperimentConfig cfg = ExperimentConfig::parse_file(path);
  CHECK(cfg.canonical() == ExperimentConfig::parse_text(text).canonical());
  CHECK_THROWS_WITH_AS(
      ExperimentConfig::parse_file((dir.path / "absent.cfg").string()),
      doctest::Contains("cannot open config file"), std::invalid_argument);
}

TEST_CASE("validate accepts a runnable config of every kind") {
  for (const auto& kind : experiment_kinds()) {
    CAPTURE(kind);
    CHECK(tiny(kind).validate().empty());
  }
}

TEST_CASE("validate names each violated field") {
  ExperimentConfig cfg = tiny("correlation-decay");

  SUBCASE("unknown kind") {
    cfg.kind = "fourier";
    CHECK(names_field(cfg.validate(), "kind"));
  }
  SUBCASE("beta outside the open unit interval") {
    for (double b : {0.0, 1.0, -0.5, 2.0}) {
      cfg.beta = b;
      CHECK(names_field(cfg.validate(), "beta"));
    }
  }
  SUBCASE("normal-approximation kinds need beta below one third") {
    for (const char* kind : {"clt-smooth", "clt-kantorovich", "stein-budget"}) {
      ExperimentConfig c = tiny(kind);
      c.beta = 0.4;
      const auto vs = c.validate();
      REQUIRE(names_field(vs, "beta"));
      bool cites_third = false;
      for (const auto& v : vs)
        if (v.field == "beta" && v.constraint.find("1/3") != std::string::npos)
          cites_third = true;
      CHECK(cites_third);
    }
    // correlation kinds take the whole range
    ExperimentConfig c = tiny("correlation-decay");
    c.beta = 0.9;
    CHECK(c.validate().empty());
  }
  SUBCASE("inadmissible alpha sequence") {
    cfg.alpha_sequence = "constant:0.9";  // exceeds beta* = 0.5
    CHECK(names_field(cfg.validate(), "alpha_sequence"));
    cfg.alpha_sequence = "warble:1,2";
    CHECK(names_field(cfg.validate(), "alpha_sequence"));
  }
  SUBCASE("observable presets are matched to the kind") {
    cfg.observable = "bogus";
    CHECK(names_field(cfg.validate(), "observable"));
    cfg.observable = "coord-cos";  // vector preset on a scalar kind
    CHECK(names_field(cfg.validate(), "observable"));

    ExperimentConfig kant = tiny("clt-kantorovich");
    kant.observable = "coord-cos";  // two components, needs one
    CHECK(names_field(kant.validate(), "observable"));
    kant.observable = "coboundary-sin";
    CHECK(kant.validate().empty());

    ExperimentConfig smooth = tiny("clt-smooth");
    smooth.observable = "cos";  // scalar-only preset on a vector kind
    CHECK(names_field(smooth.validate(), "observable"));
    smooth.observable = "coord+coboundary";
    CHECK(smooth.validate().empty());

    ExperimentConfig cone = tiny("cone-check");
    cone.observable = "one";
    CHECK(cone.validate().empty());
    ExperimentConfig corr = tiny("correlation-decay");
    corr.observable = "one";  // flat density is not a scalar observable
    CHECK(names_field(corr.validate(), "observable"));
  }
  SUBCASE("n_grid shape") {
    cfg.n_grid.clear();
    CHECK(names_field(cfg.validate(), "n_grid"));
    cfg.n_grid = {4, 2, 8};
    CHECK(names_field(cfg.validate(), "n_grid"));
    cfg.n_grid = {0, 2, 4};
    CHECK(names_field(cfg.validate(), "n_grid"));

    ExperimentConfig screen = tiny("coboundary-screen");
    screen.n_grid = {8, 16, 32};  // fit needs four points
    CHECK(names_field(screen.validate(), "n_grid"));
    ExperimentConfig law = tiny("partition-law");
    law.n_grid = {4, 8, 16};
    CHECK(names_field(law.validate(), "n_grid"));
    ExperimentConfig budget = tiny("stein-budget");
    budget.n_grid = {64, 128};  // one budget file per run
    CHECK(names_field(budget.validate(), "n_grid"));

    // density kinds do not consume a grid at all
    ExperimentConfig dens = tiny("invariant-density");
    dens.n_grid.clear();
    CHECK(dens.validate().empty());
  }
  SUBCASE("k_rule is default or a nonnegative integer") {
    cfg.k_rule = "soon";
    CHECK(names_field(cfg.validate(), "k_rule"));
    cfg.k_rule = "-3";
    CHECK(names_field(cfg.validate(), "k_rule"));
    cfg.k_rule = "12";
    CHECK(cfg.validate().empty());
  }
  SUBCASE("scalar ranges") {
    cfg.samples = 0;
    CHECK(names_field(cfg.validate(), "samples"));
    cfg = tiny("correlation-decay");
    cfg.bins = 1;
    CHECK(names_field(cfg.validate(), "bins"));
    cfg = tiny("correlation-decay");
    cfg.threads = -1;
    CHECK(names_field(cfg.validate(), "threads"));
    cfg = tiny("correlation-decay");
    cfg.output_path.clear();
    CHECK(names_field(cfg.validate(), "output_path"));
  }
  SUBCASE("unknown keys surface as violations") {
    cfg.unknown_keys = {"fnord"};
    const auto vs = cfg.validate();
    REQUIRE(names_field(vs, "fnord"));
    for (const auto& v : vs)
      if (v.field == "fnord") CHECK(v.constraint == "unknown configuration key");
  }
}

TEST_CASE("canonical form excludes threads and output path") {
  ExperimentConfig a = tiny("correlation-decay");
  ExperimentConfig b = a;
  b.threads = 7;
  b.output_path = "/somewhere/else";
  CHECK(a.canonical() == b.canonical());
  CHECK(hex64(fnv1a64(a.canonical())) == hex64(fnv1a64(b.canonical())));

  ExperimentConfig c = a;
  c.seed = a.seed + 1;
  CHECK(a.canonical() != c.canonical());
}

TEST_CASE("canonical text is itself a parseable config") {
  for (const auto& kind : experiment_kinds()) {
    CAPTURE(kind);
    const ExperimentConfig cfg = tiny(kind);
    const ExperimentConfig back = ExperimentConfig::parse_text(cfg.canonical());
    CHECK(back.canonical() == cfg.canonical());
    CHECK(back.unknown_keys.empty());
  }
}

TEST_CASE("sequence and gap_radius follow the config") {
  ExperimentConfig cfg = tiny("correlation-decay");  // beta = 0.5

  CHECK(cfg.sequence().at(1).alpha() == 0.5);  // constant defaults to beta
  cfg.alpha_sequence = "constant:0.25";
  CHECK(cfg.sequence().at(999).alpha() == 0.25);
  CHECK(!cfg.sequence().length().has_value());

  cfg.alpha_sequence = "list:0.5,0.25";
  CHECK(cfg.sequence().at(2).alpha() == 0.25);
  CHECK(cfg.sequence().length() == std::size_t{2});

  cfg.alpha_sequence = "cycle:0.25,0.5";
  CHECK(cfg.sequence().at(3).alpha() == 0.25);

  cfg.alpha_sequence = "warble:1";
  CHECK_THROWS_AS(cfg.sequence(), std::invalid_argument);

  cfg = tiny("correlation-decay");
  cfg.beta = 0.25;
  CHECK(cfg.gap_radius(4096) == 8);  // floor(4096^0.25)
  cfg.k_rule = "7";
  CHECK(cfg.gap_radius(4096) == 7);
  CHECK(cfg.gap_radius(16) == 7);
}

TEST_CASE("manifest serialization is a flat key=value block") {
  RunManifest m;
  m.kind = "cone-check";
  m.config_hash = "0011223344556677";
  m.code_version = "1.2.3";
  m.seed = 7;
  m.threads = 2;
  m.samples = 10;
  m.chunk_size = 8192;
  m.chunk_seed_rule = "rule";
  m.wall_seconds = 0.5;
  m.outputs = {{"a.csv", "00000000deadbeef"}};
  m.extras = {{"pass", "true"}};
  CHECK(m.serialize() ==
        "kind=cone-check\n"
        "config_hash=0011223344556677\n"
        "code_version=1.2.3\n"
        "seed=7\n"
        "threads=2\n"
        "samples=10\n"
        "chunk_size=8192\n"
        "chunk_seed_rule=rule\n"
        "wall_seconds=0.5\n"
        "output:a.csv=00000000deadbeef\n"
        "pass=true\n");
}

TEST_CASE("run_experiment writes digested outputs and a manifest for every kind") {
  for (const auto& kind : experiment_kinds()) {
    CAPTURE(kind);
    ScratchDir dir;
    ExperimentConfig cfg = tiny(kind);
    cfg.output_path = dir.str();
    const RunManifest man = run_experiment(cfg);

    CHECK(man.kind == kind);
    CHECK(man.config_hash == hex64(fnv1a64(cfg.canonical())));
    CHECK(man.seed == cfg.seed);
    CHECK(man.samples == cfg.samples);
    CHECK(man.wall_seconds > 0.0);
    REQUIRE(!man.outputs.empty());

    for (const auto& out : man.outputs) {
      const fs::path p = dir.path / out.file;
      REQUIRE_MESSAGE(fs::exists(p), out.file);
      CHECK(hex64(fnv1a64(read_text(p.string()))) == out.digest);
    }

    const fs::path manifest = dir.path / (kind + "-manifest.txt");
    REQUIRE(fs::exists(manifest));
    CHECK(read_text(manifest.string()) == man.serialize());

    // the directory holds exactly the declared outputs plus the sidecar
    std::size_t entries = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) {
      (void)e;
      ++entries;
    }
    CHECK(entries == man.outputs.size() + 1);
  }
}

TEST_CASE("invariant-density output round-trips through the density reader") {
  ScratchDir dir;
  ExperimentConfig cfg = tiny("invariant-density");
  cfg.output_path = dir.str();
  const RunManifest man = run_experiment(cfg);

  const GridDensity h =
      read_density_csv((dir.path / "invariant-density.csv").string());
  CHECK(h.bins() == cfg.bins);
  CHECK(h.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::stod(extra(man, "fixed_point_residual_l1")) < 1e-8);
}

TEST_CASE("cone-check on the flat density reports a pass") {
  ScratchDir dir;
  ExperimentConfig cfg = tiny("cone-check");
  cfg.output_path = dir.str();
  const RunManifest man = run_experiment(cfg);

  CHECK(extra(man, "pass") == "true");
  const std::string csv = read_text((dir.path / "cone-check.csv").string());
  CHECK(csv.find("flat,") != std::string::npos);
  CHECK(csv.find(",pass,") != std::string::npos);
}

TEST_CASE("partition-law run exports the length law, the fit, and the cells") {
  ScratchDir dir;
  ExperimentConfig cfg = tiny("partition-law");
  cfg.output_path = dir.str();
  const RunManifest man = run_experiment(cfg);

  const std::string law = read_text((dir.path / "partition-law.csv").string());
  std::size_t rows = 0;
  for (char ch : law)
    if (ch == '\n') ++rows;
  CHECK(rows == cfg.n_grid.size() + 1);

  CHECK(std::stod(extra(man, "fit_exponent")) < 0.0);
  CHECK(std::stod(extra(man, "sum_lengths_n4")) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(extra(man, "leftmost_dominant_n4") == "true");
  CHECK(extra(man, "cells_exported_n") == "10");
  CHECK(fs::exists(dir.path / "partition-cells.csv"));
  CHECK(fs::exists(dir.path / "partition-fit.csv"));
}

TEST_CASE("stein budget file reproduces itself under parse and recompute") {
  ScratchDir dir;
  ExperimentConfig cfg = tiny("stein-budget");
  cfg.output_path = dir.str();
  run_experiment(cfg);

  const std::string text = read_text((dir.path / "stein-budget.txt").string());
  SteinBudget budget = SteinBudget::parse(text);
  budget.recompute();
  CHECK(budget.serialize() == text);
}

TEST_CASE("rerunning a config reproduces every output byte") {
  for (const char* kind : {"correlation-decay", "clt-smooth"}) {
    CAPTURE(kind);
    ScratchDir a, b;
    ExperimentConfig cfg = tiny(kind);
    cfg.output_path = a.str();
    const RunManifest first = run_experiment(cfg);
    cfg.output_path = b.str();
    const RunManifest second = run_experiment(cfg);

    REQUIRE(first.outputs.size() == second.outputs.size());
    for (std::size_t i = 0; i < first.outputs.size(); ++i) {
      CHECK(first.outputs[i].file == second.outputs[i].file);
      CHECK(first.outputs[i].digest == second.outputs[i].digest);
      CHECK(read_text((a.path / first.outputs[i].file).string()) ==
            read_text((b.path / second.outputs[i].file).string()));
    }
  }
}

TEST_CASE("thread count changes no output bytes") {
  ScratchDir a, b;
  ExperimentConfig cfg = tiny("correlation-decay");
  cfg.samples = 20000;  // several chunks, so the decomposition matters
  cfg.threads = 1;
  cfg.output_path = a.str();
  const RunManifest serial = run_experiment(cfg);
  cfg.threads = 4;
  cfg.output_path = b.str();
  const RunManifest pooled = run_experiment(cfg);

  CHECK(serial.config_hash == pooled.config_hash);
  REQUIRE(serial.outputs.size() == pooled.outputs.size());
  for (std::size_t i = 0; i < serial.outputs.size(); ++i) {
    CHECK(serial.outputs[i].digest == pooled.outputs[i].digest);
    CHECK(read_text((a.path / serial.outputs[i].file).string()) ==
          read_text((b.path / pooled.outputs[i].file).string()));
  }
  CHECK(serial.threads == 1);
  CHECK(pooled.threads == 4);
}

TEST_CASE("invalid configs are rejected before any file is written") {
  ScratchDir dir;
  ExperimentConfig cfg = tiny("clt-smooth");
  cfg.beta = 0.4;
  cfg.output_path = dir.str();
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("beta"),
                       std::invalid_argument);
  CHECK(fs::is_empty(dir.path));

  cfg = tiny("correlation-decay");
  cfg.kind = "fourier";
  cfg.output_path = dir.str();
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  CHECK(fs::is_empty(dir.path));
}

TEST_CASE("numerical failure propagates and leaves the directory untouched") {
  ScratchDir dir;
  ExperimentConfig cfg = degenerate_variance_config();
  cfg.output_path = dir.str();
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       doctest::Contains("variance is not positive"),
                       std::domain_error);
  CHECK(fs::is_empty(dir.path));
}

TEST_CASE("PMTOOL_THREADS is the fallback worker count") {
  ::setenv("PMTOOL_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  CHECK(resolve_threads(5) == 5);  // explicit request wins
  ::setenv("PMTOOL_THREADS", "0", 1);
  CHECK(resolve_threads(0) >= 1);  // unusable value falls through to hardware
  ::unsetenv("PMTOOL_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("cli runs an experiment and prints the manifest") {
  ScratchDir dir;
  const std::string cfg_path =
      write_config(dir, "kind=cone-check\nobservable=one\nbins=64\n");
  const CliResult r =
      run_cli("cone-check --config " + cfg_path + " --out " + dir.str());
  CAPTURE(r.err);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("kind=cone-check") != std::string::npos);
  CHECK(r.out.find("config_hash=") != std::string::npos);
  CHECK(r.out.find("output:cone-check.csv=") != std::string::npos);
  CHECK(fs::exists(dir.path / "cone-check.csv"));
  CHECK(fs::exists(dir.path / "cone-check-manifest.txt"));
}

TEST_CASE("cli exits 2 on validation failure and names the field") {
  ScratchDir dir;
  const std::string cfg_path = write_config(
      dir,
      "kind=clt-smooth\nbeta=0.4\nobservable=coord\nn_grid=16,32\n"
      "samples=2000\nbins=128\n");
  const CliResult r =
      run_cli("clt-smooth --config " + cfg_path + " --out " + dir.str());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("pmtool: invalid beta = '0.4'") != std::string::npos);
  CHECK(r.err.find("1/3") != std::string::npos);
}

TEST_CASE("cli exits 2 when the requested kind contradicts the config") {
  ScratchDir dir;
  const std::string cfg_path =
      write_config(dir, "kind=cone-check\nobservable=one\nbins=64\n");
  const CliResult r =
      run_cli("partition-law --config " + cfg_path + " --out " + dir.str());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("does not match") != std::string::npos);
}

TEST_CASE("cli exits 2 on unreadable config or unknown kind") {
  ScratchDir dir;
  const CliResult missing =
      run_cli("cone-check --config " + (dir.path / "absent.cfg").string());
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("cannot open config file") != std::string::npos);

  const std::string cfg_path = write_config(dir, "bins=64\n");
  const CliResult unknown =
      run_cli("fourier --config " + cfg_path + " --out " + dir.str());
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("pmtool: invalid kind = 'fourier'") !=
        std::string::npos);

  const CliResult no_args = run_cli("");
  CHECK(no_args.exit_code == 2);
}

TEST_CASE("cli exits 3 on numerical failure and names the invariant") {
  ScratchDir dir;
  const ExperimentConfig cfg = degenerate_variance_config();
  const std::string cfg_path = write_config(dir, cfg.canonical());
  const CliResult r =
      run_cli("clt-kantorovich --config " + cfg_path + " --out " + dir.str());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("pmtool: numerical failure") != std::string::npos);
  CHECK(r.err.find("variance is not positive") != std::string::npos);
  CHECK(fs::exists(dir.path / "experiment.cfg"));
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);  // nothing written next to the config
}

TEST_CASE("cli seed override lands in the manifest") {
  ScratchDir dir;
  const std::string cfg_path =
      write_config(dir, "kind=cone-check\nobservable=one\nbins=64\n");
  const CliResult r = run_cli("cone-check --config " + cfg_path + " --out " +
                              dir.str() + " --seed 99");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("seed=99") != std::string::npos);
}

TEST_CASE("cli thread override changes no output bytes") {
  ScratchDir base;
  ExperimentConfig cfg = tiny("correlation-decay");
  cfg.samples = 20000;
  const std::string cfg_path = write_config(base, cfg.canonical());

  ScratchDir a, b;
  const CliResult serial = run_cli("correlation-decay --config " + cfg_path +
                                   " --out " + a.str() + " --threads 1");
  const CliResult pooled = run_cli("correlation-decay --config " + cfg_path +
                                   " --out " + b.str() + " --threads 4");
  CHECK(serial.exit_code == 0);
  CHECK(pooled.exit_code == 0);
  CHECK(read_text((a.path / "correlation-decay.csv").string()) ==
        read_text((b.path / "correlation-decay.csv").string()));
}

TEST_CASE("cli honors PMTOOL_THREADS without changing results") {
  ScratchDir base;
  const std::string cfg_path =
      write_config(base, "kind=cone-check\nobservable=one\nbins=64\n");
  ScratchDir a, b;
  const CliResult plain =
      run_cli("cone-check --config " + cfg_path + " --out " + a.str());
  ::setenv("PMTOOL_THREADS", "2", 1);
  const CliResult env =
      run_cli("cone-check --config " + cfg_path + " --out " + b.str());
  ::unsetenv("PMTOOL_THREADS");
  CHECK(plain.exit_code == 0);
  CHECK(env.exit_code == 0);
  CHECK(read_text((a.path / "cone-check.csv").string()) ==
        read_text((b.path / "cone-check.csv").string()));
}
