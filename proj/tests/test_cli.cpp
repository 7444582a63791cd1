#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "pindot/experiment.hpp"

using namespace pindot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pindot_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

struct Result {
  int code;
  std::string err;
};

Result cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(PINDOT_CLI) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return Result{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

json small_scan(const fs::path& out) {
  auto j = json::parse(R"({
    "experiment": "scan",
    "generator": {"type": "cantor", "ratio": "1/3", "branches": 2, "depth": 4, "level": 8, "power": 2},
    "params": {"kind": "measure", "angular_level": 6}
  })");
  j["output"] = out.string();
  return j;
}

RunRecord record(const std::string& exp, bool pass) {
  RunRecord r;
  r.experiment = exp;
  r.config_hash = std::string(64, 'a');
  r.pass = pass;
  return r;
}

}  // namespace

TEST_CASE("config hash ignores key order") {
  const auto a = json::parse(R"({"experiment": "scan", "seed": 3, "params": {"kind": "measure", "u": 1.0},
                                 "generator": {"type": "interval", "lo": "0", "hi": "1", "level": 8, "power": 2}})");
  const auto b = json::parse(R"({"generator": {"power": 2, "level": 8, "hi": "1", "lo": "0", "type": "interval"},
                                 "params": {"u": 1.0, "kind": "measure"}, "seed": 3, "experiment": "scan"})");
  CHECK(ExperimentConfig::from_json(a).hash() == ExperimentConfig::from_json(b).hash());
  CHECK(content_hash(a) == content_hash(b));
  auto c = a;
  c["seed"] = 4;
  CHECK(ExperimentConfig::from_json(c).hash() != ExperimentConfig::from_json(a).hash());
  CHECK(content_hash(a).size() == 64);
}

TEST_CASE("config validation happens before compute") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"experiment": "nope"})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"experiment": "scan"})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"experiment": "keylemma", "params": {"trials": 0}})")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(
                      R"({"experiment": "scan", "generator": {"type": "cantor", "ratio": "2/3", "depth": 2}})")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"experiment": "scan",
      "generator": {"type": "interval", "lo": "0", "hi": "1", "level": 8}, "params": {"kind": "dimension", "u": 2}})")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"experiment": "translation",
      "generator": {"type": "interval", "lo": "0", "hi": "1", "level": 8}, "params": {"k": 1}})")),
                  ConfigError);
}

TEST_CASE("config round trip; the output directory is not hashed") {
  const auto c = ExperimentConfig::from_json(small_scan("out/x"));
  const auto d = ExperimentConfig::from_json(c.to_json());
  CHECK(d.hash() == c.hash());
  CHECK(ExperimentConfig::from_json(small_scan("elsewhere")).hash() == c.hash());
}

TEST_CASE("report") {
  SUBCASE("one passing record") {
    const auto s = report({record("keylemma", true)});
    CHECK(s.pass);
    CHECK(s.document["passed"] == 1);
    CHECK(s.document["total"] == 1);
    CHECK(s.table.find("keylemma") != std::string::npos);
  }
  SUBCASE("mixed records name the failures") {
    const auto s = report({record("keylemma", true), record("pins", false), record("scan", true)});
    CHECK(!s.pass);
    CHECK(s.document["passed"] == 2);
    CHECK(s.document["failing"] == json::array({"pins"}));
  }
  SUBCASE("empty list") { CHECK_THROWS_AS(report({}), ConfigError); }
  SUBCASE("records survive serialization") {
    auto r = record("trees", true);
    r.warnings = {"w"};
    r.summary = {{"x", 1.5}};
    const auto back = record_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
  }
}

TEST_CASE("keylemma run is exact") {
  const auto dir = scratch("keylemma");
  auto cfg = ExperimentConfig::from_json(json::parse(R"({"experiment": "keylemma",
      "params": {"trials": 10, "level": 10, "max_cells": 2000}, "seed": 2})"));
  cfg.output = dir.string();
  const auto rec = run(cfg);
  CHECK(rec.pass);
  CHECK(rec.summary["max_exact_discrepancy"] == 0);
  CHECK(fs::exists(dir / "record.json"));
  for (const auto& o : rec.outputs) CHECK(fs::exists(dir / o));
}

TEST_CASE("calibrate run meets the 0.07 tolerance") {
  const auto dir = scratch("calibrate");
  auto cfg = ExperimentConfig::from_json(json::parse(R"({"experiment": "calibrate"})"));
  cfg.output = dir.string();
  const auto rec = run(cfg);
  CHECK(rec.pass);
  CHECK(rec.summary["max_error"].get<double>() <= 0.07);
}

TEST_CASE("reruns and cache hits reproduce artifacts byte for byte") {
  const auto dir = scratch("cache");
  const auto cold = ExperimentConfig::from_json(small_scan(dir / "cold"));
  const auto first = run(cold);
  REQUIRE(!fs::is_empty(dir / "cold" / "cache"));
  const auto warm = run(cold);  // same output dir: generator comes from the cache
  auto other = ExperimentConfig::from_json(small_scan(dir / "fresh"));
  const auto fresh_rec = run(other);
  CHECK(first.outputs == warm.outputs);
  for (const auto& o : first.outputs) {
    CHECK(slurp(dir / "cold" / o) == slurp(dir / "fresh" / o));
  }
  CHECK(first.config_hash == fresh_rec.config_hash);
  CHECK(first.pass == warm.pass);
}

TEST_CASE("command line") {
  const auto dir = scratch("cmdline");
  SUBCASE("empty cloud exits 2 naming the precondition") {
    write_file(dir / "empty.json", dump(to_json(PointCloud(2, 6, {}))));
    write_file(dir / "cfg.json", json{{"experiment", "scan"},
                                      {"generator", {{"type", "file"}, {"path", (dir / "empty.json").string()}}},
                                      {"output", (dir / "run").string()}}
                                     .dump());
    const auto r = cli("scan --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("empty") != std::string::npos);
  }
  SUBCASE("malformed config exits 2") {
    write_file(dir / "bad.json", "{not json");
    CHECK(cli("scan --config " + (dir / "bad.json").string(), dir).code == 2);
    write_file(dir / "bad2.json", R"({"experiment": "keylemma", "params": {"trials": -1}})");
    CHECK(cli("verify-keylemma --config " + (dir / "bad2.json").string(), dir).code == 2);
  }
  SUBCASE("subcommand and config must agree") {
    write_file(dir / "k.json", R"({"experiment": "keylemma"})");
    CHECK(cli("scan --config " + (dir / "k.json").string(), dir).code == 2);
  }
  SUBCASE("passing run, report, and tools") {
    write_file(dir / "k.json", R"({"experiment": "keylemma", "params": {"trials": 5, "max_cells": 500}})");
    CHECK(cli("verify-keylemma --config " + (dir / "k.json").string() + " --out " + (dir / "k").string() + " --seed 9",
              dir)
              .code == 0);
    const auto rec = json::parse(slurp(dir / "k" / "record.json"));
    CHECK(rec["pass"] == true);
    CHECK(cli("report " + (dir / "k").string() + " --out " + (dir / "rep").string(), dir).code == 0);
    CHECK(json::parse(slurp(dir / "rep" / "summary.json"))["passed"] == 1);

    write_file(dir / "g.json", R"({"generator": {"type": "interval", "lo": "0", "hi": "1", "level": 6}})");
    CHECK(cli("gen --config " + (dir / "g.json").string() + " --out " + (dir / "g").string(), dir).code == 0);
    CHECK(cloud_from_json(json::parse(slurp(dir / "g" / "cloud.json"))).size() == 64);
    CHECK(cli("dim --config " + (dir / "g.json").string() + " --out " + (dir / "g").string(), dir).code == 0);
    CHECK(fs::exists(dir / "g" / "dimension.json"));
  }
  SUBCASE("report of a failing record exits 1") {
    write_file(dir / "r.json", dump(to_json(record("pins", false))));
    CHECK(cli("report " + (dir / "r.json").string(), dir).code == 1);
  }
}
