#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pindot/pindot.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Failure {
  int code;
  std::string message;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  pd_string_free(s);
  return out;
}

int exit_code(pd_status st) { return st == PD_CONFIG_ERROR || st == PD_INVALID_ARGUMENT ? kExitConfig : kExitFail; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitConfig, "cannot read " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{kExitConfig, path + " is not valid JSON: " + e.what()};
  }
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("--config", c.config, "JSON config file");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

void apply_threads(const Common& c) {
  if (c.threads && pd_set_threads(*c.threads) != PD_OK) throw Failure{kExitConfig, pd_last_error()};
}

int run_experiment(const std::string& experiment, const Common& c) {
  apply_threads(c);
  json cfg = read_json(c.config);
  if (!cfg.is_object()) throw Failure{kExitConfig, "config must be a JSON object"};
  if (!experiment.empty()) {
    if (cfg.contains("experiment") && cfg["experiment"] != experiment) {
      throw Failure{kExitConfig, "config names experiment " + cfg["experiment"].dump() + ", expected \"" + experiment + "\""};
    }
    cfg["experiment"] = experiment;
  }
  if (c.seed) cfg["seed"] = *c.seed;
  char* record = nullptr;
  const pd_status st = pd_run(cfg.dump().c_str(), c.out.empty() ? nullptr : c.out.c_str(), &record);
  if (st != PD_OK) throw Failure{exit_code(st), pd_last_error()};
  const json r = json::parse(take(record));
  const std::string out = c.out.empty() ? cfg.value("output", std::string("out")) : c.out;
  std::cout << r["experiment"].get<std::string>() << ": " << (r["pass"].get<bool>() ? "pass" : "FAIL")
            << (r["exploratory"].get<bool>() ? " (exploratory)" : "") << "  " << (fs::path(out) / "record.json").string()
            << '\n';
  for (const auto& w : r["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  return r["pass"].get<bool>() ? kExitPass : kExitFail;
}

int run_tool(const std::string& op, const Common& c) {
  apply_threads(c);
  const json cfg = read_json(c.config);
  char* result = nullptr;
  const std::string out = c.out.empty() ? "out" : c.out;
  const pd_status st = pd_tool(op.c_str(), cfg.dump().c_str(), out.c_str(), &result);
  if (st != PD_OK) throw Failure{exit_code(st), pd_last_error()};
  std::cout << take(result);
  return kExitPass;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out) {
  json records = json::array();
  for (const auto& in : inputs) {
    const fs::path p = fs::is_directory(in) ? fs::path(in) / "record.json" : fs::path(in);
    records.push_back(read_json(p.string()));
  }
  char* summary = nullptr;
  char* table = nullptr;
  const pd_status st = pd_report(records.dump().c_str(), &summary, &table);
  if (st != PD_OK) throw Failure{exit_code(st), pd_last_error()};
  const std::string doc = take(summary);
  const std::string text = take(table);
  std::cout << text;
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / "summary.json") << doc;
    std::ofstream(fs::path(out) / "summary.txt") << text;
  }
  return json::parse(doc)["pass"].get<bool>() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pinned dot-product experiments", "pindot"};
  app.set_version_flag("--version", pd_version());
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* experiment;
    const char* help;
  };
  const std::vector<Entry> experiments{
      {"scan", "scan", "exceptional-direction scan of a cloud"},
      {"pins", "pins", "pin pipeline: radial set, good directions, pinned dot-product sets"},
      {"translate", "translation", "translation pipeline over a set X of pins"},
      {"restricted", "restricted", "bad parameters along a non-degenerate curve"},
      {"trees", "trees", "tree configuration measure"},
      {"verify-keylemma", "keylemma", "exact pinned-dot-product / projection identity"},
      {"run", "", "any experiment named by the config"},
  };
  const std::vector<std::pair<const char*, const char*>> tools{
      {"gen", "generate a cloud"},
      {"project", "orthogonal or radial projection of a cloud"},
      {"dotset", "pinned dot-product set of a cloud"},
      {"dim", "box-counting dimension of a cloud"},
  };

  Common common;
  std::string chosen;
  std::string mode;
  for (const auto& e : experiments) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, common);
    cmd->callback([&chosen, &mode, e] {
      chosen = e.experiment;
      mode = "experiment";
    });
  }
  for (const auto& [name, help] : tools) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, common);
    cmd->callback([&chosen, &mode, n = std::string(name)] {
      chosen = n;
      mode = "tool";
    });
  }
  std::vector<std::string> record_paths;
  auto* rep = app.add_subcommand("report", "aggregate run records (record.json files or run directories)");
  rep->add_option("records", record_paths, "record files or run directories")->required();
  rep->add_option("--out", common.out, "write summary.json and summary.txt here");
  rep->callback([&mode] { mode = "report"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (mode == "experiment") return run_experiment(chosen, common);
    if (mode == "tool") return run_tool(chosen, common);
    return run_report(record_paths, common.out);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
