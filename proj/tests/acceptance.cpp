// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "pindot/experiment.hpp"
#include "pindot/pins.hpp"
#include "pindot/rng.hpp"
#include "pindot/trees.hpp"

using namespace pindot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const fs::path kRuns = fs::temp_directory_path() / "pindot_acceptance";

RunRecord run_config(const std::string& name) {
  std::ifstream in(fs::path(PINDOT_CONFIG_DIR) / (name + ".json"));
  if (!in) throw std::runtime_error("missing config " + name);
  auto cfg = ExperimentConfig::from_json(json::parse(in));
  cfg.output = (kRuns / name).string();
  return run(cfg);
}

PointCloud cantor_power(const CantorSpec& s, int power, int level) {
  const auto c = gen_cantor_1d(s, level);
  return power == 1 ? c : gen_product(std::vector<PointCloud>(static_cast<std::size_t>(power), c));
}

Outcome keylemma() {
  const auto r = run_config("keylemma");
  return {r.pass && r.summary["trials"] == 100 && r.summary["max_exact_discrepancy"] == 0,
          "100 clouds, max exact discrepancy " + r.summary["max_exact_discrepancy"].dump()};
}

Outcome calibration() {
  const auto r = run_config("calibrate");
  return {r.pass && r.summary["members"] == 12, "12 members, max error " + fmt("%.2e", r.summary["max_error"].get<double>())};
}

Outcome sharpness() {
  const auto r = run_config("sharpness");
  return {r.pass, std::string("all pins null: ") + (r.summary["all_null"] == true ? "yes" : "no") +
                      ", base-3 counts 2^k: " + (r.summary["ternary_exact"] == true ? "yes" : "no")};
}

Outcome exceptional_bounds() {
  struct Member {
    CantorSpec spec;
    int level;
  };
  const std::vector<Member> members{{CantorSpec{Rational(1, 3), 2, 6}, 10}, {CantorSpec{Rational(1, 4), 3, 5}, 10}};
  ScanOptions opts;
  opts.angular_level = 10;  // 2^12 caps
  bool all = true;
  double worst = -1e9;
  int checks = 0;
  for (const auto& m : members) {
    const auto a = cantor_power(m.spec, 2, m.level);
    const double dim_a = estimate_dimension(a).slope;
    std::vector<ExceptionalScan> scans;
    for (double u : {0.3, 0.5, 0.8}) scans.push_back(scan_directions(a, ExceptionalKind::dimension, u, opts));
    scans.push_back(scan_directions(a, ExceptionalKind::measure, 1.0, opts));
    for (const auto& s : scans) {
      const auto bc = check_bound(s, dim_a);
      all = all && bc.pass && bc.planar_pass.value_or(true);
      worst = std::max(worst, bc.measured - bc.bound);
      if (bc.planar_bound) worst = std::max(worst, bc.measured - *bc.planar_bound);
      ++checks;
    }
  }
  return {all, std::to_string(checks) + " scans, worst measured - bound " + fmt("%+.3f", worst) + " (margin 0.15)"};
}

Outcome radial_bound() {
  int members = 0;
  double worst = 1e9;
  bool all = true;
  CounterRng rng(2024);
  for (const auto& m : calibration_corpus()) {
    if (m.power < 2 || !(m.spec.dimension() * m.power > 1.0 + 1e-9)) continue;
    const auto a = cantor_power(m.spec, m.power, min_level(m.spec));
    const double slope_a = estimate_dimension(a).slope;
    if (!(slope_a > 1.0)) continue;
    ++members;
    const int level = default_radial_level(a);
    for (int i = 0; i < 16; ++i) {
      std::vector<double> x(static_cast<std::size_t>(a.dim()));
      for (auto& c : x) c = -1.0 + 3.0 * static_cast<double>(rng.below(1u << 20)) / (1u << 20);
      const double s = radial_dimension(a, x, level).slope;
      worst = std::min(worst, s - (slope_a - 1.0));
      all = all && s >= slope_a - 1.0 - 0.1;
    }
  }
  return {all && members > 0,
          std::to_string(members) + " members x 16 vantage points, min slope - (dim A - 1) " + fmt("%+.3f", worst)};
}

Outcome pin_pipeline_check() {
  const auto r = run_config("pins");
  const double slope_a = r.summary["slope_a"].get<double>();
  return {r.pass && slope_a >= 1.7 && r.summary["dim_a_x"].get<double>() >= slope_a - 0.1,
          "slope A " + fmt("%.3f", slope_a) + ", slope A_x " + fmt("%.3f", r.summary["dim_a_x"].get<double>()) +
              ", pins positive " + fmt("%.2f", r.summary["pass_fraction"].get<double>())};
}

Outcome translation() {
  const auto r = run_config("translation");
  return {r.pass && r.summary["dispersed"] == true,
          "passing translations " + fmt("%.2f", r.summary["passing_translation_fraction"].get<double>()) +
              ", dispersed " + (r.summary["dispersed"] == true ? "yes" : "no")};
}

Outcome restricted() {
  const auto r = run_config("restricted");
  const double det = r.summary["min_abs_det"].get<double>();
  const double bad = r.summary["bad_dimension"].get<double>();
  const bool det_ok = std::fabs(det - lifted_circle_det()) <= 1e-3;
  return {r.pass && det_ok && bad <= 0.5 + 0.15,
          "min |det| - symbolic " + fmt("%+.1e", det - lifted_circle_det()) + ", bad-set slope " + fmt("%.3f", bad) +
              " (bound 0.65), pins " + r.summary["pin_count"].dump()};
}

Outcome tree_witness() {
  bool all = true;
  std::string detail;
  for (const auto& [name, t] : {std::pair{"2-path", TreeSpec::path(3)}, std::pair{"3-star", TreeSpec::star(3)}}) {
    const auto w = build_slab_tree_witness(t, 2, 0.63, 0.1, 8);
    TreeMeasureOptions o;
    o.s = 0.63;
    o.mode = TreeMode::exact;
    const auto ex = tree_measure(w.cloud, t, w.alpha, 0.1, o);
    o.mode = TreeMode::monte_carlo;
    o.seed = 11;
    const auto mc = tree_measure(w.cloud, t, w.alpha, 0.1, o);
    const bool ok = ex.exact && ex.estimate >= std::pow(0.1, 0.63 * ex.w_size) &&
                    std::fabs(mc.estimate - ex.estimate) <= 3 * mc.std_error + 1e-12;
    all = all && ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + " exact " + fmt("%.4f", ex.estimate) + " >= " +
              fmt("%.4f", ex.lower_bound) + ", MC " + fmt("%.4f", mc.estimate);
  }
  return {all, detail};
}

Outcome pinned_tree() {
  CounterRng rng(10);
  int equal = 0;
  for (int i = 0; i < 20; ++i) {
    const auto a = gen_random(2, 8, 500 + static_cast<std::size_t>(rng.below(3000)), rng.next());
    const auto idx = static_cast<std::size_t>(rng.below(a.size()));
    auto t = TreeSpec::single_edge();
    t.pin = TreePin{0, a.center(idx)};
    const auto p = pinned_tree_measure(a, t, {0.5}, 0.1);
    ExactPoint pin;
    for (int ax = 0; ax < 2; ++ax) pin.push_back(Rational(2 * a.cell(idx)[ax] + 1, std::int64_t{2} << a.level()));
    if (p.alpha_cells == dot_product_set(a, pin, ExactPoint(2, Rational(0))).cells()) ++equal;
  }
  return {equal == 20, std::to_string(equal) + "/20 pairs identical"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "key lemma exactness", 10, keylemma},
      {2, "dimension calibration", 30, calibration},
      {3, "sharpness example", 5, sharpness},
      {4, "exceptional-set bounds", 300, exceptional_bounds},
      {5, "radial projection bound", 60, radial_bound},
      {6, "pin pipeline", 120, pin_pipeline_check},
      {7, "translation pipeline", 300, translation},
      {8, "restricted curve", 180, restricted},
      {9, "tree witness", 120, tree_witness},
      {10, "pinned tree vs dot-product set", 10, pinned_tree},
  };
  fs::remove_all(kRuns);
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.limit_s;
    if (!pass) ++failed;
    std::printf("criterion %2d  %s  %-32s %6.1fs (limit %3.0fs)  %s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs,
                c.limit_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
