#include "pindot/io.hpp"

#include <sstream>
#include <stdexcept>

namespace pindot {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string num(double v) {
  // same shortest representation the JSON writer uses
  return json(v).dump();
}

}  // namespace

json to_json(const PointCloud& a) {
  json j;
  j["ambient_dim"] = a.dim();
  j["level"] = a.level();
  j["bound"] = a.bound();
  json cells = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto c = a.cell(i);
    cells.push_back(std::vector<std::int64_t>(c.begin(), c.end()));
  }
  j["cells"] = std::move(cells);
  if (a.has_weights()) j["weights"] = a.weights();
  return j;
}

PointCloud cloud_from_json(const json& j) {
  try {
    const int dim = j.at("ambient_dim").get<int>();
    const int level = j.at("level").get<int>();
    const double bound = j.value("bound", kDefaultBound);
    if (dim < 1 || dim > kMaxAmbientDim) throw std::invalid_argument("cloud ambient_dim must be in [1, 4]");
    std::vector<std::int64_t> flat;
    for (const auto& c : j.at("cells")) {
      if (!c.is_array() || static_cast<int>(c.size()) != dim) throw std::invalid_argument("cloud cell has wrong arity");
      for (const auto& v : c) flat.push_back(v.get<std::int64_t>());
    }
    std::optional<std::vector<double>> weights;
    if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
    return PointCloud(dim, level, std::move(flat), bound, std::move(weights));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed cloud JSON: ") + e.what());
  }
}

json to_json(const ScalarSet& s) {
  json j;
  j["ambient_dim"] = 1;
  j["level"] = s.level();
  j["bound"] = s.bound();
  j["scale_shift"] = s.scale_shift();
  j["sample_level"] = s.sample_level();
  json cells = json::array();
  for (std::int64_t c : s.cells()) cells.push_back(json::array({c}));
  j["cells"] = std::move(cells);
  return j;
}

ScalarSet scalar_from_json(const json& j) {
  try {
    if (j.value("ambient_dim", 1) != 1) throw std::invalid_argument("scalar set must have ambient_dim 1");
    std::vector<std::int64_t> cells;
    for (const auto& c : j.at("cells")) cells.push_back(c.is_array() ? c.at(0).get<std::int64_t>() : c.get<std::int64_t>());
    const int level = j.at("level").get<int>();
    return ScalarSet(level, std::move(cells), j.value("bound", kDefaultBound), j.value("scale_shift", 0),
                     j.value("sample_level", level));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scalar set JSON: ") + e.what());
  }
}

ExactPoint point_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("a point must be a JSON array");
  ExactPoint p;
  for (const auto& v : j) {
    if (v.is_string()) {
      p.push_back(Rational::parse(v.get<std::string>()));
    } else if (v.is_number()) {
      p.push_back(Rational::from_double(v.get<double>()));
    } else {
      throw std::invalid_argument("point coordinates must be numbers or rational strings");
    }
  }
  return p;
}

json to_json(const Rational& q) { return q.str(); }

json to_json(const ExactPoint& p) {
  json j = json::array();
  for (const auto& q : p) j.push_back(q.str());
  return j;
}

json to_json(const Window& w) { return json::array({w.lo, w.hi}); }

json to_json(const DimensionReport& r) {
  json j;
  j["base"] = r.base;
  j["counts"] = r.counts;
  j["window"] = to_json(r.window);
  j["slope"] = r.slope;
  j["r2"] = r.r2;
  j["proxy_measure"] = r.proxy_measure;
  j["interior_run"] = r.interior_run;
  return j;
}

std::string dimension_csv(const DimensionReport& r) {
  std::ostringstream os;
  os << "level,count\n";
  for (std::size_t k = 0; k < r.counts.size(); ++k) os << k << ',' << r.counts[k] << '\n';
  return os.str();
}

json to_json(const MeasureProxy& m) {
  return json{{"verdict", to_string(m.verdict)},
              {"ratios", m.ratios},
              {"decay", m.decay},
              {"flatness", m.flatness},
              {"window", to_json(m.window)}};
}

json to_json(const ProjectionVerdict& v) {
  return json{{"slope", v.slope}, {"measure", to_string(v.measure)}, {"run", v.run}, {"exceptional", v.exceptional}};
}

json scan_summary(const ExceptionalScan& scan, const BoundCheck& bc) {
  json j;
  j["kind"] = to_string(scan.kind);
  j["u"] = scan.u;
  j["dim"] = scan.dim;
  j["angular_level"] = scan.angular_level;
  j["lines"] = scan.directions.size();
  j["exceptional_lines"] = scan.exceptional.size();
  j["bound"] = bc.bound;
  j["measured"] = bc.measured;
  j["pass"] = bc.pass;
  if (bc.planar_bound) {
    j["planar_bound"] = *bc.planar_bound;
    j["planar_pass"] = bc.planar_pass.value_or(false);
  }
  j["exceptional_dimension"] = to_json(scan.exc_dim);
  return j;
}

std::string scan_csv(const ExceptionalScan& scan) {
  std::ostringstream os;
  const SphereGrid grid = scan.grid();
  os << "line,cap";
  for (int i = 0; i < scan.dim; ++i) os << ",theta" << i + 1;
  os << ",slope,measure,run,exceptional\n";
  for (const auto& d : scan.directions) {
    os << d.line << ',' << grid.line_cap(d.line);
    for (double t : d.theta) os << ',' << num(t);
    os << ',' << num(d.verdict.slope) << ',' << to_string(d.verdict.measure) << ',' << d.verdict.run << ','
       << (d.verdict.exceptional ? 1 : 0) << '\n';
  }
  return os.str();
}

json to_json(const PinReport& r) {
  json j;
  j["x"] = to_json(r.x);
  j["kind"] = to_string(r.kind);
  j["u"] = r.u;
  j["angular_level"] = r.angular_level;
  j["slope_a"] = r.slope_a;
  j["threshold"] = r.threshold;
  j["exploratory"] = r.exploratory;
  j["radial_caps"] = r.radial_caps.size();
  j["good_caps"] = r.good_caps.size();
  j["a_x_cells"] = r.a_x.size();
  j["dim_a_x"] = to_json(r.dim_ax);
  j["full_dimensional"] = r.full_dimensional;
  j["pass_fraction"] = r.pass_fraction;
  j["agreement"] = r.agreement;
  j["pass"] = pin_report_passes(r);
  json pins = json::array();
  for (const auto& p : r.pins) {
    pins.push_back(json{{"a", to_json(p.a)},
                        {"cap", p.cap},
                        {"dot", to_json(p.dot_verdict)},
                        {"projection", to_json(p.proj_verdict)},
                        {"pass", p.pass},
                        {"agrees", p.agrees}});
  }
  j["pins"] = std::move(pins);
  return j;
}

std::string pins_csv(const PinReport& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.x.size(); ++i) os << "a" << i + 1 << ',';
  os << "cap,verdict,slope,pass\n";
  for (const auto& p : r.pins) {
    for (const auto& q : p.a) os << q.str() << ',';
    os << p.cap << ',' << to_string(p.dot_verdict.measure) << ',' << num(p.dot_verdict.slope) << ',' << (p.pass ? 1 : 0)
       << '\n';
  }
  return os.str();
}

json to_json(const DispersionReport& r) {
  return json{{"k", r.k},
              {"planes_tested", r.planes_tested},
              {"worst_ratio", r.worst_ratio},
              {"dispersed", r.dispersed},
              {"witness", r.witness}};
}

json to_json(const TranslationReport& r) {
  json j;
  j["k"] = r.k;
  j["slope_a"] = r.slope_a;
  j["slope_x"] = r.slope_x;
  j["dispersion"] = to_json(r.dispersion);
  j["exploratory"] = r.exploratory;
  j["warnings"] = r.warnings;
  j["xa_fraction"] = r.xa_fraction;
  j["pin_pass_fraction"] = r.pin_pass_fraction;
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e{{"x", to_json(s.x)}, {"radial_slope", s.radial_slope}, {"in_xa", s.in_xa}};
    if (s.pins) {
      e["pass_fraction"] = s.pins->pass_fraction;
      e["full_dimensional"] = s.pins->full_dimensional;
      e["dim_a_x"] = s.pins->dim_ax.slope;
      e["pass"] = pin_report_passes(*s.pins);
    }
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  json diffs = json::array();
  for (const auto& d : r.difference_pins) {
    diffs.push_back(json{{"a1", to_json(d.a1)},
                         {"a2", to_json(d.a2)},
                         {"a0", to_json(d.a0)},
                         {"identity_exact", d.identity_exact},
                         {"positive", d.positive}});
  }
  j["difference_pins"] = std::move(diffs);
  return j;
}

json to_json(const RestrictedReport& r) {
  json j;
  j["curve"] = json{{"min_abs_det", r.curve.min_abs_det}, {"max_abs_det", r.curve.max_abs_det}, {"pass", r.curve.pass}};
  j["angular_level"] = r.angular_level;
  j["t_hit"] = r.t_hit.size();
  j["t_bad"] = r.t_bad;
  j["bad_dimension"] = to_json(r.bad_dim);
  j["bad_dimension_bound"] = r.bad_dim_bound;
  j["pass"] = r.pass;
  j["pin_count"] = r.pin_count;
  json pins = json::array();
  for (const auto& p : r.pins) pins.push_back(to_json(p));
  j["pins"] = std::move(pins);
  return j;
}

json to_json(const KeyLemmaReport& r) {
  return json{{"scale_factor", r.scale_factor},
              {"exact_match", r.exact_match},
              {"exact_discrepancy", r.exact_discrepancy},
              {"snapped_discrepancy", r.snapped_discrepancy},
              {"snapped_tolerance", r.snapped_tolerance},
              {"dot_count", r.dot_count},
              {"projection_count", r.projection_count},
              {"pass", r.pass}};
}

json to_json(const TreeSpec& t) {
  json j;
  j["vertices"] = t.vertices;
  json edges = json::array();
  for (const auto& [a, b] : t.edges) edges.push_back(json::array({a, b}));
  j["edges"] = std::move(edges);
  if (t.pin) j["pin"] = json{{"vertex", t.pin->vertex}, {"point", t.pin->point}};
  return j;
}

TreeSpec tree_from_json(const json& j) {
  try {
    TreeSpec t;
    for (const auto& v : j.at("vertices")) t.vertices.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("tree edges must be [i, j] pairs");
      t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (j.contains("pin")) {
      const auto& p = j.at("pin");
      TreePin pin;
      pin.vertex = p.at("vertex").get<int>();
      pin.point = p.at("point").get<std::vector<double>>();
      t.pin = pin;
    }
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed tree JSON: ") + e.what());
  }
}

json to_json(const TreeMeasureEstimate& e) {
  return json{{"alpha", e.alpha},       {"eps", e.eps},
              {"exact", e.exact},       {"samples", e.samples},
              {"hits", e.hits},         {"estimate", e.estimate},
              {"std_error", e.std_error}, {"s", e.s},
              {"w_size", e.w_size},     {"lower_bound", e.lower_bound},
              {"pass", e.meets_bound()}};
}

std::string tree_csv(const TreeMeasureEstimate& e) {
  std::ostringstream os;
  for (std::size_t i = 0; i < e.alpha.size(); ++i) os << "alpha" << i + 1 << ',';
  os << "eps,estimate,lower_bound,pass\n";
  for (double a : e.alpha) os << num(a) << ',';
  os << num(e.eps) << ',' << num(e.estimate) << ',' << num(e.lower_bound) << ',' << (e.meets_bound() ? 1 : 0) << '\n';
  return os.str();
}

json to_json(const PinnedTreeEstimate& e) {
  json j = to_json(e.measure);
  j["level"] = e.level;
  j["alpha_count"] = e.alpha_count;
  if (e.alpha_proxy) j["alpha_proxy"] = to_json(*e.alpha_proxy);
  return j;
}

json to_json(const SlabWitness& w) {
  json labels = json::array();
  for (const auto& l : w.labels) labels.push_back(json{{"vertex", l.vertex}, {"label", l.name()}});
  return json{{"alpha", w.alpha},
              {"labels", labels},
              {"offsets", w.offsets},
              {"tube_radius", w.tube_radius},
              {"tube_mass", w.tube_mass},
              {"guaranteed", w.guaranteed},
              {"max_error", w.max_error},
              {"s", w.s},
              {"depth", w.depth},
              {"tube_depth", w.tube_depth},
              {"cells", w.cloud.size()}};
}

}  // namespace pindot
