#include "pindot/pindot.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "pindot/experiment.hpp"
#include "pindot/parallel.hpp"

struct pd_cloud {
  pindot::PointCloud cloud;
};

struct pd_scalar_set {
  pindot::ScalarSet set;
};

namespace {

thread_local std::string last_error;

template <class F>
pd_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PD_OK;
  } catch (const pindot::ConfigError& e) {
    last_error = e.what();
    return PD_CONFIG_ERROR;
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return PD_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return PD_INVALID_ARGUMENT;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return PD_IO_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PD_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return PD_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pindot::json parse(const char* text, const char* what) {
  need(text, what);
  try {
    return pindot::json::parse(text);
  } catch (const pindot::json::exception& e) {
    throw std::invalid_argument(std::string(what) + " is not valid JSON: " + e.what());
  }
}

pindot::ExactPoint exact_point(const char* const* v, int dim, const char* what) {
  need(v, what);
  pindot::ExactPoint p;
  for (int i = 0; i < dim; ++i) {
    need(v[i], what);
    p.push_back(pindot::Rational::parse(v[i]));
  }
  return p;
}

std::optional<pindot::Window> window_option(const pindot::json& o) {
  if (!o.contains("window")) return std::nullopt;
  const auto v = o.at("window").get<std::vector<int>>();
  if (v.size() != 2) throw std::invalid_argument("window must be [lo, hi]");
  return pindot::Window{v[0], v[1]};
}

}  // namespace

extern "C" {

const char* pd_last_error(void) { return last_error.c_str(); }

const char* pd_version(void) { return pindot::kToolVersion; }

pd_status pd_set_threads(int n) {
  return guarded([&] {
    if (n < 0) throw std::invalid_argument("thread count must be nonnegative");
    pindot::set_thread_count(n);
  });
}

void pd_string_free(char* s) { delete[] s; }

pd_status pd_cloud_from_json(const char* json, pd_cloud** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pd_cloud{pindot::cloud_from_json(parse(json, "cloud"))};
  });
}

pd_status pd_cloud_to_json(const pd_cloud* c, char** out) {
  return guarded([&] {
    need(c, "cloud");
    need(out, "out");
    *out = copy_string(pindot::dump(pindot::to_json(c->cloud)));
  });
}

pd_status pd_cloud_generate(const char* generator_json, pd_cloud** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pd_cloud{pindot::generate(parse(generator_json, "generator"))};
  });
}

void pd_cloud_free(pd_cloud* c) { delete c; }
size_t pd_cloud_size(const pd_cloud* c) { return c ? c->cloud.size() : 0; }
int pd_cloud_dim(const pd_cloud* c) { return c ? c->cloud.dim() : 0; }
int pd_cloud_level(const pd_cloud* c) { return c ? c->cloud.level() : 0; }

pd_status pd_orthogonal_project(const pd_cloud* c, const double* theta, pd_scalar_set** out) {
  return guarded([&] {
    need(c, "cloud");
    need(theta, "theta");
    need(out, "out");
    const std::vector<double> t(theta, theta + c->cloud.dim());
    *out = new pd_scalar_set{pindot::orthogonal_project(c->cloud, t)};
  });
}

pd_status pd_dot_product_set(const pd_cloud* c, const char* const* a, const char* const* x, int level,
                             pd_scalar_set** out) {
  return guarded([&] {
    need(c, "cloud");
    need(out, "out");
    const auto av = exact_point(a, c->cloud.dim(), "a");
    const auto xv = exact_point(x, c->cloud.dim(), "x");
    if (level < 0) level = pindot::matched_dot_level(c->cloud, av, xv);
    *out = new pd_scalar_set{pindot::dot_product_set(c->cloud, av, xv, level)};
  });
}

pd_status pd_scalar_set_to_json(const pd_scalar_set* s, char** out) {
  return guarded([&] {
    need(s, "scalar set");
    need(out, "out");
    *out = copy_string(pindot::dump(pindot::to_json(s->set)));
  });
}

void pd_scalar_set_free(pd_scalar_set* s) { delete s; }
size_t pd_scalar_set_size(const pd_scalar_set* s) { return s ? s->set.size() : 0; }

pd_status pd_estimate_dimension_cloud(const pd_cloud* c, const char* options_json, char** report_json) {
  return guarded([&] {
    need(c, "cloud");
    need(report_json, "out");
    const auto o = options_json ? parse(options_json, "options") : pindot::json::object();
    const auto r = pindot::estimate_dimension(c->cloud, window_option(o), o.value("base", 2));
    *report_json = copy_string(pindot::dump(pindot::to_json(r)));
  });
}

pd_status pd_estimate_dimension_scalar(const pd_scalar_set* s, const char* options_json, char** report_json) {
  return guarded([&] {
    need(s, "scalar set");
    need(report_json, "out");
    const auto o = options_json ? parse(options_json, "options") : pindot::json::object();
    const auto r = pindot::estimate_dimension(s->set, window_option(o), o.value("base", 2));
    *report_json = copy_string(pindot::dump(pindot::to_json(r)));
  });
}

pd_status pd_keylemma_check(const pd_cloud* c, const char* const* a, const char* const* x, char** report_json) {
  return guarded([&] {
    need(c, "cloud");
    need(report_json, "out");
    const auto r = pindot::key_lemma_check(c->cloud, exact_point(a, c->cloud.dim(), "a"),
                                           exact_point(x, c->cloud.dim(), "x"));
    *report_json = copy_string(pindot::dump(pindot::to_json(r)));
  });
}

pd_status pd_run(const char* config_json, const char* out_dir, char** record_json) {
  return guarded([&] {
    need(record_json, "out");
    auto cfg = pindot::ExperimentConfig::from_json(parse(config_json, "config"));
    if (out_dir) cfg.output = out_dir;
    *record_json = copy_string(pindot::dump(pindot::to_json(pindot::run(cfg))));
  });
}

pd_status pd_tool(const char* op, const char* config_json, const char* out_dir, char** result_json) {
  return guarded([&] {
    need(op, "op");
    need(out_dir, "out_dir");
    need(result_json, "out");
    *result_json = copy_string(pindot::dump(pindot::run_tool(op, parse(config_json, "config"), out_dir)));
  });
}

pd_status pd_report(const char* records_json, char** summary_json, char** table) {
  return guarded([&] {
    need(summary_json, "out");
    need(table, "out");
    const auto j = parse(records_json, "records");
    if (!j.is_array()) throw pindot::ConfigError("records must be a JSON array");
    std::vector<pindot::RunRecord> records;
    for (const auto& r : j) records.push_back(pindot::record_from_json(r));
    const auto s = pindot::report(records);
    *summary_json = copy_string(pindot::dump(s.document));
    *table = copy_string(s.table);
  });
}

}  // extern "C"
