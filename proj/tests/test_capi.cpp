#include "doctest.h"

#include <cmath>
#include <string>

#include "json.hpp"
#include "pindot/pindot.h"

using json = nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  pd_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("cloud handles") {
  pd_cloud* c = nullptr;
  REQUIRE(pd_cloud_generate(R"({"type": "cantor", "ratio": "1/3", "depth": 4, "level": 8, "power": 2})", &c) == PD_OK);
  CHECK(pd_cloud_dim(c) == 2);
  CHECK(pd_cloud_level(c) == 8);
  const size_t n = pd_cloud_size(c);
  CHECK(n > 0);

  char* text = nullptr;
  REQUIRE(pd_cloud_to_json(c, &text) == PD_OK);
  const std::string doc = take(text);
  pd_cloud* back = nullptr;
  REQUIRE(pd_cloud_from_json(doc.c_str(), &back) == PD_OK);
  CHECK(pd_cloud_size(back) == n);
  REQUIRE(pd_cloud_to_json(back, &text) == PD_OK);
  CHECK(take(text) == doc);

  char* rep = nullptr;
  REQUIRE(pd_estimate_dimension_cloud(c, R"({"base": 3, "window": [1, 4]})", &rep) == PD_OK);
  CHECK(json::parse(take(rep))["slope"].get<double>() == doctest::Approx(2 * std::log(2.0) / std::log(3.0)).epsilon(1e-9));

  pd_cloud_free(back);
  pd_cloud_free(c);
}

TEST_CASE("projections and dot-product sets") {
  pd_cloud* c = nullptr;
  REQUIRE(pd_cloud_generate(R"({"type": "interval", "lo": "0", "hi": "1", "level": 8})", &c) == PD_OK);
  const double theta[1] = {1.0};
  pd_scalar_set* p = nullptr;
  REQUIRE(pd_orthogonal_project(c, theta, &p) == PD_OK);
  CHECK(pd_scalar_set_size(p) == 256);

  const char* a[1] = {"3/4"};
  const char* x[1] = {"-1/4"};
  pd_scalar_set* d = nullptr;
  REQUIRE(pd_dot_product_set(c, a, x, 8, &d) == PD_OK);
  CHECK(pd_scalar_set_size(d) == 256);  // |a - x| = 1
  char* rep = nullptr;
  REQUIRE(pd_keylemma_check(c, a, x, &rep) == PD_OK);
  CHECK(json::parse(take(rep))["exact_match"] == true);
  REQUIRE(pd_estimate_dimension_scalar(d, nullptr, &rep) == PD_OK);
  CHECK(json::parse(take(rep))["slope"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  char* text = nullptr;
  REQUIRE(pd_scalar_set_to_json(d, &text) == PD_OK);
  CHECK(!take(text).empty());

  pd_scalar_set_free(d);
  pd_scalar_set_free(p);
  pd_cloud_free(c);
}

TEST_CASE("errors become status codes") {
  pd_cloud* c = nullptr;
  CHECK(pd_cloud_from_json("{broken", &c) == PD_INVALID_ARGUMENT);
  CHECK(c == nullptr);
  CHECK(std::string(pd_last_error()).size() > 0);
  CHECK(pd_cloud_generate(R"({"type": "cantor", "ratio": "2/3", "depth": 2})", &c) != PD_OK);
  CHECK(pd_cloud_generate(nullptr, &c) == PD_INVALID_ARGUMENT);
  char* rec = nullptr;
  CHECK(pd_run(R"({"experiment": "nope"})", nullptr, &rec) == PD_CONFIG_ERROR);
  CHECK(pd_report("[]", &rec, &rec) == PD_CONFIG_ERROR);
  CHECK(pd_tool("frobnicate", "{}", "out", &rec) != PD_OK);
  CHECK(pd_set_threads(-1) == PD_INVALID_ARGUMENT);
  CHECK(std::string(pd_version()).find("pindot") == 0);
}

TEST_CASE("report through the C API") {
  const json records = json::array({
      {{"experiment", "keylemma"}, {"config_hash", std::string(64, 'b')}, {"tool_version", "pindot 0.1.0"},
       {"wall_time", 0.1}, {"outputs", json::array()}, {"pass", true}, {"exploratory", false},
       {"warnings", json::array()}, {"summary", json::object()}},
  });
  char* summary = nullptr;
  char* table = nullptr;
  REQUIRE(pd_report(records.dump().c_str(), &summary, &table) == PD_OK);
  CHECK(json::parse(take(summary))["pass"] == true);
  CHECK(take(table).find("keylemma") != std::string::npos);
}
