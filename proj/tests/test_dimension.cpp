#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "pindot/dimension.hpp"
#include "pindot/rng.hpp"

using namespace pindot;

namespace {

ScalarSet interval_set(int level, std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> c;
  for (std::int64_t i = lo; i < hi; ++i) c.push_back(i);
  return ScalarSet(level, c, 2.0);
}

ScalarSet as_scalar(const PointCloud& a) { return ScalarSet(a.level(), a.flat_cells(), a.bound()); }

}  // namespace

TEST_CASE("covering counts") {
  SUBCASE("middle thirds depth 5 has 8 boxes at 3^-3") {
    const auto c = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 5}, 10);
    CHECK(covering_count(c, 3, 3) == 8);
    CHECK(covering_count(as_scalar(c), 3, 3) == 8);
  }
  SUBCASE("unit interval gives 2^k") {
    const auto a = gen_interval(10, Rational(0), Rational(1));
    for (int k = 0; k <= 10; ++k) CHECK(covering_count(a, k) == (std::int64_t{1} << k));
  }
  SUBCASE("single cell is one box everywhere") {
    const auto p = gen_point(3, 9);
    for (int k = 0; k <= 9; ++k) CHECK(covering_count(p, k) == 1);
  }
  SUBCASE("agree with the box oracle") {
    for (int base : {2, 3, 5}) {
      const auto a = gen_random(3, 9, 3000, static_cast<std::uint64_t>(base));
      for (int k = 0; k <= max_count_level(9, base); ++k) {
        CHECK(covering_count(a, k, base) == oracle::boxes(a.flat_cells(), 3, 9, base, k));
      }
    }
  }
  SUBCASE("levels above native resolution are rejected") {
    CHECK_THROWS_AS(covering_count(gen_point(2, 5), 6), std::invalid_argument);
  }
}

TEST_CASE("counts are monotone and grow at most 2^n per level") {
  for (int n = 1; n <= 3; ++n) {
    const auto a = gen_random(n, 10, 5000, static_cast<std::uint64_t>(40 + n));
    const auto c = covering_counts(a);
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      CHECK(c[k] <= c[k + 1]);
      CHECK(c[k + 1] <= (std::int64_t{1} << n) * c[k]);
    }
  }
}

TEST_CASE("estimate_dimension examples") {
  SUBCASE("unit square") {
    const auto i = gen_interval(8, Rational(0), Rational(1));
    const std::vector<PointCloud> f{i, i};
    const auto r = estimate_dimension(gen_product(f), Window{2, 8});
    CHECK(std::fabs(r.slope - 2.0) <= 0.01);
    CHECK(r.r2 == doctest::Approx(1.0));
  }
  SUBCASE("middle thirds depth 8 against the exact count oracle") {
    const CantorSpec s{Rational(1, 3), 2, 8};
    const auto a = gen_cantor_1d(s, min_level(s));
    const auto r = estimate_dimension(a);
    std::vector<double> counts;
    for (int k = 0; k <= a.level(); ++k) counts.push_back(static_cast<double>(oracle::boxes(a.flat_cells(), 1, a.level(), 2, k)));
    CHECK(r.slope == doctest::Approx(oracle::slope(counts, 2, r.window.lo, r.window.hi)));
    CHECK(std::fabs(r.slope - std::log(2.0) / std::log(3.0)) <= 0.05);
  }
  SUBCASE("C x C") {
    const auto c = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 6}, 10);
    const std::vector<PointCloud> f{c, c};
    CHECK(std::fabs(estimate_dimension(gen_product(f)).slope - 2 * std::log(2.0) / std::log(3.0)) <= 0.07);
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(estimate_dimension(gen_point(1, 10), Window{3, 5}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_dimension(ScalarSet(8, {}, 2.0)), std::invalid_argument);
  }
  SUBCASE("slope stays in [0, n]") {
    for (int n = 1; n <= 3; ++n) {
      const auto r = estimate_dimension(gen_random(n, 10, 20000, 77));
      CHECK(r.slope >= 0.0);
      CHECK(r.slope <= n + 1e-9);
    }
  }
}

TEST_CASE("measure proxy examples") {
  SUBCASE("full interval is positive") {
    const auto s = interval_set(12, 0, 4096);
    const auto mp = measure_proxy(s);
    CHECK(mp.verdict == Verdict::positive);
    for (int k = 0; k <= 12; ++k) CHECK(mp.ratios[k] == doctest::Approx(1.0));
  }
  SUBCASE("middle thirds is null, exactly (2/3)^k in base 3") {
    const CantorSpec spec{Rational(1, 3), 2, 9};
    const auto s = as_scalar(gen_cantor_1d(spec, min_level(spec)));
    const auto counts = covering_counts(s, 3);
    for (int k = 0; k <= std::min<int>(9, static_cast<int>(counts.size()) - 1); ++k) {
      CHECK(counts[k] == (std::int64_t{1} << k));
    }
    CHECK(measure_proxy(s).verdict == Verdict::null);
    CHECK(measure_proxy(s, 3).verdict == Verdict::null);
  }
  SUBCASE("cantor plus interval is positive") {
    const CantorSpec spec{Rational(1, 3), 2, 7};
    const auto c = as_scalar(gen_cantor_1d(spec, 12));
    const auto s = c.unite(interval_set(12, 0, 2048));
    CHECK(measure_proxy(s).verdict == Verdict::positive);
  }
  SUBCASE("too few levels") {
    CHECK_THROWS_AS(measure_proxy_from_counts({1, 2}, 2, 1), std::invalid_argument);
  }
}

TEST_CASE("interior probe examples") {
  CHECK(interior_probe(interval_set(10, 0, 1024), 16).has_interior);
  const CantorSpec spec{Rational(1, 3), 2, 5};
  const auto c = as_scalar(gen_cantor_1d(spec, 8));
  CHECK(!interior_probe(c, 16).has_interior);
  CHECK(!interior_probe(ScalarSet(10, {3, 700}, 2.0), 16).has_interior);
  CHECK(interior_probe(ScalarSet(10, {3, 700}, 2.0), 16).longest_run == 1);
  CHECK_THROWS_AS(interior_probe(c, 3), std::invalid_argument);
}

TEST_CASE("scaling invariance") {
  const CantorSpec spec{Rational(1, 3), 2, 8};
  const auto c = as_scalar(gen_cantor_1d(spec, 14));
  const auto full = interval_set(14, 0, 1 << 14);
  const double base_slope = estimate_dimension(c).slope;
  for (double k : {0.5, 0.75, 1.5, 2.0, 3.0, 4.0}) {
    const auto sc = c.scaled(k);
    CHECK(std::fabs(estimate_dimension(sc).slope - base_slope) <= 0.07);
    CHECK(measure_proxy(sc).verdict == measure_proxy(c).verdict);
    CHECK(measure_proxy(full.scaled(k)).verdict == Verdict::positive);
  }
}

TEST_CASE("monotonicity under inclusion") {
  CounterRng rng(5);
  std::vector<std::int64_t> big, small;
  for (int i = 0; i < 3000; ++i) {
    const auto c = static_cast<std::int64_t>(rng.below(1 << 14));
    big.push_back(c);
    if (i % 3 == 0) small.push_back(c);
  }
  for (std::int64_t i = 5000; i < 5040; ++i) big.push_back(i);
  const ScalarSet s(14, small, 2.0), t(14, big, 2.0);
  CHECK(estimate_dimension(s).slope <= estimate_dimension(t).slope + 0.05);
  CHECK(interior_probe(t, 16).has_interior);
  CHECK((!interior_probe(s, 16).has_interior || interior_probe(t, 16).has_interior));
}

TEST_CASE("native-base calibration is exact on aligned specs") {
  for (auto [q, b, d] : {std::array{3, 2, 8}, std::array{4, 2, 8}, std::array{5, 2, 7}}) {
    const CantorSpec s{Rational(1, q), b, d};
    const auto a = gen_cantor_1d(s, min_level(s));
    const int kmax = std::min(d, max_count_level(a.level(), q));
    const auto r = estimate_dimension(a, Window{1, kmax}, q);
    CHECK(r.slope == doctest::Approx(std::log(b) / std::log(q)).epsilon(1e-9));
  }
}
