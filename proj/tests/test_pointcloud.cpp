#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "pindot/dimension.hpp"
#include "pindot/pointcloud.hpp"

using namespace pindot;

TEST_CASE("cantor depth 0 is the unit interval") {
  const auto a = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 0}, 6);
  CHECK(a.size() == 64);
  CHECK(a.cell(0)[0] == 0);
  CHECK(a.cell(63)[0] == 63);
}

TEST_CASE("cantor cells match the interval oracle") {
  for (auto [q, b, d] : {std::array{3, 2, 3}, std::array{3, 2, 5}, std::array{4, 2, 4}, std::array{5, 2, 3},
                         std::array{4, 3, 4}, std::array{8, 7, 2}}) {
    CantorSpec s{Rational(1, q), b, d};
    for (int m = min_level(s); m < min_level(s) + 3; ++m) {
      const auto a = gen_cantor_1d(s, m);
      CHECK(a.flat_cells() == oracle::cells_with_center_in(oracle::cantor(q, b, d), m));
    }
  }
}

TEST_CASE("cantor covering count at native scales is b^k") {
  SUBCASE("middle thirds, depth 3 has 8 boxes at 3^-3") {
    const auto a = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 3}, 8);
    CHECK(covering_count(a, 3, 3) == 8);
  }
  // specs whose children sit on the base-q grid
  for (auto [q, b, d] : {std::array{3, 2, 6}, std::array{4, 2, 5}, std::array{5, 2, 4}, std::array{5, 3, 3}}) {
    CantorSpec s{Rational(1, q), b, d};
    const auto a = gen_cantor_1d(s, min_level(s));
    for (int k = 0; k <= std::min(d, max_count_level(a.level(), q)); ++k) {
      CHECK(covering_count(a, k, q) == static_cast<std::int64_t>(std::pow(b, k)));
      CHECK(covering_count(a, k, q) == oracle::boxes(a.flat_cells(), 1, a.level(), q, k));
    }
  }
}

TEST_CASE("ratio 1/4 two-branch cantor fits dimension 1/2") {
  const CantorSpec s{Rational(1, 4), 2, 5};
  const auto a = gen_cantor_1d(s, min_level(s));
  CHECK(estimate_dimension(a).slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::fabs(estimate_dimension(a).slope - 0.5) <= 0.05);
}

TEST_CASE("cantor spec validation") {
  CHECK_THROWS_AS(CantorSpec({Rational(1, 2), 3, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CantorSpec({Rational(2, 3), 2, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CantorSpec({Rational(1, 3), 1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 6}, 5), std::invalid_argument);
  CHECK(CantorSpec({Rational(1, 3), 2, 4}).dimension() == doctest::Approx(std::log(2.0) / std::log(3.0)));
}

TEST_CASE("products") {
  const CantorSpec s{Rational(1, 3), 2, 3};
  const int m = min_level(s);
  const auto c = gen_cantor_1d(s, m);
  const auto z = gen_point(1, m);
  SUBCASE("C x {0} lies on the x-axis") {
    const std::vector<PointCloud> f{c, z};
    const auto a = gen_product(f);
    CHECK(covering_count(a, 3, 3) == 8);
    CHECK(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.cell(i)[1] == 0);
  }
  SUBCASE("C x C has 64 boxes at 3^-3 and 4^k at 3^-k") {
    const std::vector<PointCloud> f{c, c};
    const auto a = gen_product(f);
    CHECK(a.size() == c.size() * c.size());
    for (int k = 0; k <= 3; ++k) CHECK(covering_count(a, k, 3) == (std::int64_t{1} << (2 * k)));
  }
  SUBCASE("C x C at depth 6 fits 2 log2/log3") {
    const auto c6 = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 6}, 10);
    const std::vector<PointCloud> f{c6, c6};
    CHECK(std::fabs(estimate_dimension(gen_product(f)).slope - 2 * std::log(2.0) / std::log(3.0)) <= 0.07);
  }
  SUBCASE("point x point") {
    const std::vector<PointCloud> f{z, z};
    CHECK(gen_product(f).size() == 1);
  }
  SUBCASE("mismatched levels") {
    const std::vector<PointCloud> f{c, gen_point(1, m + 1)};
    CHECK_THROWS_AS(gen_product(f), std::invalid_argument);
  }
  SUBCASE("weights multiply") {
    const auto w = c.with_uniform_weights();
    const std::vector<PointCloud> f{w, w};
    const auto a = gen_product(f);
    REQUIRE(a.has_weights());
    const double each = 1.0 / static_cast<double>(a.size());
    for (double x : a.weights()) CHECK(x == doctest::Approx(each));
  }
}

TEST_CASE("sharpness line") {
  const auto a = gen_sharpness_line(8);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.cell(i)[1] == 0);
  CHECK_THROWS_AS(gen_sharpness_line(7), std::invalid_argument);
  // base-3 normalized counts fall as (2/3)^k, so the finer line shows a smaller proxy
  const auto fine = gen_sharpness_line(12);
  const int d8 = sharpness_depth(8), d12 = sharpness_depth(12);
  CHECK(d8 == 5);
  CHECK(d12 == 7);
  const double p8 = covering_count(a, d8, 3) * std::pow(3.0, -d8);
  const double p12 = covering_count(fine, d12, 3) * std::pow(3.0, -d12);
  CHECK(p12 / p8 <= std::pow(2.0 / 3.0, d12 - d8) + 1e-12);
}

TEST_CASE("slab construction") {
  SUBCASE("two vertical cantor slices") {
    const auto sc = gen_slab_construction(2, 2, 0.63, 8);
    CHECK(sc.offsets.size() == 2);
    std::set<std::int64_t> firsts;
    for (std::size_t i = 0; i < sc.cloud.size(); ++i) firsts.insert(sc.cloud.cell(i)[0]);
    CHECK(firsts.size() == 2);
    CHECK(sc.offsets[0] != sc.offsets[1]);
    for (const auto& o : sc.offsets) CHECK((Rational(0) < o && !(Rational(1) < o)));
  }
  SUBCASE("s = 0 puts one cell per slice on the axis") {
    const auto sc = gen_slab_construction(2, 1, 0.0, 8);
    CHECK(sc.cloud.size() == 1);
  }
  SUBCASE("n = 3, s = 1.26 carries 4^d cells per plane") {
    const auto sc = gen_slab_construction(3, 3, 1.26, 8);
    REQUIRE(sc.factor_specs.size() == 2);
    const int d = sc.factor_specs[0].depth;
    CHECK(sc.cloud.size() == 3 * static_cast<std::size_t>(std::pow(4, d)) * 1);
  }
  CHECK_THROWS_AS(gen_slab_construction(2, 2, 1.5, 8), std::invalid_argument);
}

TEST_CASE("determinism and coarsening") {
  const CantorSpec s{Rational(1, 3), 2, 5};
  CHECK(gen_cantor_1d(s, 10) == gen_cantor_1d(s, 10));
  CHECK(gen_random(3, 10, 500, 9) == gen_random(3, 10, 500, 9));
  CHECK(!(gen_random(3, 10, 500, 9) == gen_random(3, 10, 500, 10)));

  SUBCASE("dyadic-aligned generators refine exactly") {
    for (const CantorSpec t : {CantorSpec{Rational(1, 4), 2, 4}, CantorSpec{Rational(1, 4), 3, 4}}) {
      for (int m = min_level(t); m < min_level(t) + 3; ++m) {
        CHECK(gen_cantor_1d(t, m + 1).coarsen(m) == gen_cantor_1d(t, m));
      }
    }
    CHECK(gen_interval(9, Rational(1, 4), Rational(3, 4)).coarsen(8) == gen_interval(8, Rational(1, 4), Rational(3, 4)));
  }
  SUBCASE("other generators refine up to boundary cells") {
    for (const CantorSpec t : {CantorSpec{Rational(1, 3), 2, 5}, CantorSpec{Rational(1, 5), 2, 3}}) {
      for (int m = min_level(t); m < min_level(t) + 3; ++m) {
        const auto base = gen_cantor_1d(t, m);
        const auto up = gen_cantor_1d(t, m + 1).coarsen(m);
        for (std::size_t i = 0; i < base.size(); ++i) CHECK(up.find(base.cell(i)).has_value());
        for (std::size_t i = 0; i < up.size(); ++i) {
          const std::int64_t c = up.cell(i)[0];
          const std::array<std::int64_t, 1> l{c - 1}, r{c + 1};
          CHECK((base.find(up.cell(i)) || base.find(l) || base.find(r)));
        }
      }
    }
  }
}

TEST_CASE("cloud invariants") {
  CHECK_THROWS_AS(PointCloud(2, 4, {100, 0}), std::invalid_argument);  // outside [-2, 2]
  CHECK_THROWS_AS(PointCloud(1, 4, {0, 1}, 2.0, std::vector<double>{0.5, 0.6}), std::invalid_argument);
  const PointCloud a(2, 4, {3, 1, 0, 0, 3, 1});
  CHECK(a.size() == 2);  // deduplicated
  CHECK(a.cell(0)[0] == 0);  // sorted
  const auto w = a.with_uniform_weights();
  CHECK(w.weights()[0] + w.weights()[1] == doctest::Approx(1.0));
}
