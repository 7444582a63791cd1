#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pindot/exceptional.hpp"

using namespace pindot;

namespace {

PointCloud cantor_square(int q, int b, int depth, int level) {
  const auto c = gen_cantor_1d(CantorSpec{Rational(1, q), b, depth}, level);
  const std::vector<PointCloud> f{c, c};
  return gen_product(f);
}

double fraction(const ExceptionalScan& s) {
  return static_cast<double>(s.exceptional.size()) / static_cast<double>(s.directions.size());
}

}  // namespace

TEST_CASE("C x {0} is measure-exceptional almost everywhere") {
  const CantorSpec spec{Rational(1, 3), 2, 6};
  const auto c = gen_cantor_1d(spec, 11);
  const std::vector<PointCloud> f{c, gen_point(1, 11)};
  ScanOptions opts;
  opts.angular_level = 6;
  const auto scan = scan_directions(gen_product(f), ExceptionalKind::measure, 1.0, opts);
  CHECK(fraction(scan) >= 0.9);
  // the horizontal line sees the Cantor set itself
  const SphereGrid g = scan.grid();
  const std::array<double, 2> e1{1.0, 0.0};
  CHECK(scan.is_exceptional_line(g.line_index(g.cap_index(e1))));
  CHECK(scan.exc_dim.slope >= 0.85);
}

TEST_CASE("unit square has no dimension-exceptional directions") {
  const auto i = gen_interval(8, Rational(0), Rational(1));
  const std::vector<PointCloud> f{i, i};
  ScanOptions opts;
  opts.angular_level = 7;
  const auto scan = scan_directions(gen_product(f), ExceptionalKind::dimension, 1.0, opts);
  CHECK(scan.exceptional.empty());
  const auto mscan = scan_directions(gen_product(f), ExceptionalKind::measure, 1.0, opts);
  CHECK(mscan.exceptional.empty());
}

TEST_CASE("C x C measure-exceptional set obeys the n - dim A bound") {
  const auto a = cantor_square(3, 2, 6, 10);
  const double dim_a = 2 * std::log(2.0) / std::log(3.0);
  ScanOptions opts;
  opts.angular_level = 8;
  const auto scan = scan_directions(a, ExceptionalKind::measure, 1.0, opts);
  const auto bc = check_bound(scan, dim_a);
  CHECK(bc.bound == doctest::Approx(2.0 - dim_a));
  CHECK(bc.measured <= 2.0 - dim_a + kBoundMargin);
  CHECK(bc.pass);
  CHECK(scan.exc_dim.slope <= 1.0 + kSlopeMargin);
}

TEST_CASE("bound formulas") {
  CHECK(exceptional_bound(ExceptionalKind::dimension, 2, 0.5, 1.26) == doctest::Approx(0.24));
  CHECK(*planar_dimension_bound(2, 0.5, 1.26) == 0.0);
  CHECK(!planar_dimension_bound(3, 0.5, 1.26));
  for (double u : {0.25, 0.5, 1.0}) CHECK(exceptional_bound(ExceptionalKind::dimension, 3, u, 3.0) <= 1.0);
  CHECK(exceptional_bound(ExceptionalKind::measure, 3, 1.0, 3.0) == 0.0);
  CHECK(exceptional_bound(ExceptionalKind::interior, 3, 1.0, 3.0) <= 1.0);
  CHECK(exceptional_bound(ExceptionalKind::interior, 3, 1.0, 2.3) == doctest::Approx(1.7));
  CHECK_THROWS_AS(exceptional_bound(ExceptionalKind::measure, 2, 1.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(exceptional_bound(ExceptionalKind::interior, 2, 1.0, 1.9), std::invalid_argument);
  CHECK_THROWS_AS(exceptional_bound(ExceptionalKind::interior, 3, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("scan argument errors") {
  const auto a = cantor_square(3, 2, 3, 6);
  CHECK_THROWS_AS(scan_directions(a, ExceptionalKind::dimension, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scan_directions(a, ExceptionalKind::dimension, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(scan_directions(gen_point(1, 6), ExceptionalKind::measure), std::invalid_argument);
  CHECK_THROWS_AS(scan_directions(gen_point(4, 6), ExceptionalKind::measure), std::invalid_argument);
  CHECK_THROWS_AS(parse_kind("nope"), std::invalid_argument);
  CHECK(parse_kind(to_string(ExceptionalKind::interior)) == ExceptionalKind::interior);
}

TEST_CASE("E_u is nested in u") {
  const auto a = cantor_square(4, 2, 4, 9);
  ScanOptions opts;
  opts.angular_level = 7;
  std::vector<std::int64_t> prev;
  for (double u : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto scan = scan_directions(a, ExceptionalKind::dimension, u, opts);
    CHECK(std::includes(scan.exceptional.begin(), scan.exceptional.end(), prev.begin(), prev.end()));
    prev = scan.exceptional;
  }
  CHECK(!prev.empty());
}

TEST_CASE("interior-free verdicts contain measure-null verdicts") {
  for (const auto& a : {cantor_square(3, 2, 5, 9), cantor_square(4, 3, 4, 9)}) {
    ScanOptions opts;
    opts.angular_level = 7;
    const auto m = scan_directions(a, ExceptionalKind::measure, 1.0, opts);
    const auto i = scan_directions(a, ExceptionalKind::interior, 1.0, opts);
    CHECK(std::includes(i.exceptional.begin(), i.exceptional.end(), m.exceptional.begin(), m.exceptional.end()));
  }
}

TEST_CASE("axis swaps and sign flips permute the exceptional lines") {
  const auto c = gen_cantor_1d(CantorSpec{Rational(1, 3), 2, 4}, 8);
  const auto d = gen_cantor_1d(CantorSpec{Rational(1, 4), 2, 3}, 8);
  const std::vector<PointCloud> f{c, d};
  const auto a = gen_product(f);
  ScanOptions opts;
  opts.angular_level = 6;
  const auto base = scan_directions(a, ExceptionalKind::measure, 1.0, opts);
  const SphereGrid g = base.grid();
  const std::array<int, 2> swap{1, 0}, id{0, 1};
  const std::array<int, 2> plus{1, 1}, flip{-1, 1};
  struct Case {
    std::array<int, 2> perm, sign;
  };
  for (const Case& t : {Case{swap, plus}, Case{id, flip}, Case{swap, flip}}) {
    const auto b = a.transform_axes(t.perm, t.sign);
    const auto moved = scan_directions(b, ExceptionalKind::measure, 1.0, opts);
    std::vector<std::int64_t> mapped;
    for (auto line : base.exceptional) {
      const auto th = g.cap_center(g.line_cap(line));
      std::array<double, 2> v{};
      for (int i = 0; i < 2; ++i) v[i] = t.sign[i] * th[t.perm[i]];
      mapped.push_back(g.line_index(g.cap_index(v)));
    }
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == moved.exceptional);
  }
}

TEST_CASE("exceptional caps never exceed the sphere dimension") {
  const auto a = cantor_square(4, 2, 4, 9);
  ScanOptions opts;
  opts.angular_level = 7;
  const auto scan = scan_directions(a, ExceptionalKind::interior, 1.0, opts);
  CHECK(scan.exc_dim.slope <= 1.0 + kSlopeMargin);
  for (auto l : scan.exceptional) CHECK(l < scan.grid().line_count());
}
