#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "pindot/geometry.hpp"
#include "pindot/rng.hpp"
#include "pindot/trees.hpp"

using namespace pindot;

namespace {

// Label order by direct simulation of the greedy rule on an adjacency matrix.
std::vector<std::pair<int, bool>> simulate_labels(const TreeSpec& t, const Coloring& c) {
  const int v = t.vertex_count();
  std::vector<std::vector<bool>> adj(v, std::vector<bool>(v, false));
  for (auto [a, b] : t.edges) adj[a][b] = adj[b][a] = true;
  std::vector<bool> done(v, false);
  for (int x : c.u) done[x] = true;
  std::vector<std::pair<int, bool>> out;
  for (int x : c.u) {
    out.emplace_back(x, true);
    for (int y = 0; y < v; ++y) {
      if (adj[x][y] && !done[y]) {
        done[y] = true;
        out.emplace_back(y, false);
      }
    }
  }
  return out;
}

PointCloud random_cloud(int n, int level, std::size_t cells, std::uint64_t seed) {
  return gen_random(n, level, cells, seed).with_uniform_weights();
}

PointCloud dense_square(int level) {
  const auto i = gen_interval(level, Rational(0), Rational(1));
  const std::vector<PointCloud> f{i, i};
  return gen_product(f);
}

ExactPoint exact_center(const PointCloud& a, std::size_t i) {
  ExactPoint p;
  for (int ax = 0; ax < a.dim(); ++ax) p.push_back(Rational(2 * a.cell(i)[ax] + 1, std::int64_t{2} << a.level()));
  return p;
}

}  // namespace

TEST_CASE("two_color") {
  SUBCASE("3-path") {
    const auto c = two_color(TreeSpec::path(3));
    CHECK(c.u == std::vector<int>{0, 2});
    CHECK(c.w == std::vector<int>{1});
  }
  SUBCASE("star") {
    const auto c = two_color(TreeSpec::star(3));
    CHECK(c.w == std::vector<int>{0});
  }
  SUBCASE("4-path tie keeps v1 in U") {
    const auto c = two_color(TreeSpec::path(4));
    CHECK(c.u.size() == 2);
    CHECK(c.w.size() == 2);
    CHECK(c.u[0] == 0);
  }
  SUBCASE("invalid trees") {
    TreeSpec cyc;
    cyc.vertices = {"a", "b", "c"};
    cyc.edges = {{0, 1}, {1, 2}, {2, 0}};
    CHECK_THROWS_AS(two_color(cyc), std::invalid_argument);
    TreeSpec split;
    split.vertices = {"a", "b", "c", "d"};
    split.edges = {{0, 1}, {2, 3}, {0, 1}};
    CHECK_THROWS_AS(two_color(split), std::invalid_argument);
  }
}

TEST_CASE("greedy_label") {
  SUBCASE("3-path") {
    const auto t = TreeSpec::path(3);
    const auto l = greedy_label(t, two_color(t));
    REQUIRE(l.size() == 3);
    CHECK(l[0].vertex == 0);
    CHECK(l[0].name() == "u1");
    CHECK(l[1].vertex == 1);
    CHECK(l[1].name() == "w1,1");
    CHECK(l[2].vertex == 2);
    CHECK(l[2].name() == "u2");
  }
  SUBCASE("star: the first leaf claims the center") {
    const auto t = TreeSpec::star(3);
    const auto l = greedy_label(t, two_color(t));
    REQUIRE(l.size() == 4);
    CHECK(l[0].vertex == 1);
    CHECK(l[1].vertex == 0);
    CHECK(l[1].name() == "w1,1");
    CHECK(l[2].name() == "u2");
    CHECK(l[3].name() == "u3");
  }
  SUBCASE("broom") {
    TreeSpec t;
    t.vertices = {"a", "b", "c", "d", "e"};
    t.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 4}};
    const auto c = two_color(t);
    CHECK(c.u == std::vector<int>{1, 3, 4});
    const auto l = greedy_label(t, c);
    std::vector<std::string> names;
    for (const auto& x : l) names.push_back(x.name());
    CHECK(names == std::vector<std::string>{"u1", "w1,1", "w1,2", "u2", "u3"});
    CHECK(l[1].vertex == 0);
    CHECK(l[2].vertex == 2);
  }
  SUBCASE("matches the simulator and partitions the vertices") {
    CounterRng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      TreeSpec t;
      const int v = 2 + static_cast<int>(rng.below(9));
      for (int i = 0; i < v; ++i) t.vertices.push_back("x" + std::to_string(i));
      for (int i = 1; i < v; ++i) t.edges.emplace_back(static_cast<int>(rng.below(i)), i);
      const auto c = two_color(t);
      const auto l = greedy_label(t, c);
      const auto sim = simulate_labels(t, c);
      REQUIRE(l.size() == sim.size());
      std::vector<int> seen;
      for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(l[i].vertex == sim[i].first);
        CHECK(l[i].in_u == sim[i].second);
        seen.push_back(l[i].vertex);
      }
      std::sort(seen.begin(), seen.end());
      for (int i = 0; i < v; ++i) CHECK(seen[i] == i);
    }
  }
  SUBCASE("improper coloring") {
    const auto t = TreeSpec::path(3);
    CHECK_THROWS_AS(greedy_label(t, Coloring{{0, 1}, {2}}), std::invalid_argument);
  }
}

TEST_CASE("tree_measure examples") {
  const PointCloud two(2, 4, {15, 0, 0, 15}, 2.0, std::vector<double>{0.5, 0.5});
  const auto pq = two.center(0)[0] * two.center(1)[0] + two.center(0)[1] * two.center(1)[1];
  SUBCASE("two atoms") {
    TreeMeasureOptions o;
    o.mode = TreeMode::exact;
    const auto r = tree_measure(two, TreeSpec::single_edge(), {pq}, 0.2, o);
    CHECK(r.exact);
    CHECK(r.estimate == doctest::Approx(0.5));
    CHECK(tree_measure_brute_force(two, TreeSpec::single_edge(), {pq}, 0.2) == doctest::Approx(0.5));
  }
  SUBCASE("alpha out of range") {
    CHECK(tree_measure(two, TreeSpec::single_edge(), {10.0}, 0.2).estimate == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(tree_measure(two, TreeSpec::single_edge(), {pq}, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(tree_measure(two, TreeSpec::path(3), {pq}, 0.2), std::invalid_argument);
  }
}

TEST_CASE("exact dynamic program matches brute force") {
  const auto a = random_cloud(2, 5, 40, 3);
  for (const auto& t : {TreeSpec::single_edge(), TreeSpec::path(3), TreeSpec::star(3)}) {
    const std::vector<double> alpha(t.edge_count(), 0.3);
    TreeMeasureOptions o;
    o.mode = TreeMode::exact;
    CHECK(tree_measure(a, t, alpha, 0.15, o).estimate == doctest::Approx(tree_measure_brute_force(a, t, alpha, 0.15)));
  }
}

TEST_CASE("Monte Carlo agrees with enumeration within 3 sigma") {
  const auto a = random_cloud(2, 5, 200, 9);
  const auto t = TreeSpec::path(3);
  const std::vector<double> alpha{0.3, 0.35};
  TreeMeasureOptions o;
  o.mode = TreeMode::exact;
  const double exact = tree_measure(a, t, alpha, 0.12, o).estimate;
  o.mode = TreeMode::monte_carlo;
  o.samples = 100000;
  o.seed = 4;
  const auto mc = tree_measure(a, t, alpha, 0.12, o);
  CHECK(mc.std_error > 0.0);
  CHECK(std::fabs(mc.estimate - exact) <= 3 * mc.std_error + 1e-12);
  o.seed = 4;
  CHECK(tree_measure(a, t, alpha, 0.12, o).estimate == mc.estimate);
}

TEST_CASE("path end-swap symmetry") {
  const auto a = random_cloud(2, 5, 120, 21);
  TreeSpec swapped;
  swapped.vertices = {"v1", "v2", "v3"};
  swapped.edges = {{2, 1}, {1, 0}};
  TreeMeasureOptions o;
  o.mode = TreeMode::exact;
  const auto t = TreeSpec::path(3);
  const double fwd = tree_measure(a, t, {0.2, 0.45}, 0.1, o).estimate;
  CHECK(tree_measure(a, swapped, {0.2, 0.45}, 0.1, o).estimate == doctest::Approx(fwd));
  CHECK(tree_measure(a, t, {0.45, 0.2}, 0.1, o).estimate == doctest::Approx(fwd));
}

TEST_CASE("slab witnesses meet the eps^(s|W|) bound") {
  for (const auto& t : {TreeSpec::single_edge(), TreeSpec::path(3), TreeSpec::star(3)}) {
    const auto w = build_slab_tree_witness(t, 2, 0.63, 0.1, 8);
    TreeMeasureOptions o;
    o.mode = TreeMode::exact;
    o.s = 0.63;
    const auto r = tree_measure(w.cloud, t, w.alpha, 0.1, o);
    CHECK(r.w_size == static_cast<int>(two_color(t).w.size()));
    CHECK(r.lower_bound == doctest::Approx(std::pow(0.1, 0.63 * r.w_size)));
    CHECK(r.meets_bound());
    CHECK(r.estimate >= w.guaranteed - 1e-12);
    CHECK(w.offsets.size() == static_cast<std::size_t>(t.vertex_count()));
  }
  SUBCASE("single edge is a two-slab cloud") {
    const auto w = build_slab_tree_witness(TreeSpec::single_edge(), 2, 0.63, 0.1, 8);
    std::vector<std::int64_t> firsts;
    for (std::size_t i = 0; i < w.cloud.size(); ++i) firsts.push_back(w.cloud.cell(i)[0]);
    std::sort(firsts.begin(), firsts.end());
    firsts.erase(std::unique(firsts.begin(), firsts.end()), firsts.end());
    CHECK(firsts.size() == 2);
  }
  SUBCASE("star center is the only W vertex") {
    const auto w = build_slab_tree_witness(TreeSpec::star(3), 2, 0.63, 0.1, 8);
    CHECK(w.labels[1].vertex == 0);
    CHECK(!w.labels[1].in_u);
  }
}

TEST_CASE("pinned single edge reproduces the dot-product set") {
  const auto a = dense_square(7);
  CounterRng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto i = static_cast<std::size_t>(rng.below(a.size()));
    auto t = TreeSpec::single_edge();
    t.pin = TreePin{0, a.center(i)};
    const auto p = pinned_tree_measure(a, t, {0.5}, 0.1);
    const ExactPoint zero(2, Rational(0));
    CHECK(p.alpha_cells == dot_product_set(a, exact_center(a, i), zero).cells());
  }
}

TEST_CASE("pin at the cell nearest the origin gives alpha-set {0}") {
  const auto a = dense_square(6);
  auto t = TreeSpec::single_edge();
  t.pin = TreePin{0, a.center(0)};
  const auto p = pinned_tree_measure(a, t, {0.0}, 0.1);
  CHECK(p.alpha_cells == std::vector<std::int64_t>{0});
  t.pin = TreePin{0, {0.3, 0.3}};
  CHECK_THROWS_AS(pinned_tree_measure(a, t, {0.0}, 0.1), std::invalid_argument);
}

TEST_CASE("2-path pinned at its middle fills a box") {
  const auto a = dense_square(8);
  auto t = TreeSpec::path(3);
  t.pin = TreePin{1, a.center(30000)};
  const auto p = pinned_tree_measure(a, t, {0.5, 0.5}, 0.1);
  REQUIRE(p.alpha_proxy);
  CHECK(p.alpha_proxy->verdict == Verdict::positive);
}
