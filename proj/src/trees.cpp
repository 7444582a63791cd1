#include "pindot/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "pindot/parallel.hpp"
#include "pindot/rng.hpp"

namespace pindot {

using i128 = __int128;

void TreeSpec::validate() const {
  const int v = vertex_count();
  if (v < 2) throw std::invalid_argument("tree needs at least two vertices");
  if (edge_count() != v - 1) throw std::invalid_argument("tree needs exactly |V| - 1 edges");
  std::vector<int> parent(v);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= v || b >= v) throw std::invalid_argument("tree edge references an unknown vertex");
    if (a == b) throw std::invalid_argument("tree edge is a loop");
    const int ra = find(a), rb = find(b);
    if (ra == rb) throw std::invalid_argument("tree has a cycle");
    parent[ra] = rb;
  }
  if (pin) {
    if (pin->vertex < 0 || pin->vertex >= v) throw std::invalid_argument("pin vertex out of range");
  }
}

TreeSpec TreeSpec::path(int vertices) {
  TreeSpec t;
  for (int i = 0; i < vertices; ++i) t.vertices.push_back("v" + std::to_string(i + 1));
  for (int i = 0; i + 1 < vertices; ++i) t.edges.emplace_back(i, i + 1);
  return t;
}

TreeSpec TreeSpec::star(int leaves) {
  TreeSpec t;
  t.vertices.push_back("c");
  for (int i = 0; i < leaves; ++i) {
    t.vertices.push_back("l" + std::to_string(i + 1));
    t.edges.emplace_back(0, i + 1);
  }
  return t;
}

namespace {

std::vector<std::vector<int>> adjacency(const TreeSpec& t) {
  std::vector<std::vector<int>> adj(t.vertex_count());
  for (const auto& [a, b] : t.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  return adj;
}

}  // namespace

Coloring two_color(const TreeSpec& t) {
  t.validate();
  const auto adj = adjacency(t);
  std::vector<int> side(t.vertex_count(), -1);
  std::queue<int> q;
  side[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v]) {
      if (side[w] < 0) {
        side[w] = 1 - side[v];
        q.push(w);
      }
    }
  }
  std::vector<int> cls[2];
  for (int v = 0; v < t.vertex_count(); ++v) cls[side[v]].push_back(v);
  Coloring c;
  if (cls[1].size() > cls[0].size()) {
    c.u = cls[1];
    c.w = cls[0];
  } else {
    c.u = cls[0];
    c.w = cls[1];
  }
  return c;
}

std::string Label::name() const {
  if (in_u) return "u" + std::to_string(i);
  return "w" + std::to_string(i) + "," + std::to_string(j);
}

std::vector<Label> greedy_label(const TreeSpec& t, const Coloring& c) {
  t.validate();
  const int v = t.vertex_count();
  std::vector<int> side(v, -1);
  for (int x : c.u) {
    if (x < 0 || x >= v || side[x] >= 0) throw std::invalid_argument("coloring is not a partition");
    side[x] = 0;
  }
  for (int x : c.w) {
    if (x < 0 || x >= v || side[x] >= 0) throw std::invalid_argument("coloring is not a partition");
    side[x] = 1;
  }
  if (std::count(side.begin(), side.end(), -1) > 0) throw std::invalid_argument("coloring misses a vertex");
  for (const auto& [a, b] : t.edges) {
    if (side[a] == side[b]) throw std::invalid_argument("coloring is not proper");
  }
  auto u = c.u;
  std::sort(u.begin(), u.end());
  const auto adj = adjacency(t);
  std::vector<bool> done(v, false);
  for (int x : u) done[x] = true;
  std::vector<Label> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.push_back(Label{u[i], true, static_cast<int>(i) + 1, 0});
    int j = 0;
    for (int w : adj[u[i]]) {
      if (done[w]) continue;
      done[w] = true;
      out.push_back(Label{w, false, static_cast<int>(i) + 1, ++j});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Rooted {
  std::vector<int> order;  // BFS order from the root
  std::vector<int> parent;
  std::vector<int> parent_edge;
  std::vector<std::vector<int>> children;
};

Rooted root_tree(const TreeSpec& t, int root) {
  Rooted r;
  const int v = t.vertex_count();
  r.parent.assign(v, -1);
  r.parent_edge.assign(v, -1);
  r.children.resize(v);
  std::vector<std::vector<std::pair<int, int>>> adj(v);
  for (int e = 0; e < t.edge_count(); ++e) {
    adj[t.edges[e].first].emplace_back(t.edges[e].second, e);
    adj[t.edges[e].second].emplace_back(t.edges[e].first, e);
  }
  std::vector<bool> seen(v, false);
  std::queue<int> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    r.order.push_back(x);
    for (const auto& [y, e] : adj[x]) {
      if (seen[y]) continue;
      seen[y] = true;
      r.parent[y] = x;
      r.parent_edge[y] = e;
      r.children[x].push_back(y);
      q.push(y);
    }
  }
  return r;
}

struct Centers {
  int n = 0;
  std::vector<double> c;
  double dot(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += c[i * n + a] * c[j * n + a];
    return s;
  }
};

Centers centers_of(const PointCloud& a) {
  Centers c;
  c.n = a.dim();
  c.c.resize(a.size() * static_cast<std::size_t>(c.n));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int ax = 0; ax < c.n; ++ax) c.c[i * c.n + ax] = a.center(i, ax);
  }
  return c;
}

void check_inputs(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps) {
  t.validate();
  if (a.empty()) throw std::invalid_argument("tree measure needs a nonempty cloud");
  if (static_cast<int>(alpha.size()) != t.edge_count()) throw std::invalid_argument("alpha needs one entry per edge");
  const double resolvable = a.cell_width() * a.bound() * std::sqrt(static_cast<double>(a.dim()));
  if (!(eps > resolvable)) throw std::invalid_argument("eps is not resolvable at the cloud level");
}

bool hit(double dot, double alpha, double eps) { return std::fabs(dot - alpha) < eps; }

// Weighted and counting measure of hitting tuples with `pinned` (if >= 0)
// fixed at cell `pin_cell`.
std::pair<double, double> tree_dp(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps,
                                  int pinned, std::size_t pin_cell) {
  const std::size_t m = a.size();
  const auto w = a.measure();
  const Centers ctr = centers_of(a);
  const Rooted r = root_tree(t, pinned >= 0 ? pinned : 0);
  const int v = t.vertex_count();
  std::vector<std::vector<double>> f(v), g(v);  // weighted, counting
  for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
    const int x = *it;
    f[x].assign(m, 0.0);
    g[x].assign(m, 0.0);
    const bool only_pin = pinned >= 0 && x == pinned;
    parallel_for(only_pin ? 1 : m, [&](std::size_t slot) {
      const std::size_t i = only_pin ? pin_cell : slot;
      double fw = w[i], gc = 1.0;
      for (int ch : r.children[x]) {
        const double al = alpha[r.parent_edge[ch]];
        double sw = 0.0, sc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (f[ch][j] == 0.0 && g[ch][j] == 0.0) continue;
          if (hit(ctr.dot(i, j), al, eps)) {
            sw += f[ch][j];
            sc += g[ch][j];
          }
        }
        fw *= sw;
        gc *= sc;
        if (gc == 0.0) break;
      }
      f[x][i] = fw;
      g[x][i] = gc;
    });
    for (int ch : r.children[x]) {
      std::vector<double>().swap(f[ch]);
      std::vector<double>().swap(g[ch]);
    }
  }
  const int root = r.order.front();
  if (pinned >= 0) {
    // the frozen vertex carries no mass
    return {w[pin_cell] > 0.0 ? f[root][pin_cell] / w[pin_cell] : 0.0, g[root][pin_cell]};
  }
  return {std::accumulate(f[root].begin(), f[root].end(), 0.0), std::accumulate(g[root].begin(), g[root].end(), 0.0)};
}

struct Sampler {
  std::vector<double> cdf;
  explicit Sampler(const std::vector<double>& w) : cdf(w.size()) {
    std::partial_sum(w.begin(), w.end(), cdf.begin());
    const double total = cdf.back();
    for (double& c : cdf) c /= total;
  }
  std::size_t draw(CounterRng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
  }
};

std::int64_t monte_carlo_hits(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps,
                              int pinned, std::size_t pin_cell, std::int64_t samples, std::uint64_t seed) {
  const Sampler sampler(a.measure());
  const Centers ctr = centers_of(a);
  const int v = t.vertex_count();
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::int64_t>(samples, 256));
  std::vector<std::int64_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::int64_t lo = samples * static_cast<std::int64_t>(c) / static_cast<std::int64_t>(chunks);
    const std::int64_t hi = samples * static_cast<std::int64_t>(c + 1) / static_cast<std::int64_t>(chunks);
    std::vector<std::size_t> pick(v);
    for (std::int64_t s = lo; s < hi; ++s) {
      CounterRng rng(seed, static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(v));
      for (int x = 0; x < v; ++x) pick[x] = x == pinned ? pin_cell : sampler.draw(rng);
      bool ok = true;
      for (int e = 0; e < t.edge_count() && ok; ++e) {
        ok = hit(ctr.dot(pick[t.edges[e].first], pick[t.edges[e].second]), alpha[e], eps);
      }
      if (ok) ++hits[c];
    }
  });
  return std::accumulate(hits.begin(), hits.end(), std::int64_t{0});
}

std::int64_t saturate(double x) {
  if (x >= 9.2e18) return INT64_MAX;
  return static_cast<std::int64_t>(std::llround(x));
}

TreeMeasureEstimate measure_impl(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps,
                                 const TreeMeasureOptions& opts, int pinned, std::size_t pin_cell) {
  TreeMeasureEstimate est;
  est.alpha = alpha;
  est.eps = eps;
  est.s = opts.s ? *opts.s : estimate_dimension(a).slope;
  est.w_size = static_cast<int>(two_color(t).w.size());
  est.lower_bound = std::pow(eps, est.s * est.w_size);
  const int free_vertices = t.vertex_count() - (pinned >= 0 ? 1 : 0);
  const double tuples = std::pow(static_cast<double>(a.size()), free_vertices);
  bool exact = opts.mode == TreeMode::exact || (opts.mode == TreeMode::automatic && tuples <= kExactTupleLimit);
  if (exact) {
    const auto [measure, count] = tree_dp(a, t, alpha, eps, pinned, pin_cell);
    est.exact = true;
    est.samples = saturate(tuples);
    est.hits = saturate(count);
    est.estimate = std::clamp(measure, 0.0, 1.0);
    return est;
  }
  if (opts.samples < 1) throw std::invalid_argument("tree measure needs a positive sample count");
  est.samples = opts.samples;
  est.hits = monte_carlo_hits(a, t, alpha, eps, pinned, pin_cell, opts.samples, opts.seed);
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(est.samples);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(est.samples));
  return est;
}

}  // namespace

TreeMeasureEstimate tree_measure(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps,
                                 const TreeMeasureOptions& opts) {
  check_inputs(a, t, alpha, eps);
  return measure_impl(a, t, alpha, eps, opts, -1, 0);
}

double tree_measure_brute_force(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps) {
  check_inputs(a, t, alpha, eps);
  const int v = t.vertex_count();
  if (std::pow(static_cast<double>(a.size()), v) > 1e8) throw std::invalid_argument("cloud too large to enumerate");
  const auto w = a.measure();
  const Centers ctr = centers_of(a);
  std::vector<std::size_t> pick(v, 0);
  double total = 0.0;
  while (true) {
    bool ok = true;
    for (int e = 0; e < t.edge_count() && ok; ++e) {
      ok = hit(ctr.dot(pick[t.edges[e].first], pick[t.edges[e].second]), alpha[e], eps);
    }
    if (ok) {
      double p = 1.0;
      for (int x = 0; x < v; ++x) p *= w[pick[x]];
      total += p;
    }
    int x = 0;
    while (x < v && ++pick[x] == a.size()) pick[x++] = 0;
    if (x == v) break;
  }
  return total;
}

namespace {

// Set of achieved tuples over `edges`, flattened with edges.size() entries each.
struct TupleSet {
  std::vector<int> edges;
  std::vector<std::int64_t> flat;
  std::size_t size() const { return edges.empty() ? (flat.empty() ? 0 : 1) : flat.size() / edges.size(); }
};

void dedupe(TupleSet& s) {
  const std::size_t w = s.edges.size();
  if (w == 0) return;
  std::vector<std::vector<std::int64_t>> rows(s.flat.size() / w);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].assign(s.flat.begin() + i * w, s.flat.begin() + (i + 1) * w);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  s.flat.clear();
  for (const auto& r : rows) s.flat.insert(s.flat.end(), r.begin(), r.end());
}

TupleSet product(const TupleSet& a, const TupleSet& b) {
  TupleSet out;
  out.edges = a.edges;
  out.edges.insert(out.edges.end(), b.edges.begin(), b.edges.end());
  const std::size_t wa = a.edges.size(), wb = b.edges.size();
  const std::size_t na = a.size(), nb = b.size();
  if (static_cast<double>(na) * static_cast<double>(nb) > kAlphaTupleLimit) {
    throw std::invalid_argument("achieved alpha set too large to enumerate");
  }
  out.flat.reserve(na * nb * (wa + wb));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      out.flat.insert(out.flat.end(), a.flat.begin() + i * wa, a.flat.begin() + (i + 1) * wa);
      out.flat.insert(out.flat.end(), b.flat.begin() + j * wb, b.flat.begin() + (j + 1) * wb);
    }
  }
  return out;
}

struct AlphaEnumerator {
  const PointCloud& a;
  const Rooted& r;

  // floor(p . q * 2^level) from exact dyadic centers
  std::int64_t snapped_dot(std::size_t p, std::size_t q) const {
    i128 acc = 0;
    for (int ax = 0; ax < a.dim(); ++ax) acc += i128{2 * a.cell(p)[ax] + 1} * (2 * a.cell(q)[ax] + 1);
    // center product = acc / 4^(m+1); times 2^m gives acc / 2^(m+2)
    return static_cast<std::int64_t>(acc >> (a.level() + 2));
  }

  // tuples over the subtree hanging from `child` whose parent sits at cell p
  TupleSet below(int child, std::size_t p) const {
    TupleSet out;
    out.edges.push_back(r.parent_edge[child]);
    for (int gc : r.children[child]) {
      TupleSet probe;
      probe.edges = sub_edges(gc);
      out.edges.insert(out.edges.end(), probe.edges.begin(), probe.edges.end());
    }
    for (std::size_t q = 0; q < a.size(); ++q) {
      TupleSet acc;
      acc.flat.push_back(snapped_dot(p, q));
      acc.edges.push_back(r.parent_edge[child]);
      for (int gc : r.children[child]) acc = product(acc, below(gc, q));
      out.flat.insert(out.flat.end(), acc.flat.begin(), acc.flat.end());
      if (static_cast<double>(out.flat.size()) > kAlphaTupleLimit * static_cast<double>(out.edges.size())) {
        dedupe(out);
        if (static_cast<double>(out.flat.size()) > kAlphaTupleLimit * static_cast<double>(out.edges.size())) {
          throw std::invalid_argument("achieved alpha set too large to enumerate");
        }
      }
    }
    dedupe(out);
    return out;
  }

  std::vector<int> sub_edges(int child) const {
    std::vector<int> e{r.parent_edge[child]};
    for (int gc : r.children[child]) {
      auto s = sub_edges(gc);
      e.insert(e.end(), s.begin(), s.end());
    }
    return e;
  }
};

}  // namespace

PinnedTreeEstimate pinned_tree_measure(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha,
                                       double eps, const TreeMeasureOptions& opts) {
  check_inputs(a, t, alpha, eps);
  if (!t.pin) throw std::invalid_argument("pinned tree measure needs a pin");
  if (t.pin->point.size() != static_cast<std::size_t>(a.dim())) throw std::invalid_argument("pin point dimension mismatch");
  const auto cell = a.cell_of(t.pin->point);
  const auto idx = a.find(cell);
  if (!idx) throw std::invalid_argument("pin point is not in the cloud");
  for (int ax = 0; ax < a.dim(); ++ax) {
    if (a.center(*idx, ax) != t.pin->point[ax]) throw std::invalid_argument("pin point must be a cell center");
  }
  PinnedTreeEstimate out;
  out.measure = measure_impl(a, t, alpha, eps, opts, t.pin->vertex, *idx);
  out.level = a.level();

  const int k = t.edge_count();
  const Rooted r = root_tree(t, t.pin->vertex);
  // enumeration cost of each hanging subtree: |A| * (1 + sum over its children)
  std::function<double(int)> cost = [&](int v) {
    double c = 1.0;
    for (int ch : r.children[v]) c += cost(ch);
    return static_cast<double>(a.size()) * c;
  };
  double total_cost = 0.0;
  for (int ch : r.children[t.pin->vertex]) total_cost += cost(ch);
  if (total_cost > 2.0 * kAlphaTupleLimit) throw std::invalid_argument("achieved alpha set too large to enumerate");
  const AlphaEnumerator en{a, r};
  TupleSet all;
  all.flat.clear();
  bool first = true;
  for (int ch : r.children[t.pin->vertex]) {
    TupleSet s = en.below(ch, *idx);
    all = first ? s : product(all, s);
    first = false;
  }
  dedupe(all);
  // reorder columns to edge index order
  std::vector<int> col(k);
  for (int i = 0; i < k; ++i) col[all.edges[i]] = i;
  const std::size_t rows = all.size();
  out.alpha_cells.resize(rows * k);
  for (std::size_t i = 0; i < rows; ++i) {
    for (int e = 0; e < k; ++e) out.alpha_cells[i * k + e] = all.flat[i * k + col[e]];
  }
  out.alpha_count = static_cast<std::int64_t>(rows);
  if (k <= kMaxAmbientDim) {
    double mx = 0.0;
    for (std::int64_t c : out.alpha_cells) mx = std::max(mx, std::fabs(std::ldexp(static_cast<double>(c) + 1.0, -a.level())));
    const PointCloud cloud(k, a.level(), out.alpha_cells, mx + 1.0);
    const auto counts = covering_counts(cloud);
    out.alpha_proxy = measure_proxy_from_counts(counts, 2, k);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Factor {
  std::vector<std::int64_t> cells;
  std::vector<double> mass;  // Cantor measure per cell
  std::vector<bool> tube;
  double max_center = 0.0;
  double max_tube_center = 0.0;
};

Factor transverse_factor(const CantorSpec& spec, const Rational& scale, int level, int tube_depth) {
  const auto intervals = cantor_intervals(spec);
  const std::size_t block = std::size_t{1} << (spec.depth - tube_depth);
  const double per_interval = std::ldexp(1.0, -spec.depth);
  const double two = std::ldexp(1.0, level + 1);
  Factor f;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const double lo = (scale * intervals[i].first).to_double();
    const double hi = (scale * intervals[i].second).to_double();
    const auto cmin = static_cast<std::int64_t>(std::ceil((lo * two - 1.0) / 2.0));
    const auto cmax = static_cast<std::int64_t>(std::floor((hi * two - 1.0) / 2.0));
    if (cmax < cmin) throw std::invalid_argument("slab witness: level too coarse for the Cantor depth");
    const double share = per_interval / static_cast<double>(cmax - cmin + 1);
    for (std::int64_t c = cmin; c <= cmax; ++c) {
      const double center = (2.0 * static_cast<double>(c) + 1.0) / two;
      f.cells.push_back(c);
      f.mass.push_back(share);
      f.tube.push_back(i < block);
      f.max_center = std::max(f.max_center, center);
      if (i < block) f.max_tube_center = std::max(f.max_tube_center, center);
    }
  }
  return f;
}

}  // namespace

SlabWitness build_slab_tree_witness(const TreeSpec& t, int n, double s, double eps, int level) {
  t.validate();
  if (n < 2 || n > kMaxAmbientDim) throw std::invalid_argument("slab: n must be in [2, 4]");
  if (!(s > 0.0)) throw std::invalid_argument("slab witness: s must be positive");
  if (s > n - 1 + 1e-12) throw std::invalid_argument("slab: s > n-1 (construction only yields dimension <= n-1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("slab witness: eps must lie in (0, 1)");
  if (level < 1 || level > 20) throw std::invalid_argument("slab witness: level must be in [1, 20]");
  const int slices = t.vertex_count();
  if ((std::int64_t{1} << level) < 2 * slices) throw std::invalid_argument("slab witness: level too coarse for the slices");

  SlabWitness out;
  out.labels = greedy_label(t, two_color(t));
  const double per_axis = s / (n - 1);
  CantorSpec spec;
  spec.branches = 2;
  spec.ratio = Rational::from_double(std::pow(2.0, -1.0 / per_axis), 64);
  const double r = spec.ratio.to_double();
  out.s = (n - 1) * spec.dimension();

  // the tube of Euclidean radius n^-n eps is the first depth-j block on every axis
  out.tube_radius = std::pow(static_cast<double>(n), -n) * eps;
  const double rho = out.tube_radius / std::sqrt(static_cast<double>(n - 1));
  out.tube_depth = static_cast<int>(std::floor(std::log(1.0 / eps) / std::log(1.0 / r) + 1e-12));
  const Rational scale = Rational::from_double(rho / std::pow(r, out.tube_depth), 1 << 16);
  const double cell = std::ldexp(1.0, -level);
  int depth = out.tube_depth;
  while (depth < 12 && scale.to_double() * std::pow(r, depth + 1) >= 2.0 * cell) ++depth;
  if (scale.to_double() * std::pow(r, depth) < cell) throw std::invalid_argument("slab witness: level too coarse for eps");
  spec.depth = depth;
  out.depth = depth;
  const Factor f = transverse_factor(spec, scale, level, out.tube_depth);

  // every transverse cell combination, with its mass and tube flag
  std::vector<std::vector<std::int64_t>> trans{{}};
  std::vector<double> tmass{1.0};
  std::vector<bool> ttube{true};
  for (int ax = 1; ax < n; ++ax) {
    std::vector<std::vector<std::int64_t>> nt;
    std::vector<double> nm;
    std::vector<bool> nb;
    for (std::size_t i = 0; i < trans.size(); ++i) {
      for (std::size_t c = 0; c < f.cells.size(); ++c) {
        auto row = trans[i];
        row.push_back(f.cells[c]);
        nt.push_back(std::move(row));
        nm.push_back(tmass[i] * f.mass[c]);
        nb.push_back(ttube[i] && f.tube[c]);
      }
    }
    trans = std::move(nt);
    tmass = std::move(nm);
    ttube = std::move(nb);
  }

  std::vector<std::int64_t> cells;
  std::vector<double> weights;
  const std::int64_t top = (std::int64_t{1} << level) - 1;
  std::vector<double> slice_offset(slices);
  for (int i = 0; i < slices; ++i) {
    const std::int64_t c1 = top - i;
    slice_offset[i] = (2.0 * static_cast<double>(c1) + 1.0) * 0.5 * cell;
    for (std::size_t q = 0; q < trans.size(); ++q) {
      cells.push_back(c1);
      cells.insert(cells.end(), trans[q].begin(), trans[q].end());
      weights.push_back(tmass[q] / slices);
    }
  }
  out.cloud = PointCloud(n, level, std::move(cells), kDefaultBound, std::move(weights));
  out.tube_mass = 0.0;
  for (std::size_t q = 0; q < trans.size(); ++q) {
    if (ttube[q]) out.tube_mass += tmass[q];
  }

  std::vector<double> vertex_offset(slices);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    vertex_offset[out.labels[i].vertex] = slice_offset[i];
    out.offsets.push_back(slice_offset[i]);
  }
  for (const auto& [a, b] : t.edges) out.alpha.push_back(vertex_offset[a] * vertex_offset[b]);
  const double cmax = slice_offset.front(), cmin = slice_offset.back();
  const double full = std::sqrt(static_cast<double>(n - 1)) * f.max_center;
  const double thin = std::sqrt(static_cast<double>(n - 1)) * f.max_tube_center;
  out.max_error = cmax * cmax - cmin * cmin + full * thin;
  if (!(out.max_error < eps)) throw std::invalid_argument("slab witness: level too coarse to keep edge errors below eps");
  const auto w_size = static_cast<int>(two_color(t).w.size());
  out.guaranteed = std::pow(out.tube_mass, w_size);
  return out;
}

}  // namespace pindot
