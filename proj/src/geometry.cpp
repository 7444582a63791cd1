#include "pindot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pindot {

namespace {

constexpr double kPi = std::numbers::pi;

void check_ambient(const PointCloud& a, std::size_t n, const char* what) {
  if (a.dim() != static_cast<int>(n)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Sorted unique cells from an unsorted list; uses a bitmap when the range is small.
std::vector<std::int64_t> sort_unique(std::vector<std::int64_t> v) {
  if (v.empty()) return v;
  auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const std::int64_t lo = *lo_it, hi = *hi_it;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span <= (std::uint64_t{1} << 24) && span <= 8 * v.size() + 1024) {
    std::vector<char> seen(span, 0);
    for (std::int64_t c : v) seen[static_cast<std::size_t>(c - lo)] = 1;
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < span; ++i) {
      if (seen[i]) out.push_back(lo + static_cast<std::int64_t>(i));
    }
    return out;
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

i128 lcm128(i128 a, i128 b) {
  i128 x = a, y = b;
  while (y != 0) {
    i128 t = x % y;
    x = y;
    y = t;
  }
  return a / x * b;
}

i128 floor_div128(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Common-denominator form of w = a - x: integers W_i with w_i = W_i / L.
struct IntegerForm {
  std::vector<i128> w;
  i128 den = 1;
};

IntegerForm integer_form(const ExactPoint& a, const ExactPoint& x) {
  IntegerForm f;
  std::vector<Rational> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    w[i] = a[i] - x[i];
    f.den = lcm128(f.den, w[i].den());
  }
  if (f.den > (i128{1} << 40)) throw std::overflow_error("pin denominators too large for the exact path");
  for (const auto& wi : w) f.w.push_back(i128{wi.num()} * (f.den / wi.den()));
  return f;
}

double det3(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) + c[0] * (a[1] * b[2] - a[2] * b[1]);
}

}  // namespace

ExactPoint to_exact(std::span<const double> p) {
  ExactPoint out;
  for (double v : p) out.push_back(Rational::from_double(v));
  return out;
}

std::vector<double> to_double(const ExactPoint& p) {
  std::vector<double> out;
  for (const auto& r : p) out.push_back(r.to_double());
  return out;
}

// ---------------------------------------------------------------------------

int scale_shift_of(double c) {
  if (!(c > 0.0)) return 0;
  return static_cast<int>(std::lround(std::log2(c)));
}

ScalarSet::ScalarSet(int level, std::vector<std::int64_t> cells, double bound, int scale_shift, int sample_level)
    : level_(level), shift_(scale_shift), sample_level_(sample_level < 0 ? level : sample_level), bound_(bound), cells_(sort_unique(std::move(cells))) {
  if (level < 0 || level > 40) throw std::invalid_argument("scalar set level must be in [0, 40]");
  const double limit = std::ldexp(bound, level) + 1.0;
  for (std::int64_t c : cells_) {
    if (std::fabs(static_cast<double>(c)) > limit) throw std::invalid_argument("scalar cell outside bound");
  }
}

int ScalarSet::resolution() const { return std::max(0, std::min(level_, sample_level_ - shift_)); }

double ScalarSet::center(std::size_t i) const { return std::ldexp(2.0 * static_cast<double>(cells_[i]) + 1.0, -(level_ + 1)); }

bool ScalarSet::contains(std::int64_t cell) const { return std::binary_search(cells_.begin(), cells_.end(), cell); }

ScalarSet ScalarSet::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<std::int64_t> out;
  out.reserve(cells_.size());
  for (std::int64_t cell : cells_) {
    out.push_back(static_cast<std::int64_t>(std::floor(c * (static_cast<double>(cell) + 0.5))));
  }
  return ScalarSet(level_, std::move(out), bound_ * c, shift_ + scale_shift_of(c), sample_level_);
}

ScalarSet ScalarSet::unite(const ScalarSet& other) const {
  if (other.level_ != level_) throw std::invalid_argument("union of scalar sets at different levels");
  std::vector<std::int64_t> all = cells_;
  all.insert(all.end(), other.cells_.begin(), other.cells_.end());
    // keep the coarser resolution of the two
  const int shift = std::max(shift_, other.shift_);
  const int sample = std::min(sample_level_, other.sample_level_);
  return ScalarSet(level_, std::move(all), std::max(bound_, other.bound_), shift, sample);
}

// ---------------------------------------------------------------------------

SphereGrid::SphereGrid(int dim, int level) : dim_(dim), level_(level) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("sphere grid supports n = 2 or 3");
  if (level < 0 || level > (dim == 2 ? 28 : 14)) throw std::invalid_argument("sphere grid level out of range");
}

std::int64_t SphereGrid::cap_count() const {
  if (dim_ == 2) return std::int64_t{1} << (level_ + 2);
  return 6 * (std::int64_t{1} << (2 * level_));
}

std::int64_t SphereGrid::cap_index(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("direction dimension mismatch");
  if (dim_ == 2) {
    const std::int64_t bins = cap_count();
    double ang = std::atan2(v[1], v[0]);
    if (ang < 0.0) ang += 2.0 * kPi;
    auto b = static_cast<std::int64_t>(std::floor(ang / (2.0 * kPi) * static_cast<double>(bins)));
    return std::clamp<std::int64_t>(b, 0, bins - 1);
  }
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::fabs(v[i]) > std::fabs(v[axis])) axis = i;
  }
  const double major = std::fabs(v[axis]);
  if (major == 0.0) throw std::invalid_argument("zero direction");
  const int face = 2 * axis + (v[axis] < 0.0 ? 1 : 0);
  const int b = axis == 0 ? 1 : 0;
  const int c = axis == 2 ? 1 : 2;
  const std::int64_t side = std::int64_t{1} << level_;
  auto bin = [&](double t) {
    double u = (4.0 / kPi) * std::atan(t / major);
    auto i = static_cast<std::int64_t>(std::floor((u + 1.0) * 0.5 * static_cast<double>(side)));
    return std::clamp<std::int64_t>(i, 0, side - 1);
  };
  return (face * side + bin(v[b])) * side + bin(v[c]);
}

std::vector<double> SphereGrid::cap_center(std::int64_t cap) const {
  if (cap < 0 || cap >= cap_count()) throw std::out_of_range("cap index out of range");
  if (dim_ == 2) {
    const std::int64_t quarter = cap_count() / 4;
    const std::int64_t q = cap / quarter;
    const std::int64_t j = cap % quarter;
    double c = 0.0, s = 0.0;
    if (quarter == 1) {
      c = s = std::cos(kPi / 4.0);
    } else if (2 * j < quarter) {
      double phi = (static_cast<double>(j) + 0.5) * (kPi / 2.0) / static_cast<double>(quarter);
      c = std::cos(phi);
      s = std::sin(phi);
    } else {
      // mirror of the first half about pi/4 keeps the grid exactly swap-symmetric
      std::int64_t jm = quarter - 1 - j;
      double phi = (static_cast<double>(jm) + 0.5) * (kPi / 2.0) / static_cast<double>(quarter);
      c = std::sin(phi);
      s = std::cos(phi);
    }
    switch (q) {
      case 0: return {c, s};
      case 1: return {-s, c};
      case 2: return {-c, -s};
      default: return {s, -c};
    }
  }
  const std::int64_t side = std::int64_t{1} << level_;
  const std::int64_t face = cap / (side * side);
  const std::int64_t i = (cap / side) % side;
  const std::int64_t k = cap % side;
  const int axis = static_cast<int>(face / 2);
  const double sign = (face % 2) ? -1.0 : 1.0;
  const int b = axis == 0 ? 1 : 0;
  const int c = axis == 2 ? 1 : 2;
  auto coord = [&](std::int64_t idx) {
    double u = std::ldexp(static_cast<double>(2 * idx + 1), -level_) - 1.0;
    return std::tan(u * kPi / 4.0);
  };
  std::vector<double> v(3);
  v[axis] = sign;
  v[b] = coord(i);
  v[c] = coord(k);
  const double norm = std::sqrt(1.0 + v[b] * v[b] + v[c] * v[c]);
  for (double& x : v) x /= norm;
  return v;
}

std::int64_t SphereGrid::antipode(std::int64_t cap) const {
  if (dim_ == 2) return (cap + cap_count() / 2) % cap_count();
  const std::int64_t side = std::int64_t{1} << level_;
  const std::int64_t face = cap / (side * side);
  const std::int64_t i = (cap / side) % side;
  const std::int64_t k = cap % side;
  const std::int64_t opp = face ^ 1;
  return (opp * side + (side - 1 - i)) * side + (side - 1 - k);
}

std::int64_t SphereGrid::line_index(std::int64_t cap) const {
  if (dim_ == 2) return cap % (cap_count() / 2);
  const std::int64_t side2 = std::int64_t{1} << (2 * level_);
  std::int64_t rep = ((cap / side2) % 2) ? antipode(cap) : cap;
  const std::int64_t face = rep / side2;
  return (face / 2) * side2 + rep % side2;
}

std::int64_t SphereGrid::line_cap(std::int64_t line) const {
  if (dim_ == 2) return line;
  const std::int64_t side2 = std::int64_t{1} << (2 * level_);
  return (2 * (line / side2)) * side2 + line % side2;
}

std::int64_t SphereGrid::coarsen(std::int64_t cap, int to_level) const {
  if (to_level > level_ || to_level < 0) throw std::invalid_argument("coarsen target must be in [0, level]");
  const int d = level_ - to_level;
  if (dim_ == 2) return cap >> d;
  const std::int64_t side = std::int64_t{1} << level_;
  const std::int64_t face = cap / (side * side);
  const std::int64_t i = ((cap / side) % side) >> d;
  const std::int64_t k = (cap % side) >> d;
  const std::int64_t to_side = std::int64_t{1} << to_level;
  return (face * to_side + i) * to_side + k;
}

double SphereGrid::min_cap_width() const {
  if (dim_ == 2) return 2.0 * kPi / static_cast<double>(cap_count());
  // Equiangular bins subtend (pi/2) 2^-level along the face axes; towards face
  // corners the arc shrinks by at most a factor 1/sqrt(2).
  return (kPi / 2.0) * std::ldexp(1.0, -level_) / std::sqrt(2.0);
}

Direction Direction::from_vector(std::span<const double> v, int level) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("direction from zero vector");
  Direction d;
  d.level = level;
  for (double x : v) d.vector.push_back(x / norm);
  d.cap_index = (v.size() == 2 || v.size() == 3) ? SphereGrid(static_cast<int>(v.size()), level).cap_index(d.vector) : -1;
  return d;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> projection_cells(const PointCloud& a, std::span<const double> theta) {
  check_ambient(a, theta.size(), "orthogonal_project");
  const int n = a.dim();
  const auto& cells = a.flat_cells();
  std::vector<std::int64_t> out(a.size());
  // center * 2^m = c + 1/2, so the snapped coordinate is floor(sum (c_i + 1/2) theta_i).
  // Terms are summed in an order independent of the axis order, which keeps axis
  // permutations of the cloud bit-exact.
  for (std::size_t p = 0; p < a.size(); ++p) {
    const std::int64_t* c = cells.data() + p * n;
    double t[kMaxAmbientDim];
    for (int i = 0; i < n; ++i) t[i] = (static_cast<double>(c[i]) + 0.5) * theta[i];
    std::sort(t, t + n);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += t[i];
    out[p] = static_cast<std::int64_t>(std::floor(v));
  }
  return out;
}

ScalarSet orthogonal_project(const PointCloud& a, std::span<const double> theta) {
  return ScalarSet(a.level(), projection_cells(a, theta), a.bound() * std::sqrt(static_cast<double>(a.dim())));
}

std::vector<double> radial_vectors(const PointCloud& a, std::span<const double> x) {
  check_ambient(a, x.size(), "radial_project");
  const int n = a.dim();
  const auto own = a.cell_of(x);
  std::vector<double> out(a.size() * n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t p = 0; p < a.size(); ++p) {
    auto c = a.cell(p);
    if (std::equal(c.begin(), c.end(), own.begin())) continue;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = a.center(p, i) - x[i];
      out[p * n + i] = d;
      norm += d * d;
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) out[p * n + i] /= norm;
  }
  return out;
}

std::vector<std::int64_t> radial_project(const PointCloud& a, std::span<const double> x, int angular_level) {
  SphereGrid grid(a.dim(), angular_level);
  const auto vecs = radial_vectors(a, x);
  const int n = a.dim();
  std::vector<std::int64_t> caps;
  caps.reserve(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    std::span<const double> v(vecs.data() + p * n, static_cast<std::size_t>(n));
    if (std::isnan(v[0])) continue;
    caps.push_back(grid.cap_index(v));
  }
  return sort_unique(std::move(caps));
}

// ---------------------------------------------------------------------------

namespace {

// Numerators N_p with (a - x) . y_p = N_p / (2 L 2^m).
std::vector<i128> dot_numerators(const PointCloud& cloud, const IntegerForm& f) {
  const int n = cloud.dim();
  const auto& cells = cloud.flat_cells();
  std::vector<i128> out(cloud.size());
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    i128 acc = 0;
    for (int i = 0; i < n; ++i) acc += f.w[i] * (2 * i128{cells[p * n + i]} + 1);
    out[p] = acc;
  }
  return out;
}

}  // namespace

std::vector<Rational> dot_product_values(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x) {
  if (a.size() != static_cast<std::size_t>(cloud.dim()) || x.size() != a.size()) {
    throw std::invalid_argument("dot_product_set: dimension mismatch");
  }
  const IntegerForm f = integer_form(a, x);
  auto nums = dot_numerators(cloud, f);
  std::sort(nums.begin(), nums.end());
  nums.erase(std::unique(nums.begin(), nums.end()), nums.end());
  const i128 den = f.den * (i128{1} << (cloud.level() + 1));
  std::vector<Rational> out;
  out.reserve(nums.size());
  for (i128 v : nums) out.push_back(Rational::from_i128(v, den));
  return out;
}

namespace {

double pin_length(const ExactPoint& a, const ExactPoint& x) {
  double wnorm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = (a[i] - x[i]).to_double();
    wnorm += d * d;
  }
  return std::sqrt(wnorm);
}

}  // namespace

ScalarSet dot_product_set(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x, int level) {
  if (a.size() != static_cast<std::size_t>(cloud.dim()) || x.size() != a.size()) {
    throw std::invalid_argument("dot_product_set: dimension mismatch");
  }
  if (level < 0) level = cloud.level();
  if (level > 40) throw std::invalid_argument("dot_product_set: level must be at most 40");
  const IntegerForm f = integer_form(a, x);
  const auto nums = dot_numerators(cloud, f);
  std::vector<std::int64_t> cells(nums.size());
  // value * 2^m = N / (2L)
  const int e = level - cloud.level();
  const i128 den = e >= 0 ? 2 * f.den : (2 * f.den) << (-e);
  for (std::size_t p = 0; p < nums.size(); ++p) {
    const i128 num = e >= 0 ? nums[p] << e : nums[p];
    cells[p] = static_cast<std::int64_t>(floor_div128(num, den));
  }
  const double len = pin_length(a, x);
  const double bound = std::max(1.0, len) * cloud.bound() * std::sqrt(static_cast<double>(cloud.dim()));
  return ScalarSet(level, std::move(cells), bound, scale_shift_of(len), cloud.level());
}

int matched_dot_level(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x) {
  if (x.size() != a.size()) throw std::invalid_argument("matched_dot_level: dimension mismatch");
  return std::min(40, cloud.level() + std::max(0, -scale_shift_of(pin_length(a, x))));
}

std::vector<Surd> exact_direction(const ExactPoint& a, const ExactPoint& x) {
  if (a.size() != x.size()) throw std::invalid_argument("exact_direction: dimension mismatch");
  std::vector<Rational> w(a.size());
  Rational q(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    w[i] = a[i] - x[i];
    q += w[i] * w[i];
  }
  if (q.is_zero()) throw std::invalid_argument("direction undefined for a == x");
  const Surd root = Surd::sqrt_of(q);
  std::vector<Surd> theta;
  for (const auto& wi : w) theta.push_back(root * (wi / q));
  return theta;
}

std::vector<Surd> orthogonal_project_exact(const PointCloud& cloud, std::span<const Surd> theta) {
  if (theta.size() != static_cast<std::size_t>(cloud.dim())) throw std::invalid_argument("orthogonal_project_exact: dimension mismatch");
  std::vector<Surd> out;
  out.reserve(cloud.size());
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    Surd acc(Rational(0), 1);
    for (std::size_t i = 0; i < theta.size(); ++i) acc = acc + theta[i] * cloud.center_exact(p, static_cast<int>(i));
    out.push_back(acc);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

KeyLemmaReport key_lemma_check(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x) {
  if (a == x) throw std::invalid_argument("key lemma requires a != x");
  KeyLemmaReport rep;
  const int n = cloud.dim();
  Rational q(0);
  for (int i = 0; i < n; ++i) q += (a[i] - x[i]) * (a[i] - x[i]);
  const Surd scale = Surd::sqrt_of(q);
  rep.scale_factor = scale.to_double();

  // exact route: Pi from integer dot products, S from the exact unit direction
  const auto pi = dot_product_values(cloud, a, x);
  const auto theta = exact_direction(a, x);
  const auto s = orthogonal_project_exact(cloud, theta);
  rep.dot_count = pi.size();
  rep.projection_count = s.size();
  rep.exact_match = pi.size() == s.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(pi.size(), s.size()); ++i) {
    Surd scaled = scale * s[i];
    if (!scaled.is_rational()) {
      rep.exact_match = false;
      worst = std::max(worst, std::fabs(pi[i].to_double() - scaled.to_double()));
      continue;
    }
    if (scaled.coeff() != pi[i]) {
      rep.exact_match = false;
      worst = std::max(worst, std::fabs((scaled.coeff() - pi[i]).to_double()));
    }
  }
  if (pi.size() != s.size()) worst = std::numeric_limits<double>::infinity();
  rep.exact_discrepancy = worst;

  // snapped route, matched per source point (order preserving since |a - x| > 0)
  std::vector<double> theta_d(n);
  for (int i = 0; i < n; ++i) theta_d[i] = theta[i].to_double();
  const auto proj = projection_cells(cloud, theta_d);
  const IntegerForm f = integer_form(a, x);
  const auto nums = dot_numerators(cloud, f);
  const double width = cloud.cell_width();
  double snapped = 0.0;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    auto dcell = static_cast<double>(floor_div128(nums[p], 2 * f.den));
    double lhs = (dcell + 0.5) * width;
    double rhs = rep.scale_factor * (static_cast<double>(proj[p]) + 0.5) * width;
    snapped = std::max(snapped, std::fabs(lhs - rhs));
  }
  rep.snapped_discrepancy = snapped;
  rep.snapped_tolerance = width * std::max(static_cast<double>(n), 0.5 * (1.0 + rep.scale_factor));
  rep.pass = rep.exact_match && rep.snapped_discrepancy <= rep.snapped_tolerance;
  return rep;
}

std::vector<Hyperplane> hyperplane_family(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x,
                                          int angular_level) {
  if (a == x) throw std::invalid_argument("hyperplane family requires a != x");
  const auto alphas = dot_product_values(cloud, a, x);
  std::vector<double> w(a.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    w[i] = (a[i] - x[i]).to_double();
    norm += w[i] * w[i];
  }
  norm = std::sqrt(norm);
  const Direction normal = Direction::from_vector(w, angular_level);
  std::vector<Hyperplane> out;
  out.reserve(alphas.size());
  for (const auto& alpha : alphas) out.push_back(Hyperplane{normal, alpha.to_double() / norm, alpha});
  return out;
}

// ---------------------------------------------------------------------------

SphereCurve make_curve(int dim, int samples_n, std::function<std::vector<double>(double)> eval) {
  if (samples_n < 1) throw std::invalid_argument("curve needs at least one interval");
  SphereCurve c;
  c.dim = dim;
  c.eval = std::move(eval);
  c.step = 1.0 / (4.0 * samples_n);
  for (int i = 0; i <= samples_n; ++i) {
    double t = static_cast<double>(i) / samples_n;
    c.params.push_back(t);
    c.samples.push_back(c.eval(t));
  }
  return c;
}

SphereCurve lifted_circle_curve(int samples_n) {
  if (samples_n < 16) throw std::invalid_argument("lifted circle needs N >= 16");
  return make_curve(3, samples_n, [](double t) {
    const double r = 1.0 / std::sqrt(2.0);
    return std::vector<double>{r * std::cos(2.0 * kPi * t), r * std::sin(2.0 * kPi * t), r};
  });
}

SphereCurve great_circle_curve(int samples_n) {
  return make_curve(3, samples_n, [](double t) {
    return std::vector<double>{std::cos(2.0 * kPi * t), std::sin(2.0 * kPi * t), 0.0};
  });
}

SphereCurve constant_curve(int samples_n) {
  return make_curve(3, samples_n, [](double) { return std::vector<double>{0.0, 0.0, 1.0}; });
}

double lifted_circle_det() { return std::pow(2.0 * kPi, 3) / (2.0 * std::sqrt(2.0)); }

NondegeneracyReport nondegeneracy_check(const SphereCurve& gamma) {
  const int n = gamma.dim;
  if (n != 2 && n != 3) throw std::invalid_argument("nondegeneracy check supports n = 2 or 3");
  if (!gamma.eval) throw std::invalid_argument("curve has no evaluator");
  const double h = gamma.step;
  if (gamma.params.size() < static_cast<std::size_t>(n + 1) || !(h > 0.0) || 3.0 * h > 1.0) {
    throw std::invalid_argument("too few samples for the derivative stencil");
  }
  NondegeneracyReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < gamma.params.size(); ++s) {
    const double t = gamma.params[s];
    std::vector<double> d1(n), d2(n);
    // second-order stencils kept inside [0, 1]
    if (t - h >= 0.0 && t + h <= 1.0) {
      auto fm = gamma.eval(t - h), f0 = gamma.eval(t), fp = gamma.eval(t + h);
      for (int i = 0; i < n; ++i) {
        d1[i] = (fp[i] - fm[i]) / (2.0 * h);
        d2[i] = (fp[i] - 2.0 * f0[i] + fm[i]) / (h * h);
      }
    } else {
      const double dir = (t - h < 0.0) ? 1.0 : -1.0;
      auto f0 = gamma.eval(t), f1 = gamma.eval(t + dir * h), f2 = gamma.eval(t + 2 * dir * h),
           f3 = gamma.eval(t + 3 * dir * h);
      for (int i = 0; i < n; ++i) {
        d1[i] = dir * (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h);
        d2[i] = (2.0 * f0[i] - 5.0 * f1[i] + 4.0 * f2[i] - f3[i]) / (h * h);
      }
    }
    const auto& g = gamma.samples[s];
    double det = (n == 2) ? g[0] * d1[1] - g[1] * d1[0] : det3(g, d1, d2);
    rep.min_abs_det = std::min(rep.min_abs_det, std::fabs(det));
    rep.max_abs_det = std::max(rep.max_abs_det, std::fabs(det));
  }
  rep.pass = rep.min_abs_det > kNondegeneracyThreshold;
  return rep;
}

}  // namespace pindot
