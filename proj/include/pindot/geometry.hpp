#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pindot/pointcloud.hpp"
#include "pindot/rational.hpp"

namespace pindot {

/// Exact point in R^n (pins, vantage points).
using ExactPoint = std::vector<Rational>;

ExactPoint to_exact(std::span<const double> p);
std::vector<double> to_double(const ExactPoint& p);

/// Sorted, unique dyadic cells on R at resolution 2^-level.
///
/// `scale_shift` records round(log2 c) when the set is a c-dilate of a set
/// sampled at the cloud's spacing (a pinned dot-product set has c = |a - x|).
/// Counting windows move with it, so level k of the dilate is read against
/// level k - shift of the original and contracted sets are never counted below
/// their sampling spacing.
class ScalarSet {
 public:
  ScalarSet() = default;
  /// scale_shift: round(log2 c) when the set is a c-dilate of something sampled
  /// at sample_level (defaults to level).
  ScalarSet(int level, std::vector<std::int64_t> cells, double bound, int scale_shift = 0, int sample_level = -1);

  int level() const { return level_; }
  int scale_shift() const { return shift_; }
  int sample_level() const { return sample_level_; }
  /// Finest level the samples resolve: min(level, sample_level - shift), at least 0.
  int resolution() const;
  double bound() const { return bound_; }
  const std::vector<std::int64_t>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  double center(std::size_t i) const;
  bool contains(std::int64_t cell) const;

  /// Same set snapped after scaling every center by c > 0.
  ScalarSet scaled(double c) const;
  /// Union with a set at the same level.
  ScalarSet unite(const ScalarSet& other) const;

  friend bool operator==(const ScalarSet& a, const ScalarSet& b) = default;

 private:
  int level_ = 0;
  int shift_ = 0;
  int sample_level_ = 0;
  double bound_ = kDefaultBound;
  std::vector<std::int64_t> cells_;
};

/// round(log2 c) for c > 0, 0 otherwise.
int scale_shift_of(double c);

/// Deterministic cap partition of S^(n-1), n in {2, 3}.
///
/// n = 2: 2^(level+2) equal angular bins, bin b covering [b, b+1) * 2pi / 2^(level+2)
/// measured counter-clockwise from e_1.
/// n = 3: equiangular cube-sphere. The face is the axis of largest magnitude
/// (lowest axis wins ties) and its sign; the remaining two coordinates, divided
/// by the dominant magnitude, map through (4/pi) atan into [-1, 1] and are cut
/// into 2^level bins each: 6 * 4^level caps.
///
/// Both rules are nested (coarsening is a right shift of the bin indices) and
/// closed under coordinate swaps and sign flips. Cap width is about
/// (pi/2) 2^-level in both cases.
class SphereGrid {
 public:
  SphereGrid(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::int64_t cap_count() const;
  /// Caps with a canonical antipodal representative (one per line).
  std::int64_t line_count() const { return cap_count() / 2; }

  std::int64_t cap_index(std::span<const double> v) const;
  std::vector<double> cap_center(std::int64_t cap) const;
  std::int64_t antipode(std::int64_t cap) const;
  /// Representative of {cap, antipode(cap)} in [0, line_count()).
  std::int64_t line_index(std::int64_t cap) const;
  /// Cap index of a line representative.
  std::int64_t line_cap(std::int64_t line) const;
  std::int64_t coarsen(std::int64_t cap, int to_level) const;
  /// Smallest angular diameter over caps of this grid (radians, lower bound).
  double min_cap_width() const;

 private:
  int dim_;
  int level_;
};

struct Direction {
  std::vector<double> vector;
  int level = 0;
  std::int64_t cap_index = 0;

  /// Normalizes v and snaps it to its cap. Throws on a zero vector.
  static Direction from_vector(std::span<const double> v, int level);
};

/// Orthogonal projection coordinate set {y . theta} over cell centers, snapped
/// at the cloud's level. The line l_theta is oriented by theta itself.
ScalarSet orthogonal_project(const PointCloud& a, std::span<const double> theta);

/// Per-cell projection cells (unsorted, aligned with the cloud's cells).
std::vector<std::int64_t> projection_cells(const PointCloud& a, std::span<const double> theta);

/// Radial projection pi_x(A \ {x}) as sorted unique cap indices at `angular_level`.
/// The cell containing x is excluded.
std::vector<std::int64_t> radial_project(const PointCloud& a, std::span<const double> x, int angular_level);

/// Unit directions (y - x)/|y - x| per cell, with NaN rows for the excluded cell.
std::vector<double> radial_vectors(const PointCloud& a, std::span<const double> x);

/// Pinned dot-product set {(a - x) . y}, computed in exact rationals and then
/// snapped at the cloud's level. When a == x the result is {0}.
/// Snapped at `level` (default: the cloud level). Any finer level is exact too.
ScalarSet dot_product_set(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x, int level = -1);
/// Level at which the pinned set a dot (A - x) sees the same scales as the cloud:
/// cloud level + max(0, -round(log2 |a - x|)).
int matched_dot_level(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x);

/// The exact (unsnapped) values, sorted and unique.
std::vector<Rational> dot_product_values(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x);

/// theta = (a - x)/|a - x| in exact form (shared squarefree radicand).
std::vector<Surd> exact_direction(const ExactPoint& a, const ExactPoint& x);

/// Exact projection values {theta . y}, sorted and unique.
std::vector<Surd> orthogonal_project_exact(const PointCloud& cloud, std::span<const Surd> theta);

struct KeyLemmaReport {
  double scale_factor = 0.0;        // |a - x|
  bool exact_match = false;         // Pi == |a - x| * S as exact sets
  double exact_discrepancy = 0.0;   // max |Pi_i - |a-x| S_i| under sorted matching (exact path)
  double snapped_discrepancy = 0.0; // per point, snapped centers
  double snapped_tolerance = 0.0;   // 2^-m * n
  std::size_t dot_count = 0;
  std::size_t projection_count = 0;
  bool pass = false;
};

KeyLemmaReport key_lemma_check(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x);

struct Hyperplane {
  Direction normal;
  double offset = 0.0;  // alpha / |a - x|
  Rational alpha;
};

/// One hyperplane per exact value alpha of the dot-product set.
std::vector<Hyperplane> hyperplane_family(const PointCloud& cloud, const ExactPoint& a, const ExactPoint& x,
                                          int angular_level = 8);

struct SphereCurve {
  int dim = 3;
  std::vector<double> params;                // t_0 < ... < t_N in [0, 1]
  std::vector<std::vector<double>> samples;  // gamma(t_i)
  double step = 0.0;                         // derivative stencil width h
  std::function<std::vector<double>(double)> eval;
};

/// gamma(t) = (cos 2 pi t, sin 2 pi t, 1) / sqrt(2) on N + 1 uniform parameters.
SphereCurve lifted_circle_curve(int samples_n);
/// gamma(t) = (cos 2 pi t, sin 2 pi t, 0).
SphereCurve great_circle_curve(int samples_n);
/// Constant curve at e_3.
SphereCurve constant_curve(int samples_n);
SphereCurve make_curve(int dim, int samples_n, std::function<std::vector<double>(double)> eval);

/// |det[gamma, gamma', gamma'']| of the lifted circle, (2 pi)^3 / (2 sqrt 2).
double lifted_circle_det();

struct NondegeneracyReport {
  double min_abs_det = 0.0;
  double max_abs_det = 0.0;
  bool pass = false;
};

inline constexpr double kNondegeneracyThreshold = 1e-6;

NondegeneracyReport nondegeneracy_check(const SphereCurve& gamma);

}  // namespace pindot
