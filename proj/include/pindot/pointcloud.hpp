#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pindot/rational.hpp"

namespace pindot {

inline constexpr double kDefaultBound = 2.0;
inline constexpr int kMaxAmbientDim = 4;

/// A finite set of dyadic lattice cells in R^n at resolution 2^-level.
///
/// Cell c is the half-open cube prod_i [c_i, c_i + 1) * 2^-level and stands for
/// its center (c + 1/2) * 2^-level. Cells are kept sorted lexicographically and
/// unique, which makes serialization byte-reproducible. Optional weights form a
/// discrete probability measure on the cells.
class PointCloud {
 public:
  PointCloud() = default;

  /// `flat_cells` holds dim integers per cell. Sorts, merges duplicates (adding
  /// their weights) and validates the bound. Throws std::invalid_argument.
  PointCloud(int dim, int level, std::vector<std::int64_t> flat_cells, double bound = kDefaultBound,
             std::optional<std::vector<double>> weights = std::nullopt);

  int dim() const { return dim_; }
  int level() const { return level_; }
  double bound() const { return bound_; }
  std::size_t size() const { return dim_ == 0 ? 0 : cells_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return cells_.empty(); }

  std::span<const std::int64_t> cell(std::size_t i) const {
    return {cells_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<std::int64_t>& flat_cells() const { return cells_; }

  double cell_width() const;
  double center(std::size_t i, int axis) const;
  std::vector<double> center(std::size_t i) const;
  /// Exact dyadic center (2c + 1) / 2^(level + 1).
  Rational center_exact(std::size_t i, int axis) const;

  bool has_weights() const { return weights_.has_value(); }
  const std::vector<double>& weights() const;
  /// Weights if present, otherwise the uniform measure over cells.
  std::vector<double> measure() const;
  PointCloud with_uniform_weights() const;
  PointCloud without_weights() const;

  /// Index of the cell containing `point`, if it belongs to the cloud.
  std::optional<std::size_t> find(std::span<const std::int64_t> cell) const;
  std::vector<std::int64_t> cell_of(std::span<const double> point) const;
  std::vector<std::int64_t> cell_of_exact(std::span<const Rational> point) const;

  /// Cells at a coarser level (floor division); weights are aggregated.
  PointCloud coarsen(int to_level) const;
  /// Keeps the cells whose index satisfies `keep[i]`.
  PointCloud subset(const std::vector<bool>& keep) const;
  /// Permutes/negates axes: new axis j takes old axis perm[j] times sign[j].
  /// Sign flips map cell c to -c - 1 so the lattice is preserved exactly.
  PointCloud transform_axes(std::span<const int> perm, std::span<const int> sign) const;

  friend bool operator==(const PointCloud& a, const PointCloud& b) = default;

 private:
  int dim_ = 0;
  int level_ = 0;
  double bound_ = kDefaultBound;
  std::vector<std::int64_t> cells_;
  std::optional<std::vector<double>> weights_;
};

/// Self-similar Cantor set: `branches` children of length `ratio` per step,
/// evenly spaced with the first starting at the left end and the last ending
/// at the right end of the parent interval.
struct CantorSpec {
  Rational ratio{1, 3};
  int branches = 2;
  int depth = 0;

  void validate() const;
  double dimension() const;
};

/// Smallest level at which every depth-d interval spans at least one cell.
int min_level(const CantorSpec& spec);

/// Cantor set inside [origin, origin + scale] snapped at `level`: a cell is
/// kept when its center lies in one of the closed depth-d intervals.
PointCloud gen_cantor_1d(const CantorSpec& spec, int level, Rational origin = Rational(0),
                         Rational scale = Rational(1), double bound = kDefaultBound);

/// The depth-d Cantor intervals as exact [lo, hi] pairs (unit interval).
std::vector<std::pair<Rational, Rational>> cantor_intervals(const CantorSpec& spec);

/// Dense interval [lo, hi] (cells whose centers lie in it).
PointCloud gen_interval(int level, Rational lo, Rational hi, double bound = kDefaultBound);
/// The single cell holding the origin.
PointCloud gen_point(int dim, int level, double bound = kDefaultBound);

PointCloud gen_product(std::span<const PointCloud> factors);

/// C x {0} with C the middle-thirds Cantor set at the deepest depth the level
/// resolves.
PointCloud gen_sharpness_line(int level);
int sharpness_depth(int level);

struct SlabConstruction {
  PointCloud cloud;
  std::vector<Rational> offsets;  // first coordinate of each slice
  std::vector<CantorSpec> factor_specs;  // per transverse axis
};

/// k parallel slices {x_1 = offset_i} x F with F an s-dimensional Cantor
/// product anchored at the e_1 axis.
SlabConstruction gen_slab_construction(int n, int k, double s, int level);

/// `count` seeded uniform draws of cells in [0, 1)^dim (duplicates merged).
PointCloud gen_random(int dim, int level, std::size_t count, std::uint64_t seed, double bound = kDefaultBound);

/// Rational-ratio Cantor spec whose dimension is closest to `target` (0, 1].
CantorSpec cantor_spec_for_dimension(double target, int level);

}  // namespace pindot
