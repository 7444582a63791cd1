#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pindot/dimension.hpp"
#include "pindot/exceptional.hpp"
#include "pindot/geometry.hpp"

namespace pindot {

inline constexpr int kDefaultPinSamples = 32;
inline constexpr double kFullDimMargin = 0.1;
inline constexpr double kDispersionRatio = 0.95;
inline constexpr double kPinPassFraction = 0.95;

/// Dimension threshold on A for the pinned theorem of the given kind.
double pin_threshold(ExceptionalKind kind, int n, double u);

struct PinSample {
  ExactPoint a;
  std::int64_t cap = 0;
  ProjectionVerdict dot_verdict;   // verdict of the pinned dot-product set
  ProjectionVerdict proj_verdict;  // verdict of the projection along pi_x(a)
  bool pass = false;
  bool agrees = false;  // dot_verdict and proj_verdict classify alike
};

struct PinOptions {
  int samples = kDefaultPinSamples;
  std::uint64_t seed = 1;
  ScanOptions scan;
  const ExceptionalScan* precomputed_scan = nullptr;  // reuse a scan of the same cloud
};

struct PinReport {
  ExactPoint x;
  ExceptionalKind kind = ExceptionalKind::measure;
  double u = 1.0;
  int angular_level = 0;
  double slope_a = 0.0;
  double threshold = 0.0;
  bool exploratory = false;
  std::vector<std::int64_t> radial_caps;
  std::vector<std::int64_t> good_caps;
  PointCloud a_x;
  DimensionReport dim_ax;
  bool full_dimensional = false;  // slope(A_x) >= slope(A) - 0.1
  std::vector<PinSample> pins;
  double pass_fraction = 0.0;
  double agreement = 0.0;
};

/// True when the set's statistics pass for this kind (the opposite of exceptional).
bool pin_passes(const ProjectionVerdict& v, ExceptionalKind kind, double u);

/// Full-dimensional A_x and at least 95% of the sampled pins passing.
bool pin_report_passes(const PinReport& r);

/// Translation-invariant pin pipeline from a fixed vantage x.
PinReport pin_pipeline(const PointCloud& a, const ExactPoint& x, ExceptionalKind kind, double u = 1.0,
                       const PinOptions& opts = {});

struct DispersionReport {
  int k = 1;
  std::size_t planes_tested = 0;
  double worst_ratio = 1.0;
  bool dispersed = false;
  std::vector<std::vector<double>> witness;  // point and spanning vectors of the worst plane
};

/// k-planar dispersion: coordinate k-planes through the origin plus `budget`
/// planes through random (k+1)-subsets of cells; each removes a 1.5-cell
/// neighbourhood and compares slopes.
DispersionReport dispersion_check(const PointCloud& x, int k, int budget = 16, std::uint64_t seed = 1);

struct TranslationSample {
  ExactPoint x;
  double radial_slope = 0.0;
  bool in_xa = false;
  std::optional<PinReport> pins;
};

struct DifferencePin {
  ExactPoint a1, a2, a0;  // a0 = a2 - a1
  bool identity_exact = false;  // Pi_0^{a0}(A) == Pi_{a1}^{a2}(A)
  bool positive = false;
};

struct TranslationReport {
  int k = 1;
  double slope_a = 0.0;
  double slope_x = 0.0;
  DispersionReport dispersion;
  bool exploratory = false;
  std::vector<std::string> warnings;
  std::vector<TranslationSample> samples;
  double xa_fraction = 0.0;
  double pin_pass_fraction = 0.0;  // over samples in X_A
  std::vector<DifferencePin> difference_pins;
};

struct TranslationOptions {
  int translations = 16;
  int pins_per_x = kDefaultPinSamples;
  int dispersion_budget = 16;
  std::uint64_t seed = 1;
  ScanOptions scan;
  int radial_level = -1;  // -1: cloud level for n = 2, 6 for n = 3
};

TranslationReport translation_scan(const PointCloud& a, const PointCloud& x, int k, ExceptionalKind kind, double u = 1.0,
                                   const TranslationOptions& opts = {});

struct RestrictedReport {
  NondegeneracyReport curve;
  int angular_level = 0;
  std::vector<double> t_hit;
  std::vector<double> t_bad;
  DimensionReport bad_dim;
  double bad_dim_bound = 0.0;  // u + 0.15
  bool pass = false;
  std::size_t pin_count = 0;
  std::vector<ExactPoint> pins;  // up to 32 representatives
};

struct RestrictedOptions {
  int angular_level = 6;
  std::optional<Window> window;
};

/// Restricted-curve pipeline: parameters whose direction is hit by pi_x(A) and
/// parameters where P_gamma(t)(A) has slope below u - 0.05.
RestrictedReport restricted_pipeline(const PointCloud& a, const ExactPoint& x, const SphereCurve& gamma, double u,
                                     const RestrictedOptions& opts = {});

/// Cap-set slope of pi_x(A).
DimensionReport radial_dimension(const PointCloud& a, std::span<const double> x, int angular_level);
int default_radial_level(const PointCloud& a);

}  // namespace pindot
