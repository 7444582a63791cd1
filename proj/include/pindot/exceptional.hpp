#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pindot/dimension.hpp"
#include "pindot/geometry.hpp"

namespace pindot {

enum class ExceptionalKind { dimension, measure, interior };  // E_u, E_+, interior-free

std::string to_string(ExceptionalKind k);
ExceptionalKind parse_kind(const std::string& s);

inline constexpr double kSlopeMargin = 0.05;
inline constexpr double kBoundMargin = 0.15;

struct ScanOptions {
  int angular_level = -1;  // -1: 10 for n = 2, 5 for n = 3
  std::optional<Window> window;  // per-projection fit window
};

int default_angular_level(int n);

/// Classification of one projection against the chosen kind.
struct ProjectionVerdict {
  double slope = 0.0;
  Verdict measure = Verdict::inconclusive;
  std::int64_t run = 0;
  bool exceptional = false;
};

ProjectionVerdict classify_projection(const ScalarSet& s, ExceptionalKind kind, double u,
                                      std::optional<Window> window = std::nullopt);

struct DirectionResult {
  std::int64_t line = 0;
  std::vector<double> theta;
  ProjectionVerdict verdict;
};

struct ExceptionalScan {
  ExceptionalKind kind = ExceptionalKind::dimension;
  double u = 1.0;
  int dim = 2;
  int angular_level = 0;
  std::vector<DirectionResult> directions;  // one per line, by line index
  std::vector<std::int64_t> exceptional;    // line indices
  DimensionReport exc_dim;

  SphereGrid grid() const { return SphereGrid(dim, angular_level); }
  bool is_exceptional_line(std::int64_t line) const;
};

/// Projects A onto every line of the sphere grid (antipodes merged) and
/// classifies each projection.
ExceptionalScan scan_directions(const PointCloud& a, ExceptionalKind kind, double u = 1.0,
                                const ScanOptions& opts = {});

struct BoundCheck {
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
  std::optional<double> planar_bound;  // sharp planar bound for E_u
  std::optional<bool> planar_pass;
};

/// Upper bound on the exceptional-set dimension for this kind and dim A.
double exceptional_bound(ExceptionalKind kind, int n, double u, double dim_a);
std::optional<double> planar_dimension_bound(int n, double u, double dim_a);

BoundCheck check_bound(const ExceptionalScan& scan, double dim_a);

}  // namespace pindot
