#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pindot/geometry.hpp"
#include "pindot/pointcloud.hpp"

namespace pindot {

/// Inclusive range of counting levels used by a fit.
struct Window {
  int lo = 0;
  int hi = 0;
};

/// Multiscale covering statistics. Level k means cells of side base^-k.
struct DimensionReport {
  int base = 2;
  std::vector<std::int64_t> counts;  // indexed by level, 0..max level
  Window window;
  double slope = 0.0;
  double r2 = 0.0;
  std::vector<double> proxy_measure;  // delta * N(delta) per level
  std::int64_t interior_run = 0;      // longest run of consecutive cells (scalar sets only)
};

/// Finest counting level with base^k <= 2^level, so every counting cell is a
/// union of whole native cells.
int max_count_level(int level, int base);

/// Levels [2, kmax - 1]: drops the two coarsest and the finest level. Below
/// kmax = 6 every level is used.
Window default_window(int max_level);
/// Default window of a scalar set: [3 - shift, kmax - 1] with kmax taken at its
/// resolution, i.e. the levels matching [2, kmax - 1] of the undilated set. Falls back to the four finest resolved levels when
/// fewer than four remain; throws when the set resolves fewer than four levels.
Window scalar_window(const ScalarSet& s, int base = 2);

std::int64_t covering_count(const PointCloud& a, int k, int base = 2);
std::int64_t covering_count(const ScalarSet& s, int k, int base = 2);
/// Counts for all levels 0..max_count_level.
std::vector<std::int64_t> covering_counts(const PointCloud& a, int base = 2);
std::vector<std::int64_t> covering_counts(const ScalarSet& s, int base = 2);

/// Least-squares slope of log N_k against k log(base). The slope is clamped to
/// [0, ambient_dim]. Throws if the window has fewer than 4 levels or all counts are 0.
DimensionReport fit_counts(std::vector<std::int64_t> counts, int base, std::optional<Window> window, int ambient_dim);

DimensionReport estimate_dimension(const PointCloud& a, std::optional<Window> window = std::nullopt, int base = 2);
DimensionReport estimate_dimension(const ScalarSet& s, std::optional<Window> window = std::nullopt, int base = 2);

/// Cap counts N_j of a cap set at every coarser angular level j (cap width ~ 2^-j).
std::vector<std::int64_t> cap_counts(const SphereGrid& grid, const std::vector<std::int64_t>& caps);
/// Dimension of a set of caps (or of line representatives when `lines` is true).
DimensionReport estimate_cap_dimension(const SphereGrid& grid, const std::vector<std::int64_t>& caps,
                                       std::optional<Window> window = std::nullopt, bool lines = false);

enum class Verdict { positive, null, inconclusive };
std::string to_string(Verdict v);

inline constexpr double kFlatRatio = 0.9;
inline constexpr double kNullDecay = 0.8;
inline constexpr int kInteriorRun = 16;
inline constexpr int kDecayLevels = 4;

struct MeasureProxy {
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> ratios;  // delta^dim * N(delta) per level
  double decay = 1.0;          // mean per-level factor over the finest window levels
  double flatness = 0.0;       // min/max over the three finest window levels
  Window window;
};

/// delta^dim N(delta) stability: null when the mean per-level factor over the
/// four finest window levels is at most 0.8, positive when the three finest
/// window levels agree within 0.9.
MeasureProxy measure_proxy_from_counts(const std::vector<std::int64_t>& counts, int base, int dim,
                                       std::optional<Window> window = std::nullopt);
MeasureProxy measure_proxy(const ScalarSet& s, int base = 2, std::optional<Window> window = std::nullopt);

struct InteriorProbe {
  bool has_interior = false;
  std::int64_t longest_run = 0;
};

std::int64_t longest_run(const ScalarSet& s);
InteriorProbe interior_probe(const ScalarSet& s, int run_length = kInteriorRun);

}  // namespace pindot
