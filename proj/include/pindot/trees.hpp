#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pindot/dimension.hpp"
#include "pindot/pointcloud.hpp"

namespace pindot {

struct TreePin {
  int vertex = 0;
  std::vector<double> point;
};

/// A tree with k edges on k + 1 vertices. Edges index into `vertices`.
struct TreeSpec {
  std::vector<std::string> vertices;
  std::vector<std::pair<int, int>> edges;
  std::optional<TreePin> pin;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  /// Throws unless connected and acyclic with in-range, non-loop edges.
  void validate() const;

  static TreeSpec path(int vertices);
  static TreeSpec star(int leaves);
  static TreeSpec single_edge() { return path(2); }
};

struct Coloring {
  std::vector<int> u;  // vertex indices, ascending
  std::vector<int> w;
};

/// Breadth-first bipartition from vertex 0; U is the larger class, ties go to
/// the class holding vertex 0.
Coloring two_color(const TreeSpec& t);

struct Label {
  int vertex = 0;
  bool in_u = true;
  int i = 0;  // u_i, or w_{i,j}
  int j = 0;
  std::string name() const;
};

/// u_1.. in index order, then for each u_i its unlabeled neighbors in index
/// order as w_{i,1}, w_{i,2}, ... Returned in the order u_1, w_{1,*}, u_2, w_{2,*}, ...
/// Throws if the coloring is not a proper bipartition of the tree.
std::vector<Label> greedy_label(const TreeSpec& t, const Coloring& c);

enum class TreeMode { automatic, exact, monte_carlo };

inline constexpr double kExactTupleLimit = 1e7;
inline constexpr std::int64_t kDefaultTreeSamples = 1000000;

struct TreeMeasureOptions {
  TreeMode mode = TreeMode::automatic;
  std::int64_t samples = kDefaultTreeSamples;
  std::uint64_t seed = 0;
  std::optional<double> s;  // exponent for the lower bound; default: fitted slope of A
};

struct TreeMeasureEstimate {
  std::vector<double> alpha;
  double eps = 0.0;
  bool exact = false;
  std::int64_t samples = 0;  // tuples drawn, or tuples enumerated (saturating)
  std::int64_t hits = 0;     // hitting tuples (Monte Carlo draws, or enumerated tuples)
  double estimate = 0.0;
  double std_error = 0.0;  // binomial standard error, 0 when exact
  double s = 0.0;
  int w_size = 0;
  double lower_bound = 0.0;  // eps^(s |W|)
  bool meets_bound() const { return estimate >= lower_bound; }
};

/// mu^(k+1) of the (k+1)-tuples whose edge dot products are all within eps
/// (strictly) of alpha. Exact by tree dynamic programming when requested or
/// when |A|^(k+1) <= 1e7 in automatic mode; otherwise Monte Carlo.
TreeMeasureEstimate tree_measure(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps,
                                 const TreeMeasureOptions& opts = {});

/// Reference enumeration over all (k+1)-tuples; only for small clouds.
double tree_measure_brute_force(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha, double eps);

struct PinnedTreeEstimate {
  TreeMeasureEstimate measure;
  int level = 0;
  /// Achieved edge dot-product tuples snapped to level cells (k integers each).
  std::vector<std::int64_t> alpha_cells;
  std::int64_t alpha_count = 0;
  std::optional<MeasureProxy> alpha_proxy;  // when k <= 4
};

inline constexpr double kAlphaTupleLimit = 5e7;

/// As tree_measure with the pinned vertex frozen at the pin point, which must
/// be a cell center of A. Also enumerates the achieved alpha tuples.
PinnedTreeEstimate pinned_tree_measure(const PointCloud& a, const TreeSpec& t, const std::vector<double>& alpha,
                                       double eps, const TreeMeasureOptions& opts = {});

struct SlabWitness {
  PointCloud cloud;  // weighted
  std::vector<double> alpha;
  std::vector<Label> labels;
  std::vector<double> offsets;  // slice of vertex labels[i]
  double tube_radius = 0.0;     // distance to the e_1 axis allowed for W vertices
  double tube_mass = 0.0;       // mu-mass of the tube points
  double guaranteed = 0.0;      // tube_mass^|W|, a lower bound for the tree measure
  double max_error = 0.0;       // worst edge dot-product error inside the construction
  double s = 0.0;
  int depth = 0;      // Cantor depth of each transverse factor
  int tube_depth = 0;
};

/// Parallel slices x_1 = c_v (one per vertex, in greedy-label order) near 1,
/// each carrying D * F with F a product of two-branch Cantor sets of total
/// dimension s anchored at the e_1 axis. The scale D makes the tube of radius
/// n^-n eps around the axis a full Cantor block, so every tuple whose W
/// vertices lie in the tube is a hit.
SlabWitness build_slab_tree_witness(const TreeSpec& t, int n, double s, double eps, int level);

}  // namespace pindot
