#ifndef ADGM_MODELS_HPP
#define ADGM_MODELS_HPP

#include "adgm/instance.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adgm {

// 2-D points, one per column.
struct PointSet {
  Eigen::Matrix2Xd coords;
  std::vector<std::string> labels;  // optional, empty or one per point

  PointSet() = default;
  explicit PointSet(Eigen::Matrix2Xd c) : coords(std::move(c)) {}

  Eigen::Index size() const { return coords.cols(); }
  Eigen::Vector2d operator[](Eigen::Index i) const { return coords.col(i); }
};

// Undirected edges (i, j) with i < j.
using EdgeList = std::vector<std::pair<Eigen::Index, Eigen::Index>>;

struct PairGeometry {
  double delta = 0.0;      // |d1 - d2| / (d1 + d2)
  double cos_alpha = 1.0;  // cosine of the angle between the two segments
};

// Compares segment p[i]->p[j] with q[i2]->q[j2]. Segments with d1 + d2 below
// 1e-12 give (0, 1); a single zero-length segment gives cos_alpha = 1.
PairGeometry pair_geometry(const PointSet& p, Eigen::Index i, Eigen::Index j, const PointSet& q,
                           Eigen::Index i2, Eigen::Index j2);

struct Sides {
  SideMode rows = SideMode::AtMostOne;
  SideMode cols = SideMode::AtMostOne;
};

// Smaller side exactly-one, larger side at-most-one (both exactly-one when
// the sizes agree).
Sides default_sides(Eigen::Index n1, Eigen::Index n2);

struct ModelAParams {
  double eta = 0.5;
  double sigma_l = 1.0;
  double sigma_a = 1.0;
  double unary_offset = 0.0;  // added to every unary potential
};

// eta*exp(delta^2/sigma_l^2) + (1-eta)*exp(alpha^2/sigma_a^2) - 1.
double model_a_potential(const PairGeometry& g, const ModelAParams& params);

// Delaunay-edge model with external unaries (n1 x n2). Minimize.
MatchingInstance build_pairwise_A(const PointSet& p, const PointSet& q, const EdgeList& edges1,
                                  const EdgeList& edges2, const Eigen::MatrixXd& unary,
                                  const ModelAParams& params, std::optional<Sides> sides = {});

inline constexpr double kModelBSigma2 = 2500.0;

// Fully connected, exp(-|d1 - d2| / sigma2). Maximize.
MatchingInstance build_pairwise_B(const PointSet& p, const PointSet& q, double sigma2 = kModelBSigma2,
                                  std::optional<Sides> sides = {});

// eta*delta + (1-eta)*(1-cos alpha)/2.
double model_c_potential(const PairGeometry& g, double eta);

// Fully connected. Minimize.
MatchingInstance build_pairwise_C(const PointSet& p, const PointSet& q, double eta = 0.5,
                                  std::optional<Sides> sides = {});

struct ThirdOrderOptions {
  // Every source triangle is used when C(n1,3) fits the budget, otherwise
  // this many distinct triangles are sampled.
  std::size_t triangle_budget = 5000;
  std::size_t knn = 300;  // capped at the number of ordered target triangles
  std::optional<double> gamma;  // default: mean retained squared distance
  std::uint64_t seed = 0;
};

// Interior angles (radians) at the vertices in listed order; nullopt for
// collinear triples.
std::optional<Eigen::Vector3d> triangle_angles(const PointSet& p, Eigen::Index i, Eigen::Index j,
                                               Eigen::Index k);

// Angle-feature third-order model. Maximize.
MatchingInstance build_third_order(const PointSet& p, const PointSet& q,
                                   const ThirdOrderOptions& options = {},
                                   std::optional<Sides> sides = {});

// Delaunay triangulation edges by the empty-circumcircle test over all
// triples. Cocircular ties keep the lexicographically first triangles.
// Collinear input yields the path along the sorted points.
EdgeList delaunay_edges(const PointSet& p);

// Point-set file: header `n`, then `x y [label]` per line.
PointSet read_points(std::istream& is);
void write_points(std::ostream& os, const PointSet& p);
// Edge-list file: `i j` per line.
EdgeList read_edges(std::istream& is);
void write_edges(std::ostream& os, const EdgeList& edges);

}  // namespace adgm

#endif  // ADGM_MODELS_HPP
