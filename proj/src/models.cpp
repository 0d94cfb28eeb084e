#include "adgm/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace adgm {

namespace {

ConstraintSpec spec_for(const PointSet& p, const PointSet& q, const std::optional<Sides>& sides) {
  const Sides s = sides ? *sides : default_sides(p.size(), q.size());
  ConstraintSpec spec{p.size(), q.size(), s.rows, s.cols};
  spec.validate();
  return spec;
}

void check_edges(const EdgeList& edges, Eigen::Index n, const char* which) {
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::invalid_argument(std::string("build_pairwise_A: invalid edge (") +
                                  std::to_string(i) + "," + std::to_string(j) + ") in " + which);
    }
  }
}

// Emits F2 for all ordered node pairs of both graphs.
template <typename Potential>
MatchingInstance fully_connected(const PointSet& p, const PointSet& q, Sense sense,
                                 const std::optional<Sides>& sides, Potential potential) {
  MatchingInstance instance = make_instance(spec_for(p, q, sides), 2, sense);
  const auto& spec = instance.spec;
  auto& F2 = instance.potentials[1];
  for (Eigen::Index i1 = 0; i1 < p.size(); ++i1) {
    for (Eigen::Index j1 = 0; j1 < p.size(); ++j1) {
      if (i1 == j1) continue;
      for (Eigen::Index i2 = 0; i2 < q.size(); ++i2) {
        for (Eigen::Index j2 = 0; j2 < q.size(); ++j2) {
          if (i2 == j2) continue;
          F2.add({spec.index(i1, i2), spec.index(j1, j2)}, potential(i1, j1, i2, j2));
        }
      }
    }
  }
  for (auto& F : instance.potentials) F.canonicalize();
  return instance;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

PairGeometry pair_geometry(const PointSet& p, Eigen::Index i, Eigen::Index j, const PointSet& q,
                           Eigen::Index i2, Eigen::Index j2) {
  const Eigen::Vector2d u = p[j] - p[i];
  const Eigen::Vector2d v = q[j2] - q[i2];
  const double d1 = u.norm();
  const double d2 = v.norm();
  PairGeometry g;
  if (d1 + d2 < 1e-12) return g;
  g.delta = std::abs(d1 - d2) / (d1 + d2);
  if (d1 > 0.0 && d2 > 0.0) g.cos_alpha = std::clamp(u.dot(v) / (d1 * d2), -1.0, 1.0);
  return g;
}

Sides default_sides(Eigen::Index n1, Eigen::Index n2) {
  if (n1 == n2) return {SideMode::ExactlyOne, SideMode::ExactlyOne};
  if (n1 < n2) return {SideMode::ExactlyOne, SideMode::AtMostOne};
  return {SideMode::AtMostOne, SideMode::ExactlyOne};
}

double model_a_potential(const PairGeometry& g, const ModelAParams& params) {
  const double alpha = std::acos(g.cos_alpha);
  return params.eta * std::exp(g.delta * g.delta / (params.sigma_l * params.sigma_l)) +
         (1.0 - params.eta) * std::exp(alpha * alpha / (params.sigma_a * params.sigma_a)) - 1.0;
}

MatchingInstance build_pairwise_A(const PointSet& p, const PointSet& q, const EdgeList& edges1,
                                  const EdgeList& edges2, const Eigen::MatrixXd& unary,
                                  const ModelAParams& params, std::optional<Sides> sides) {
  if (unary.rows() != p.size() || unary.cols() != q.size()) {
    throw std::invalid_argument("build_pairwise_A: unary matrix must be n1 x n2");
  }
  check_edges(edges1, p.size(), "first graph");
  check_edges(edges2, q.size(), "second graph");
  MatchingInstance instance = make_instance(spec_for(p, q, sides), 2, Sense::Minimize);
  const auto& spec = instance.spec;
  auto& F1 = instance.potentials[0];
  auto& F2 = instance.potentials[1];
  for (Eigen::Index i2 = 0; i2 < q.size(); ++i2) {
    for (Eigen::Index i1 = 0; i1 < p.size(); ++i1) {
      F1.add({spec.index(i1, i2)}, unary(i1, i2) + params.unary_offset);
    }
  }
  for (const auto& [i1, j1] : edges1) {
    for (const auto& [a2, b2] : edges2) {
      // Both correspondences of the two edges, each in both orderings.
      for (const auto& [i2, j2] : {std::pair{a2, b2}, std::pair{b2, a2}}) {
        const double value = model_a_potential(pair_geometry(p, i1, j1, q, i2, j2), params);
        const Eigen::Index a = spec.index(i1, i2);
        const Eigen::Index b = spec.index(j1, j2);
        F2.add({a, b}, value);
        F2.add({b, a}, value);
      }
    }
  }
  for (auto& F : instance.potentials) F.canonicalize();
  return instance;
}

MatchingInstance build_pairwise_B(const PointSet& p, const PointSet& q, double sigma2,
                                  std::optional<Sides> sides) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("build_pairwise_B: sigma2 must be positive");
  return fully_connected(p, q, Sense::Maximize, sides,
                         [&](Eigen::Index i1, Eigen::Index j1, Eigen::Index i2, Eigen::Index j2) {
                           const double d1 = (p[j1] - p[i1]).norm();
                           const double d2 = (q[j2] - q[i2]).norm();
                           return std::exp(-std::abs(d1 - d2) / sigma2);
                         });
}

double model_c_potential(const PairGeometry& g, double eta) {
  return eta * g.delta + (1.0 - eta) * (1.0 - g.cos_alpha) / 2.0;
}

MatchingInstance build_pairwise_C(const PointSet& p, const PointSet& q, double eta,
                                  std::optional<Sides> sides) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("build_pairwise_C: eta must lie in [0,1]");
  return fully_connected(p, q, Sense::Minimize, sides,
                         [&](Eigen::Index i1, Eigen::Index j1, Eigen::Index i2, Eigen::Index j2) {
                           return model_c_potential(pair_geometry(p, i1, j1, q, i2, j2), eta);
                         });
}

std::optional<Eigen::Vector3d> triangle_angles(const PointSet& p, Eigen::Index i, Eigen::Index j,
                                               Eigen::Index k) {
  const std::array<Eigen::Vector2d, 3> v{p[i], p[j], p[k]};
  const Eigen::Vector2d e1 = v[1] - v[0];
  const Eigen::Vector2d e2 = v[2] - v[0];
  const double scale = std::max(e1.squaredNorm(), e2.squaredNorm());
  if (scale == 0.0 || std::abs(cross(e1, e2)) <= 1e-12 * scale) return std::nullopt;
  Eigen::Vector3d angles;
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector2d u = v[(a + 1) % 3] - v[a];
    const Eigen::Vector2d w = v[(a + 2) % 3] - v[a];
    angles(a) = std::atan2(std::abs(cross(u, w)), u.dot(w));
  }
  return angles;
}

MatchingInstance build_third_order(const PointSet& p, const PointSet& q,
                                   const ThirdOrderOptions& options, std::optional<Sides> sides) {
  const Eigen::Index n1 = p.size(), n2 = q.size();
  if (n1 < 3 || n2 < 3) throw std::invalid_argument("build_third_order: need at least 3 points per set");
  MatchingInstance instance = make_instance(spec_for(p, q, sides), 3, Sense::Maximize);
  const auto& spec = instance.spec;

  using Triple = std::array<Eigen::Index, 3>;
  std::vector<Triple> sources;
  const auto all_sources = static_cast<std::size_t>(n1 * (n1 - 1) * (n1 - 2) / 6);
  if (all_sources <= options.triangle_budget) {
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = i + 1; j < n1; ++j)
        for (Eigen::Index k = j + 1; k < n1; ++k) sources.push_back({i, j, k});
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n1 - 1);
    std::set<Triple> seen;
    while (sources.size() < options.triangle_budget) {
      Triple t{pick(rng), pick(rng), pick(rng)};
      std::sort(t.begin(), t.end());
      if (t[0] == t[1] || t[1] == t[2]) continue;
      if (seen.insert(t).second) sources.push_back(t);
    }
  }

  std::vector<Triple> targets;
  std::vector<Eigen::Vector3d> target_features;
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index k = 0; k < n2; ++k) {
        if (i == j || j == k || i == k) continue;
        if (auto f = triangle_angles(q, i, j, k)) {
          targets.push_back({i, j, k});
          target_features.push_back(*f);
        }
      }
  const std::size_t K = std::min(options.knn, targets.size());

  struct Match {
    Triple source;
    std::size_t target;
    double dist2;
  };
  std::vector<Match> matches;
  std::vector<std::pair<double, std::size_t>> ranked(targets.size());
  for (const auto& s : sources) {
    const auto f = triangle_angles(p, s[0], s[1], s[2]);
    if (!f) continue;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      ranked[t] = {(*f - target_features[t]).squaredNorm(), t};
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(K), ranked.end());
    for (std::size_t r = 0; r < K; ++r) matches.push_back({s, ranked[r].second, ranked[r].first});
  }

  double gamma = 0.0;
  if (options.gamma) {
    gamma = *options.gamma;
  } else if (!matches.empty()) {
    for (const auto& m : matches) gamma += m.dist2;
    gamma /= static_cast<double>(matches.size());
  }
  if (!(gamma > 0.0)) gamma = 1.0;

  auto& F3 = instance.potentials[2];
  for (const auto& m : matches) {
    const Triple& t = targets[m.target];
    std::array<Eigen::Index, 3> idx{spec.index(m.source[0], t[0]), spec.index(m.source[1], t[1]),
                                    spec.index(m.source[2], t[2])};
    const double value = std::exp(-m.dist2 / gamma);
    std::array<int, 3> perm{0, 1, 2};
    do {
      F3.add({idx[perm[0]], idx[perm[1]], idx[perm[2]]}, value);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  for (auto& F : instance.potentials) F.canonicalize();
  return instance;
}

PointSet read_points(std::istream& is) {
  std::string line;
  auto next_line = [&]() {
    while (std::getline(is, line)) {
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos != std::string::npos && line[pos] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw std::invalid_argument("read_points: missing header");
  long n = -1;
  std::istringstream(line) >> n;
  if (n < 1) throw std::invalid_argument("read_points: header must be a positive count");
  PointSet p(Eigen::Matrix2Xd(2, n));
  std::vector<std::string> labels;
  for (long i = 0; i < n; ++i) {
    if (!next_line()) throw std::invalid_argument("read_points: expected " + std::to_string(n) + " points");
    std::istringstream row(line);
    double x, y;
    if (!(row >> x >> y) || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("read_points: malformed point `" + line + "`");
    }
    p.coords.col(i) << x, y;
    std::string label;
    if (row >> label) labels.push_back(label);
  }
  if (labels.size() == static_cast<std::size_t>(n)) p.labels = std::move(labels);
  return p;
}

void write_points(std::ostream& os, const PointSet& p) {
  os << p.size() << '\n';
  const auto old_precision = os.precision(17);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    os << p.coords(0, i) << ' ' << p.coords(1, i);
    if (!p.labels.empty()) os << ' ' << p.labels[static_cast<std::size_t>(i)];
    os << '\n';
  }
  os.precision(old_precision);
}

EdgeList read_edges(std::istream& is) {
  EdgeList edges;
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream row(line);
    Eigen::Index i, j;
    if (!(row >> i >> j)) throw std::invalid_argument("read_edges: malformed edge `" + line + "`");
    edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  return edges;
}

void write_edges(std::ostream& os, const EdgeList& edges) {
  for (const auto& [i, j] : edges) os << i << ' ' << j << '\n';
}

}  // namespace adgm
