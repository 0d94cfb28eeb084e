#include "adgm/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace adgm {

namespace {

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c), up to a relative tolerance.
bool in_circumcircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                     const Eigen::Vector2d& d) {
  const Eigen::Vector2d ad = a - d, bd = b - d, cd = c - d;
  const double ra = ad.squaredNorm(), rb = bd.squaredNorm(), rc = cd.squaredNorm();
  const double det = ad.x() * (bd.y() * rc - rb * cd.y()) - ad.y() * (bd.x() * rc - rb * cd.x()) +
                     ra * (bd.x() * cd.y() - bd.y() * cd.x());
  const double scale = std::max({ra, rb, rc});
  return det > 1e-10 * scale * scale;
}

// Interiors of segments ab and cd meet in a single point.
bool properly_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                    const Eigen::Vector2d& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

EdgeList sorted_path(const PointSet& p) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::pair(p[a].x(), p[a].y()) < std::pair(p[b].x(), p[b].y());
  });
  EdgeList edges;
  for (std::size_t k = 1; k < order.size(); ++k) {
    edges.emplace_back(std::min(order[k - 1], order[k]), std::max(order[k - 1], order[k]));
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

EdgeList delaunay_edges(const PointSet& p) {
  const Eigen::Index n = p.size();
  using Edge = std::pair<Eigen::Index, Eigen::Index>;
  std::vector<Edge> accepted;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const double o = orient(p[i], p[j], p[k]);
        const double scale = std::max((p[j] - p[i]).squaredNorm(), (p[k] - p[i]).squaredNorm());
        if (std::abs(o) <= 1e-12 * scale) continue;
        std::array<Eigen::Index, 3> t{i, j, k};
        if (o < 0) std::swap(t[1], t[2]);
        bool empty = true;
        for (Eigen::Index m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          empty = !in_circumcircle(p[t[0]], p[t[1]], p[t[2]], p[m]);
        }
        if (!empty) continue;
        // Cocircular points admit several empty triangles; keep only those
        // compatible with the ones already taken.
        const std::array<Edge, 3> sides{Edge{i, j}, Edge{j, k}, Edge{i, k}};
        bool compatible = true;
        for (const auto& [a, b] : sides) {
          for (const auto& [c, d] : accepted) {
            if (properly_cross(p[a], p[b], p[c], p[d])) {
              compatible = false;
              break;
            }
          }
          if (!compatible) break;
        }
        if (!compatible) continue;
        for (const auto& e : sides) {
          if (std::find(accepted.begin(), accepted.end(), e) == accepted.end()) accepted.push_back(e);
        }
      }
    }
  }
  if (accepted.empty()) return sorted_path(p);
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

}  // namespace adgm
