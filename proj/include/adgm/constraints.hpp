#ifndef ADGM_CONSTRAINTS_HPP
#define ADGM_CONSTRAINTS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adgm {

// Assignment vectors use the column-wise flattening of the n1 x n2 assignment
// matrix: entry a = i2 * n1 + i1 matches node i1 of the first graph to node
// i2 of the second. An Eigen::Map of shape (n1, n2) over the data is mat(x).
using AssignmentVector = Eigen::VectorXd;

enum class SideMode { AtMostOne, ExactlyOne, Unconstrained };

enum class SimplexMode { SumEqualsOne, SumAtMostOne, NonNegativeOnly };

struct ConstraintSpec {
  Eigen::Index n1 = 1;
  Eigen::Index n2 = 1;
  SideMode row_mode = SideMode::AtMostOne;
  SideMode col_mode = SideMode::AtMostOne;

  Eigen::Index size() const { return n1 * n2; }
  Eigen::Index index(Eigen::Index i1, Eigen::Index i2) const { return i2 * n1 + i1; }

  // Throws std::invalid_argument on non-positive sizes or on an ExactlyOne
  // side that cannot be satisfied (rows need n1 <= n2, columns n2 <= n1).
  void validate() const;
};

std::string to_string(SideMode mode);
SideMode parse_side_mode(const std::string& text);

inline SimplexMode simplex_mode_for(SideMode mode) {
  switch (mode) {
    case SideMode::ExactlyOne:
      return SimplexMode::SumEqualsOne;
    case SideMode::AtMostOne:
      return SimplexMode::SumAtMostOne;
    case SideMode::Unconstrained:
      break;
  }
  return SimplexMode::NonNegativeOnly;
}

// Euclidean projection onto {x >= 0, sum x = 1}, {x >= 0, sum x <= 1} or
// {x >= 0}. The unit-sum case uses the sort-and-threshold rule.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_simplex(
    const Eigen::MatrixBase<Derived>& v, SimplexMode mode) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (v.size() == 0) throw std::invalid_argument("project_simplex: empty vector");

  if (mode != SimplexMode::SumEqualsOne) {
    Vector clipped = v.derived().template cast<Scalar>().cwiseMax(Scalar(0));
    if (mode == SimplexMode::NonNegativeOnly || clipped.sum() <= Scalar(1)) return clipped;
  }

  std::vector<Scalar> u(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = v(i);
  std::sort(u.begin(), u.end(), std::greater<Scalar>());
  Scalar prefix(0);
  Scalar theta(0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    prefix += u[k];
    const Scalar candidate = (prefix - Scalar(1)) / Scalar(k + 1);
    if (u[k] - candidate > Scalar(0)) theta = candidate;
  }
  return (v.derived().array() - theta).cwiseMax(Scalar(0)).matrix();
}

// Projection onto M_r: every row of mat(c) is projected independently with
// the simplex mode induced by spec.row_mode.
AssignmentVector project_rowwise(const AssignmentVector& c, const ConstraintSpec& spec);

// Projection onto M_c, the column analogue of project_rowwise.
AssignmentVector project_colwise(const AssignmentVector& c, const ConstraintSpec& spec);

struct FeasibilityReport {
  bool feasible = true;
  double max_violation = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

// Membership in M (soft) or M* (hard, additionally binary) under spec.
FeasibilityReport feasibility(const AssignmentVector& x, const ConstraintSpec& spec, bool hard,
                              double tolerance = kFeasibilityTolerance);

// Violation of the row (or column) side constraints alone, plus nonnegativity.
double row_violation(const AssignmentVector& x, const ConstraintSpec& spec);
double col_violation(const AssignmentVector& x, const ConstraintSpec& spec);

}  // namespace adgm

#endif  // ADGM_CONSTRAINTS_HPP
