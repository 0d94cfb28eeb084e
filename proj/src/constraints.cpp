#include "adgm/constraints.hpp"

#include <cmath>

namespace adgm {

namespace {

using Matrix = Eigen::MatrixXd;

void check_size(const AssignmentVector& x, const ConstraintSpec& spec, const char* what) {
  if (x.size() != spec.size()) {
    throw std::invalid_argument(std::string(what) + ": vector of length " +
                                std::to_string(x.size()) + " does not match " +
                                std::to_string(spec.n1) + "x" + std::to_string(spec.n2));
  }
}

// Largest violation of one side's constraint over the lines (rows or
// columns) of mat(x).
template <typename Lines>
double side_violation(const Lines& sums, SideMode mode) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    switch (mode) {
      case SideMode::AtMostOne:
        worst = std::max(worst, sums(i) - 1.0);
        break;
      case SideMode::ExactlyOne:
        worst = std::max(worst, std::abs(sums(i) - 1.0));
        break;
      case SideMode::Unconstrained:
        break;
    }
  }
  return worst;
}

double negativity(const AssignmentVector& x) {
  return x.size() == 0 ? 0.0 : std::max(0.0, -x.minCoeff());
}

}  // namespace

void ConstraintSpec::validate() const {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("ConstraintSpec: sizes must be positive");
  if (row_mode == SideMode::ExactlyOne && n1 > n2) {
    throw std::invalid_argument("ConstraintSpec: exactly-one rows need n1 <= n2");
  }
  if (col_mode == SideMode::ExactlyOne && n2 > n1) {
    throw std::invalid_argument("ConstraintSpec: exactly-one columns need n2 <= n1");
  }
}

std::string to_string(SideMode mode) {
  switch (mode) {
    case SideMode::AtMostOne:
      return "at_most_one";
    case SideMode::ExactlyOne:
      return "exactly_one";
    case SideMode::Unconstrained:
      return "unconstrained";
  }
  return "?";
}

SideMode parse_side_mode(const std::string& text) {
  if (text == "at_most_one" || text == "at-most-one") return SideMode::AtMostOne;
  if (text == "exactly_one" || text == "exactly-one") return SideMode::ExactlyOne;
  if (text == "unconstrained") return SideMode::Unconstrained;
  throw std::invalid_argument("unknown side mode `" + text + "`");
}

AssignmentVector project_rowwise(const AssignmentVector& c, const ConstraintSpec& spec) {
  check_size(c, spec, "project_rowwise");
  const SimplexMode mode = simplex_mode_for(spec.row_mode);
  AssignmentVector out(c.size());
  Eigen::Map<const Matrix> in_mat(c.data(), spec.n1, spec.n2);
  Eigen::Map<Matrix> out_mat(out.data(), spec.n1, spec.n2);
  for (Eigen::Index i = 0; i < spec.n1; ++i) {
    out_mat.row(i) = project_simplex(in_mat.row(i).transpose(), mode).transpose();
  }
  return out;
}

AssignmentVector project_colwise(const AssignmentVector& c, const ConstraintSpec& spec) {
  check_size(c, spec, "project_colwise");
  const SimplexMode mode = simplex_mode_for(spec.col_mode);
  AssignmentVector out(c.size());
  Eigen::Map<const Matrix> in_mat(c.data(), spec.n1, spec.n2);
  Eigen::Map<Matrix> out_mat(out.data(), spec.n1, spec.n2);
  for (Eigen::Index j = 0; j < spec.n2; ++j) {
    out_mat.col(j) = project_simplex(in_mat.col(j), mode);
  }
  return out;
}

double row_violation(const AssignmentVector& x, const ConstraintSpec& spec) {
  check_size(x, spec, "row_violation");
  Eigen::Map<const Matrix> mat(x.data(), spec.n1, spec.n2);
  return std::max(negativity(x), side_violation(mat.rowwise().sum(), spec.row_mode));
}

double col_violation(const AssignmentVector& x, const ConstraintSpec& spec) {
  check_size(x, spec, "col_violation");
  Eigen::Map<const Matrix> mat(x.data(), spec.n1, spec.n2);
  return std::max(negativity(x), side_violation(mat.colwise().sum(), spec.col_mode));
}

FeasibilityReport feasibility(const AssignmentVector& x, const ConstraintSpec& spec, bool hard,
                              double tolerance) {
  check_size(x, spec, "feasibility");
  double worst = std::max(row_violation(x, spec), col_violation(x, spec));
  // Entries above one are only possible when both sides are unconstrained.
  if (spec.row_mode != SideMode::Unconstrained || spec.col_mode != SideMode::Unconstrained) {
    worst = std::max(worst, x.size() ? x.maxCoeff() - 1.0 : 0.0);
  }
  if (hard) {
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      worst = std::max(worst, std::min(std::abs(x(a)), std::abs(x(a) - 1.0)));
    }
  }
  return {worst <= tolerance, worst};
}

}  // namespace adgm
