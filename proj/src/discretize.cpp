#include "adgm/discretize.hpp"

#include <limits>
#include <vector>

namespace adgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum-cost perfect assignment on a square cost matrix (shortest
// augmenting paths with potentials). Returns the column of each row.
// Forbidden pairs carry +inf; the problem must admit a finite assignment.
std::vector<Eigen::Index> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const Eigen::Index N = cost.rows();
  std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0);
  std::vector<Eigen::Index> match(N + 1, 0), way(N + 1, 0);
  for (Eigen::Index i = 1; i <= N; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(N + 1, kInf);
    std::vector<char> used(N + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = match[j0];
      double delta = kInf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw std::logic_error("hungarian: no feasible assignment");
      for (Eigen::Index j = 0; j <= N; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Eigen::Index> row_to_col(N, -1);
  for (Eigen::Index j = 1; j <= N; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double enumeration_count(Eigen::Index free_lines, Eigen::Index targets, bool optional) {
  // Injective maps from free_lines into targets, each line optionally
  // unmatched: sum_k C(free, k) * P(targets, k).
  double total = 0.0;
  const Eigen::Index kmax = std::min(free_lines, targets);
  for (Eigen::Index k = optional ? 0 : kmax; k <= kmax; ++k) {
    double term = 1.0;
    for (Eigen::Index t = 0; t < k; ++t) {
      term *= static_cast<double>(free_lines - t) / static_cast<double>(t + 1);
      term *= static_cast<double>(targets - t);
    }
    total += term;
  }
  return total;
}

bool lexicographically_less(const AssignmentVector& a, const AssignmentVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

AssignmentVector hungarian(const ProfitMatrix& profit, const ConstraintSpec& spec) {
  if (profit.rows() != spec.n1 || profit.cols() != spec.n2) {
    throw std::invalid_argument("hungarian: profit matrix does not match the constraint spec");
  }
  if (spec.row_mode == SideMode::Unconstrained || spec.col_mode == SideMode::Unconstrained) {
    throw Unsupported("hungarian: unconstrained sides are not a bipartite matching");
  }
  spec.validate();
  const Eigen::Index n1 = spec.n1, n2 = spec.n2, N = n1 + n2;
  // Rows: n1 real then n2 dummies. Columns: n2 real then n1 dummies.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(N, N);
  cost.topLeftCorner(n1, n2) = -profit;
  const double row_skip = spec.row_mode == SideMode::AtMostOne ? 0.0 : kInf;
  const double col_skip = spec.col_mode == SideMode::AtMostOne ? 0.0 : kInf;
  cost.topRightCorner(n1, n1).setConstant(row_skip);
  cost.bottomLeftCorner(n2, n2).setConstant(col_skip);

  const auto row_to_col = min_cost_assignment(cost);
  AssignmentVector x = AssignmentVector::Zero(spec.size());
  for (Eigen::Index i1 = 0; i1 < n1; ++i1) {
    const Eigen::Index j = row_to_col[i1];
    if (j < n2) x(spec.index(i1, j)) = 1.0;
  }
  return x;
}

AssignmentVector discretize(const AssignmentVector& scores, const ConstraintSpec& spec) {
  if (scores.size() != spec.size()) throw std::invalid_argument("discretize: size mismatch");
  const bool rows_free = spec.row_mode == SideMode::Unconstrained;
  const bool cols_free = spec.col_mode == SideMode::Unconstrained;
  Eigen::Map<const Eigen::MatrixXd> mat(scores.data(), spec.n1, spec.n2);
  if (!rows_free && !cols_free) return hungarian(mat, spec);

  AssignmentVector x = AssignmentVector::Zero(spec.size());
  Eigen::Map<Eigen::MatrixXd> out(x.data(), spec.n1, spec.n2);
  if (rows_free && cols_free) {
    out = (mat.array() >= 0.5).cast<double>().matrix();
  } else if (cols_free) {
    for (Eigen::Index i = 0; i < spec.n1; ++i) {
      Eigen::Index best = 0;
      const double value = mat.row(i).maxCoeff(&best);
      if (spec.row_mode == SideMode::ExactlyOne || value > 0.0) out(i, best) = 1.0;
    }
  } else {
    for (Eigen::Index j = 0; j < spec.n2; ++j) {
      Eigen::Index best = 0;
      const double value = mat.col(j).maxCoeff(&best);
      if (spec.col_mode == SideMode::ExactlyOne || value > 0.0) out(best, j) = 1.0;
    }
  }
  return x;
}

double assignment_profit(const ProfitMatrix& profit, const AssignmentVector& x) {
  Eigen::Map<const Eigen::MatrixXd> mat(x.data(), profit.rows(), profit.cols());
  double total = 0.0;
  for (Eigen::Index j = 0; j < profit.cols(); ++j) {
    for (Eigen::Index i = 0; i < profit.rows(); ++i) {
      if (mat(i, j) != 0.0) total += profit(i, j) * mat(i, j);
    }
  }
  return total;
}

std::uint64_t oracle_candidates(const ConstraintSpec& spec, const OracleLimits& limits) {
  spec.validate();
  if (spec.row_mode == SideMode::Unconstrained || spec.col_mode == SideMode::Unconstrained) {
    throw OracleRefusal("oracle: many-to-many matching is not enumerated");
  }
  const Eigen::Index small = std::min(spec.n1, spec.n2);
  const Eigen::Index large = std::max(spec.n1, spec.n2);
  const bool full = spec.row_mode == SideMode::ExactlyOne || spec.col_mode == SideMode::ExactlyOne;
  const std::string size = std::to_string(spec.n1) + "x" + std::to_string(spec.n2);
  if (full && small > limits.max_full_side) {
    throw OracleRefusal("oracle: " + size + " exceeds the enumeration limit (smaller side " +
                        std::to_string(small) + " > " + std::to_string(limits.max_full_side) + ")");
  }
  if (!full && large > limits.max_occlusion_side) {
    throw OracleRefusal("oracle: " + size + " with occlusion exceeds the enumeration limit (" +
                        std::to_string(large) + " > " + std::to_string(limits.max_occlusion_side) + ")");
  }
  const double count = enumeration_count(small, large, !full);
  if (count > static_cast<double>(limits.max_candidates)) {
    throw OracleRefusal("oracle: " + size + " needs " + std::to_string(count) +
                        " candidates, limit is " + std::to_string(limits.max_candidates));
  }
  return static_cast<std::uint64_t>(count);
}

OracleResult brute_force_optimum(const MatchingInstance& instance, const OracleLimits& limits) {
  instance.validate();
  const ConstraintSpec& spec = instance.spec;
  oracle_candidates(spec, limits);

  const bool maximize = instance.sense == Sense::Maximize;
  const bool row_optional = spec.row_mode == SideMode::AtMostOne;
  const bool cols_exact = spec.col_mode == SideMode::ExactlyOne;

  OracleResult best;
  bool have_best = false;
  AssignmentVector x = AssignmentVector::Zero(spec.size());
  std::vector<char> col_used(static_cast<std::size_t>(spec.n2), 0);
  Eigen::Index cols_taken = 0;

  auto consider = [&]() {
    if (cols_exact && cols_taken != spec.n2) return;
    ++best.candidates;
    const double e = energy(instance, x);
    const bool better = !have_best || (maximize ? e > best.energy : e < best.energy) ||
                        (e == best.energy && lexicographically_less(x, best.assignment));
    if (better) {
      best.assignment = x;
      best.energy = e;
      have_best = true;
    }
  };

  auto recurse = [&](auto&& self, Eigen::Index row) -> void {
    if (row == spec.n1) {
      consider();
      return;
    }
    // Columns still uncovered must fit in the remaining rows.
    if (cols_exact && spec.n2 - cols_taken > spec.n1 - row) return;
    if (row_optional) self(self, row + 1);
    for (Eigen::Index j = 0; j < spec.n2; ++j) {
      if (col_used[j]) continue;
      col_used[j] = 1;
      ++cols_taken;
      x(spec.index(row, j)) = 1.0;
      self(self, row + 1);
      x(spec.index(row, j)) = 0.0;
      --cols_taken;
      col_used[j] = 0;
    }
  };
  recurse(recurse, 0);
  if (!have_best) throw std::logic_error("brute_force_optimum: no feasible assignment");
  return best;
}

}  // namespace adgm
