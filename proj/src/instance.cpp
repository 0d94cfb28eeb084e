#include "adgm/instance.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <vector>

namespace adgm {

void MatchingInstance::validate() const {
  spec.validate();
  if (potentials.empty()) throw std::invalid_argument("MatchingInstance: no potentials");
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    const auto& F = potentials[k];
    if (F.order() != static_cast<int>(k + 1)) {
      throw std::invalid_argument("MatchingInstance: potential " + std::to_string(k + 1) +
                                  " has order " + std::to_string(F.order()));
    }
    if (F.dim() != spec.size()) {
      throw std::invalid_argument("MatchingInstance: potential of order " + std::to_string(k + 1) +
                                  " has dim " + std::to_string(F.dim()) + ", expected " +
                                  std::to_string(spec.size()));
    }
  }
  if (ground_truth && ground_truth->size() != spec.size()) {
    throw std::invalid_argument("MatchingInstance: ground truth has wrong length");
  }
}

MatchingInstance make_instance(const ConstraintSpec& spec, int max_order, Sense sense) {
  MatchingInstance instance;
  instance.spec = spec;
  instance.sense = sense;
  for (int d = 1; d <= max_order; ++d) instance.potentials.emplace_back(d, spec.size());
  return instance;
}

double energy(const MatchingInstance& instance, const AssignmentVector& x) {
  if (x.size() != instance.size()) {
    throw std::invalid_argument("energy: assignment of length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(instance.size()));
  }
  double total = 0.0;
  for (const auto& F : instance.potentials) total += homogeneous_form(F, x);
  return total;
}

MatchingInstance to_minimization(const MatchingInstance& instance, std::size_t max_entries) {
  if (instance.sense == Sense::Minimize) {
    std::clog << "warning: to_minimization called on a minimization instance; left unchanged\n";
    return instance;
  }
  const auto n = static_cast<std::size_t>(instance.size());
  std::vector<std::size_t> cells;
  std::size_t total = 0;
  for (const auto& F : instance.potentials) {
    std::size_t count = 1;
    for (int m = 0; m < F.order(); ++m) {
      if (count > max_entries / n) throw std::length_error("to_minimization: dense form too large");
      count *= n;
    }
    total += count;
    if (total > max_entries) throw std::length_error("to_minimization: dense form too large");
    cells.push_back(count);
  }

  std::vector<std::vector<double>> dense;
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instance.potentials.size(); ++k) {
    auto F = instance.potentials[k];
    F.canonicalize();
    std::vector<double> values(cells[k], 0.0);
    for (std::size_t e = 0; e < F.size(); ++e) {
      std::size_t flat = 0;
      for (auto i : F.index(e)) flat = flat * n + static_cast<std::size_t>(i);
      values[flat] = F.value(e);
    }
    vmax = std::max(vmax, *std::max_element(values.begin(), values.end()));
    dense.push_back(std::move(values));
  }

  MatchingInstance out = instance;
  std::vector<Eigen::Index> idx;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    const int order = static_cast<int>(k + 1);
    SparseTensord G(order, instance.size());
    idx.assign(static_cast<std::size_t>(order), 0);
    for (std::size_t flat = 0; flat < dense[k].size(); ++flat) {
      const double v = vmax - dense[k][flat];
      if (v != 0.0) {
        std::size_t rest = flat;
        for (int m = order - 1; m >= 0; --m) {
          idx[static_cast<std::size_t>(m)] = static_cast<Eigen::Index>(rest % n);
          rest /= n;
        }
        G.add(std::span<const Eigen::Index>(idx), v);
      }
    }
    G.canonicalize();
    out.potentials[k] = std::move(G);
  }
  out.sense = Sense::Minimize;
  out.max_shift = vmax;
  return out;
}

AssignmentVector assignment_from_map(const std::vector<Eigen::Index>& row_to_col,
                                     const ConstraintSpec& spec) {
  if (static_cast<Eigen::Index>(row_to_col.size()) != spec.n1) {
    throw std::invalid_argument("assignment_from_map: map size differs from n1");
  }
  AssignmentVector x = AssignmentVector::Zero(spec.size());
  for (Eigen::Index i1 = 0; i1 < spec.n1; ++i1) {
    const Eigen::Index i2 = row_to_col[static_cast<std::size_t>(i1)];
    if (i2 < 0) continue;
    if (i2 >= spec.n2) throw std::invalid_argument("assignment_from_map: column out of range");
    if (x.segment(i2 * spec.n1, spec.n1).sum() > 0.0) {
      throw std::invalid_argument("assignment_from_map: column " + std::to_string(i2) + " used twice");
    }
    x(spec.index(i1, i2)) = 1.0;
  }
  return x;
}

std::vector<Eigen::Index> map_from_assignment(const AssignmentVector& x, const ConstraintSpec& spec) {
  std::vector<Eigen::Index> map(static_cast<std::size_t>(spec.n1), -1);
  for (Eigen::Index i2 = 0; i2 < spec.n2; ++i2) {
    for (Eigen::Index i1 = 0; i1 < spec.n1; ++i1) {
      if (x(spec.index(i1, i2)) > 0.5) map[static_cast<std::size_t>(i1)] = i2;
    }
  }
  return map;
}

}  // namespace adgm
