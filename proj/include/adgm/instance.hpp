#ifndef ADGM_INSTANCE_HPP
#define ADGM_INSTANCE_HPP

#include "adgm/constraints.hpp"
#include "adgm/tensor.hpp"

#include <optional>
#include <vector>

namespace adgm {

enum class Sense { Minimize, Maximize };

// A graph (or hypergraph) matching problem: potentials of orders 1..D over the
// n1*n2 assignment indices, side constraints and an optimization sense.
struct MatchingInstance {
  ConstraintSpec spec;
  // potentials[d-1] has order d; orders without potentials hold empty tensors.
  std::vector<SparseTensord> potentials;
  Sense sense = Sense::Minimize;
  std::optional<AssignmentVector> ground_truth;
  // Set by to_minimization(): the entry maximum the values were shifted by.
  std::optional<double> max_shift;

  Eigen::Index n1() const { return spec.n1; }
  Eigen::Index n2() const { return spec.n2; }
  Eigen::Index size() const { return spec.size(); }
  int max_order() const { return static_cast<int>(potentials.size()); }

  void validate() const;
};

// Empty instance with empty potentials of orders 1..max_order.
MatchingInstance make_instance(const ConstraintSpec& spec, int max_order, Sense sense);

// F^1(x) + F^2(x,x) + ... + F^D(x,...,x) with the potentials as stored, i.e.
// in the instance's own sense.
double energy(const MatchingInstance& instance, const AssignmentVector& x);

// Maximization potentials turned into minimization ones by v -> max - v over
// every index tuple of every order (implicit zeros included, so the result is
// dense), where max is the largest entry. Hard assignments with the same number
// of matches keep their ranking. Throws std::length_error when the dense form
// would exceed max_entries. A Minimize instance is returned unchanged, with a
// warning on std::clog.
inline constexpr std::size_t kMaxDenseEntries = std::size_t{1} << 24;
MatchingInstance to_minimization(const MatchingInstance& instance, std::size_t max_entries = kMaxDenseEntries);

// Hard assignment vector from a row -> column map; -1 marks an unmatched row.
AssignmentVector assignment_from_map(const std::vector<Eigen::Index>& row_to_col,
                                     const ConstraintSpec& spec);
std::vector<Eigen::Index> map_from_assignment(const AssignmentVector& x, const ConstraintSpec& spec);

}  // namespace adgm

#endif  // ADGM_INSTANCE_HPP
