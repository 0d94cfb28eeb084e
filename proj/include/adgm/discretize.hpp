#ifndef ADGM_DISCRETIZE_HPP
#define ADGM_DISCRETIZE_HPP

#include "adgm/constraints.hpp"
#include "adgm/instance.hpp"

#include <cstdint>
#include <stdexcept>

namespace adgm {

// n1 x n2 profits for matching row node i1 to column node i2.
using ProfitMatrix = Eigen::MatrixXd;

// Thrown when the exhaustive oracle would exceed its enumeration limits.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for constraint combinations an operation does not support.
class Unsupported : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Maximum-profit hard assignment under spec (AtMostOne / ExactlyOne sides
// only). Unmatched nodes are realized through zero-profit dummy rows and
// columns of an (n1+n2) square problem; O((n1+n2)^3).
AssignmentVector hungarian(const ProfitMatrix& profit, const ConstraintSpec& spec);

// Hard assignment maximizing the sum of scores[a]. Uses hungarian() when both
// sides are bounded. With exactly one unconstrained side every line of the
// bounded side independently keeps its best entry (only if positive when
// AtMostOne); with both sides unconstrained entries >= 0.5 are kept.
AssignmentVector discretize(const AssignmentVector& scores, const ConstraintSpec& spec);

double assignment_profit(const ProfitMatrix& profit, const AssignmentVector& x);

struct OracleLimits {
  // Largest smaller side when one side must be fully matched.
  Eigen::Index max_full_side = 7;
  // Largest side when both sides allow unmatched nodes.
  Eigen::Index max_occlusion_side = 5;
  std::uint64_t max_candidates = 20'000'000;
};

struct OracleResult {
  AssignmentVector assignment;
  double energy = 0.0;
  std::uint64_t candidates = 0;
};

// Number of hard assignments brute_force_optimum would enumerate; throws
// OracleRefusal when the instance exceeds the limits.
std::uint64_t oracle_candidates(const ConstraintSpec& spec, const OracleLimits& limits = {});

// Exact optimizer of energy() over hard assignments in the instance's sense;
// ties go to the lexicographically smallest assignment vector.
OracleResult brute_force_optimum(const MatchingInstance& instance, const OracleLimits& limits = {});

}  // namespace adgm

#endif  // ADGM_DISCRETIZE_HPP
