#ifndef ADGM_IO_HPP
#define ADGM_IO_HPP

#include "adgm/instance.hpp"
#include "adgm/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace adgm {

// Self-describing instance container:
//
//   adgm-instance 1
//   n1 <n1>
//   n2 <n2>
//   rows exactly_one|at_most_one|unconstrained
//   cols exactly_one|at_most_one|unconstrained
//   sense minimize|maximize
//   truth <col of row 0> ... <col of row n1-1>     (optional, -1 = unmatched)
//   max_shift <value>                              (optional)
//   potentials <D>
//   order 1 dim <n>
//   <i> <value>
//   ...
//   order D dim <n>
//   ...
void write_instance(std::ostream& os, const MatchingInstance& instance);
MatchingInstance read_instance(std::istream& is);

MatchingInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const MatchingInstance& instance);

// Solution file: key/value summary followed by `match i1 i2` lines.
void write_solution(std::ostream& os, const SolverResult& result, const ConstraintSpec& spec);

// Ground-truth correspondence file: `i1 i2` per matched pair.
void write_correspondences(std::ostream& os, const std::vector<Eigen::Index>& row_to_col);
std::vector<Eigen::Index> read_correspondences(std::istream& is, Eigen::Index n1);

}  // namespace adgm

#endif  // ADGM_IO_HPP
