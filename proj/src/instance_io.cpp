#include "adgm/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace adgm {

void write_instance(std::ostream& os, const MatchingInstance& instance) {
  os << "adgm-instance 1\n";
  os << "n1 " << instance.n1() << "\nn2 " << instance.n2() << '\n';
  os << "rows " << to_string(instance.spec.row_mode) << "\ncols " << to_string(instance.spec.col_mode) << '\n';
  os << "sense " << (instance.sense == Sense::Minimize ? "minimize" : "maximize") << '\n';
  if (instance.ground_truth) {
    os << "truth";
    for (auto col : map_from_assignment(*instance.ground_truth, instance.spec)) os << ' ' << col;
    os << '\n';
  }
  if (instance.max_shift) {
    const auto old_precision = os.precision(17);
    os << "max_shift " << *instance.max_shift << '\n';
    os.precision(old_precision);
  }
  os << "potentials " << instance.max_order() << '\n';
  for (const auto& F : instance.potentials) write_tensor(os, F);
}

MatchingInstance read_instance(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("adgm-instance", 0) != 0) {
    throw std::invalid_argument("read_instance: missing `adgm-instance` header");
  }
  MatchingInstance instance;
  std::vector<Eigen::Index> truth;
  bool have_truth = false;
  int order = -1;
  while (order < 0 && std::getline(is, line)) {
    std::istringstream row(line);
    std::string key;
    if (!(row >> key) || key[0] == '#') continue;
    if (key == "n1") {
      row >> instance.spec.n1;
    } else if (key == "n2") {
      row >> instance.spec.n2;
    } else if (key == "rows" || key == "cols") {
      std::string mode;
      row >> mode;
      (key == "rows" ? instance.spec.row_mode : instance.spec.col_mode) = parse_side_mode(mode);
    } else if (key == "sense") {
      std::string sense;
      row >> sense;
      if (sense != "minimize" && sense != "maximize") {
        throw std::invalid_argument("read_instance: unknown sense `" + sense + "`");
      }
      instance.sense = sense == "minimize" ? Sense::Minimize : Sense::Maximize;
    } else if (key == "truth") {
      have_truth = true;
      Eigen::Index col;
      while (row >> col) truth.push_back(col);
    } else if (key == "max_shift") {
      double shift;
      row >> shift;
      instance.max_shift = shift;
    } else if (key == "potentials") {
      row >> order;
    } else {
      throw std::invalid_argument("read_instance: unknown key `" + key + "`");
    }
    if (row.fail() && !row.eof()) throw std::invalid_argument("read_instance: malformed line `" + line + "`");
  }
  if (order < 1) throw std::invalid_argument("read_instance: missing `potentials D` line");
  instance.spec.validate();
  for (int d = 1; d <= order; ++d) instance.potentials.push_back(read_tensor<double>(is));
  if (have_truth) instance.ground_truth = assignment_from_map(truth, instance.spec);
  instance.validate();
  return instance;
}

MatchingInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file " + path.string());
  return read_instance(in);
}

void save_instance(const std::filesystem::path& path, const MatchingInstance& instance) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance file " + path.string());
  write_instance(out, instance);
}

void write_solution(std::ostream& os, const SolverResult& result, const ConstraintSpec& spec) {
  const auto old_precision = os.precision(17);
  os << "energy_discrete " << result.energy_discrete << '\n';
  os << "energy_continuous " << result.energy_continuous << '\n';
  os << "iterations " << result.iterations << '\n';
  os << "converged " << (result.converged ? 1 : 0) << '\n';
  os << "final_rho " << result.final_rho << '\n';
  os.precision(old_precision);
  const auto map = map_from_assignment(result.discrete, spec);
  for (std::size_t i1 = 0; i1 < map.size(); ++i1) {
    if (map[i1] >= 0) os << "match " << i1 << ' ' << map[i1] << '\n';
  }
}

void write_correspondences(std::ostream& os, const std::vector<Eigen::Index>& row_to_col) {
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) os << i << ' ' << row_to_col[i] << '\n';
  }
}

std::vector<Eigen::Index> read_correspondences(std::istream& is, Eigen::Index n1) {
  std::vector<Eigen::Index> map(static_cast<std::size_t>(n1), -1);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    Eigen::Index i, j;
    if (!(row >> i >> j)) continue;
    if (i < 0 || i >= n1) throw std::invalid_argument("read_correspondences: row out of range");
    map[static_cast<std::size_t>(i)] = j;
  }
  return map;
}

}  // namespace adgm
