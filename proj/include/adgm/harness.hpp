#ifndef ADGM_HARNESS_HPP
#define ADGM_HARNESS_HPP

#include "adgm/models.hpp"
#include "adgm/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adgm {

struct Transform {
  double rotation = 0.0;  // radians
  double scale = 1.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Vector2d apply(const Eigen::Vector2d& x) const;
};

struct SyntheticPair {
  PointSet first;
  PointSet second;
  // truth[i] is the index in `second` of the image of first[i].
  std::vector<Eigen::Index> truth;
};

// Inliers uniform in the unit square; the second set holds their transformed,
// noisy images plus outliers drawn uniformly in the transformed unit square,
// randomly permuted.
SyntheticPair generate_synthetic(Eigen::Index n_inliers, Eigen::Index n_outliers, double noise_sigma,
                                 const Transform& transform, std::uint64_t seed);

// Fraction of the n_inliers true correspondences present in result.
double accuracy(const AssignmentVector& result, const AssignmentVector& truth, Eigen::Index n_inliers);

enum class ModelKind { A, B, C, Third };

std::string to_string(ModelKind model);
ModelKind parse_model(const std::string& text);

struct ModelParams {
  ModelAParams a;
  double sigma2 = kModelBSigma2;
  double eta_c = 0.5;
  ThirdOrderOptions third;
  std::optional<Sides> sides;
};

// Builds the chosen model for a synthetic pair (model A uses zero unaries
// and Delaunay edges) and attaches the ground truth.
MatchingInstance build_model(ModelKind model, const SyntheticPair& pair, const ModelParams& params);

struct NamedSolver {
  std::string name;
  SolverConfig config;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::C;
  // One (inliers, outliers) pair per sweep value.
  std::string sweep_name = "outliers";
  std::vector<double> sweep_values;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> settings;
  int trials = 1;
  double noise = 0.0;
  Transform transform;
  double extent = 1.0;  // coordinates are multiplied by this before modelling
  ModelParams params;
  std::vector<NamedSolver> solvers;
  std::uint64_t seed = 0;
  bool oracle = true;
  bool plot = true;
  std::filesystem::path out_dir;

  void validate() const;
};

// key = value lines; '#' starts a comment. See docs/formats.md.
ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct TrialReport {
  std::string instance_id;
  std::string method;
  double sweep_value = 0.0;
  double objective = 0.0;
  std::optional<double> objective_ratio;  // only when the ground-truth energy is nonzero
  double accuracy = 0.0;
  Eigen::Index matched = 0;
  int iterations = 0;
  bool converged = false;
  double time_ms = 0.0;
  std::size_t rho_increases = 0;
  std::optional<double> optimum;  // brute-force optimum, when within limits
  std::optional<bool> global_opt;
};

struct SummaryRow {
  double sweep_value = 0.0;
  std::string method;
  int trials = 0;
  double mean_objective = 0.0;
  std::optional<double> mean_objective_ratio;
  double mean_accuracy = 0.0;
  double mean_matched = 0.0;
  double mean_iterations = 0.0;
  double converged_fraction = 0.0;
  double mean_time_ms = 0.0;
  std::optional<double> global_opt_pct;
};

struct ExperimentReport {
  std::vector<TrialReport> trials;
  std::vector<SummaryRow> summary;
};

inline constexpr const char* kTrialCsvHeader =
    "instance_id,method,objective,objective_ratio,accuracy,matched,iterations,converged,time_ms";

// Runs every (sweep value, trial, solver) combination. When out_dir is set,
// writes trials.csv, summary.csv, oracle.csv and (optionally) plot.py there.
ExperimentReport run_experiment(const ExperimentConfig& config);

void write_trials_csv(std::ostream& os, const std::vector<TrialReport>& trials);
void write_summary_csv(std::ostream& os, const std::string& sweep_name, const std::vector<SummaryRow>& rows);
void write_oracle_csv(std::ostream& os, const std::vector<TrialReport>& trials);
void write_plot_script(std::ostream& os, const std::string& sweep_name);

}  // namespace adgm

#endif  // ADGM_HARNESS_HPP
