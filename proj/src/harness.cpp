#include "adgm/harness.hpp"

#include "adgm/discretize.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

namespace adgm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw std::invalid_argument("config: `" + key + "` expects a number, got `" + value + "`");
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v)) throw std::invalid_argument("config: `" + key + "` expects an integer");
  return static_cast<long>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: `" + key + "` expects true/false");
}

// "0,5,10" or "first:last:step".
std::vector<long> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<long> out;
  if (value.find(':') != std::string::npos) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) throw std::invalid_argument("config: `" + key + "` range must be first:last:step");
    const long first = to_long(key, parts[0]), last = to_long(key, parts[1]), step = to_long(key, parts[2]);
    if (step <= 0) throw std::invalid_argument("config: `" + key + "` step must be positive");
    for (long v = first; v <= last; v += step) out.push_back(v);
  } else {
    for (const auto& part : split(value, ',')) out.push_back(to_long(key, part));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t sweep_index, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sweep_index), static_cast<std::uint32_t>(trial)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return {};
  std::ostringstream os;
  os.precision(12);
  os << *v;
  return os.str();
}

bool same_energy(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

Eigen::Vector2d Transform::apply(const Eigen::Vector2d& x) const {
  return scale * (Eigen::Rotation2Dd(rotation) * x) + translation;
}

SyntheticPair generate_synthetic(Eigen::Index n_inliers, Eigen::Index n_outliers, double noise_sigma,
                                 const Transform& transform, std::uint64_t seed) {
  if (n_inliers < 1) throw std::invalid_argument("generate_synthetic: need at least one inlier");
  if (n_outliers < 0) throw std::invalid_argument("generate_synthetic: negative outlier count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);

  SyntheticPair pair;
  pair.first.coords.resize(2, n_inliers);
  for (Eigen::Index i = 0; i < n_inliers; ++i) pair.first.coords.col(i) << unit(rng), unit(rng);

  const Eigen::Index n2 = n_inliers + n_outliers;
  Eigen::Matrix2Xd images(2, n2);
  for (Eigen::Index i = 0; i < n_inliers; ++i) {
    Eigen::Vector2d y = transform.apply(pair.first[i]);
    if (noise_sigma > 0.0) y += Eigen::Vector2d(noise(rng), noise(rng));
    images.col(i) = y;
  }
  for (Eigen::Index o = 0; o < n_outliers; ++o) {
    const Eigen::Vector2d u(unit(rng), unit(rng));
    images.col(n_inliers + o) = transform.apply(u);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n2));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  pair.second.coords.resize(2, n2);
  pair.truth.assign(static_cast<std::size_t>(n_inliers), -1);
  for (Eigen::Index slot = 0; slot < n2; ++slot) {
    const Eigen::Index src = order[static_cast<std::size_t>(slot)];
    pair.second.coords.col(slot) = images.col(src);
    if (src < n_inliers) pair.truth[static_cast<std::size_t>(src)] = slot;
  }
  return pair;
}

double accuracy(const AssignmentVector& result, const AssignmentVector& truth, Eigen::Index n_inliers) {
  if (result.size() != truth.size()) throw std::invalid_argument("accuracy: size mismatch");
  if (n_inliers <= 0) return 0.0;
  Eigen::Index correct = 0;
  for (Eigen::Index a = 0; a < truth.size(); ++a) {
    if (truth(a) > 0.5 && result(a) > 0.5) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_inliers);
}

std::string to_string(ModelKind model) {
  switch (model) {
    case ModelKind::A:
      return "a";
    case ModelKind::B:
      return "b";
    case ModelKind::C:
      return "c";
    case ModelKind::Third:
      return "third";
  }
  return "?";
}

ModelKind parse_model(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "a") return ModelKind::A;
  if (t == "b") return ModelKind::B;
  if (t == "c") return ModelKind::C;
  if (t == "third" || t == "3") return ModelKind::Third;
  throw std::invalid_argument("unknown model `" + text + "`");
}

MatchingInstance build_model(ModelKind model, const SyntheticPair& pair, const ModelParams& params) {
  MatchingInstance instance;
  switch (model) {
    case ModelKind::A: {
      const Eigen::MatrixXd unary = Eigen::MatrixXd::Zero(pair.first.size(), pair.second.size());
      instance = build_pairwise_A(pair.first, pair.second, delaunay_edges(pair.first),
                                  delaunay_edges(pair.second), unary, params.a, params.sides);
      break;
    }
    case ModelKind::B:
      instance = build_pairwise_B(pair.first, pair.second, params.sigma2, params.sides);
      break;
    case ModelKind::C:
      instance = build_pairwise_C(pair.first, pair.second, params.eta_c, params.sides);
      break;
    case ModelKind::Third:
      instance = build_third_order(pair.first, pair.second, params.third, params.sides);
      break;
  }
  instance.ground_truth = assignment_from_map(pair.truth, instance.spec);
  return instance;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be at least 1");
  if (settings.empty()) throw std::invalid_argument("experiment: empty sweep");
  if (settings.size() != sweep_values.size()) throw std::invalid_argument("experiment: sweep values mismatch");
  for (const auto& [inliers, outliers] : settings) {
    if (inliers < 1 || outliers < 0) throw std::invalid_argument("experiment: invalid sweep setting");
    if (model == ModelKind::Third && inliers < 3) {
      throw std::invalid_argument("experiment: the third-order model needs at least 3 inliers");
    }
  }
  if (solvers.empty()) throw std::invalid_argument("experiment: no solver configured");
  for (const auto& s : solvers) s.config.validate();
  if (!(extent > 0.0)) throw std::invalid_argument("experiment: extent must be positive");
}

ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig config;
  std::optional<long> inliers;
  std::vector<long> outliers{0};
  std::vector<long> subset_sizes;
  std::optional<long> total;
  std::vector<std::string> variants{"adgm1"};
  SolverConfig base;

  std::string line;
  while (std::getline(is, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value, got `" + line + "`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model") config.model = parse_model(value);
    else if (key == "inliers") inliers = to_long(key, value);
    else if (key == "outliers") outliers = parse_int_list(key, value);
    else if (key == "subset_sizes") subset_sizes = parse_int_list(key, value);
    else if (key == "total") total = to_long(key, value);
    else if (key == "trials") config.trials = static_cast<int>(to_long(key, value));
    else if (key == "noise") config.noise = to_double(key, value);
    else if (key == "rotation") config.transform.rotation = to_double(key, value);
    else if (key == "scale") config.transform.scale = to_double(key, value);
    else if (key == "translate_x") config.transform.translation.x() = to_double(key, value);
    else if (key == "translate_y") config.transform.translation.y() = to_double(key, value);
    else if (key == "extent") config.extent = to_double(key, value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_long(key, value));
    else if (key == "variants") variants = split(value, ',');
    else if (key == "rows" || key == "cols") {
      if (!config.params.sides) config.params.sides = Sides{};
      (key == "rows" ? config.params.sides->rows : config.params.sides->cols) = parse_side_mode(value);
    }
    else if (key == "eta") config.params.a.eta = config.params.eta_c = to_double(key, value);
    else if (key == "sigma2") config.params.sigma2 = to_double(key, value);
    else if (key == "sigma_l") config.params.a.sigma_l = to_double(key, value);
    else if (key == "sigma_a") config.params.a.sigma_a = to_double(key, value);
    else if (key == "unary_offset") config.params.a.unary_offset = to_double(key, value);
    else if (key == "knn") config.params.third.knn = static_cast<std::size_t>(to_long(key, value));
    else if (key == "triangles") config.params.third.triangle_budget = static_cast<std::size_t>(to_long(key, value));
    else if (key == "gamma") config.params.third.gamma = to_double(key, value);
    else if (key == "rho0") base.rho0 = to_double(key, value);
    else if (key == "t1") base.t1 = static_cast<int>(to_long(key, value));
    else if (key == "t2") base.t2 = static_cast<int>(to_long(key, value));
    else if (key == "beta") base.beta = to_double(key, value);
    else if (key == "eps") base.eps = to_double(key, value);
    else if (key == "max_iter") base.max_iter = static_cast<int>(to_long(key, value));
    else if (key == "oracle") config.oracle = to_bool(key, value);
    else if (key == "plot") config.plot = to_bool(key, value);
    else if (key == "out") config.out_dir = value;
    else throw std::invalid_argument("config: unknown key `" + key + "`");
  }

  if (!subset_sizes.empty()) {
    if (!total) throw std::invalid_argument("config: subset_sizes needs `total`");
    config.sweep_name = "inliers";
    for (long s : subset_sizes) {
      if (s > *total) throw std::invalid_argument("config: subset size exceeds total");
      config.settings.emplace_back(s, *total - s);
      config.sweep_values.push_back(static_cast<double>(s));
    }
  } else {
    if (!inliers) throw std::invalid_argument("config: `inliers` is required");
    config.sweep_name = "outliers";
    for (long o : outliers) {
      config.settings.emplace_back(*inliers, o);
      config.sweep_values.push_back(static_cast<double>(o));
    }
  }
  for (const auto& v : variants) {
    SolverConfig s = base;
    s.variant = parse_variant(v);
    config.solvers.push_back({to_string(s.variant), s});
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open experiment config " + path.string());
  return parse_experiment_config(in);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  for (std::size_t s = 0; s < config.settings.size(); ++s) {
    const auto [n_inliers, n_outliers] = config.settings[s];
    bool refusal_logged = false;
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t seed = trial_seed(config.seed, s, t);
      SyntheticPair pair = generate_synthetic(n_inliers, n_outliers, config.noise, config.transform, seed);
      pair.first.coords *= config.extent;
      pair.second.coords *= config.extent;
      ModelParams params = config.params;
      params.third.seed = seed;
      const MatchingInstance instance = build_model(config.model, pair, params);
      const double truth_energy = energy(instance, *instance.ground_truth);

      std::optional<double> optimum;
      if (config.oracle) {
        try {
          optimum = brute_force_optimum(instance).energy;
        } catch (const OracleRefusal& refusal) {
          if (!refusal_logged) std::clog << "oracle skipped: " << refusal.what() << '\n';
          refusal_logged = true;
        }
      }

      const std::string id = config.sweep_name.substr(0, 1) + std::to_string(static_cast<long>(config.sweep_values[s])) +
                             "-t" + std::to_string(t);
      for (const auto& solver : config.solvers) {
        const SolverResult result = solve(instance, solver.config);
        TrialReport row;
        row.instance_id = id;
        row.method = solver.name;
        row.sweep_value = config.sweep_values[s];
        row.objective = result.energy_discrete;
        if (truth_energy != 0.0) row.objective_ratio = result.energy_discrete / truth_energy;
        row.accuracy = accuracy(result.discrete, *instance.ground_truth, n_inliers);
        row.matched = static_cast<Eigen::Index>(std::lround(result.discrete.sum()));
        row.iterations = result.iterations;
        row.converged = result.converged;
        row.time_ms = 1000.0 * result.wall_time;
        row.rho_increases = result.rho_increases.size();
        row.optimum = optimum;
        if (optimum) row.global_opt = same_energy(result.energy_discrete, *optimum);
        report.trials.push_back(row);
      }
    }
  }

  // Summary in sweep order, then solver order.
  for (std::size_t s = 0; s < config.settings.size(); ++s) {
    for (const auto& solver : config.solvers) {
      SummaryRow row;
      row.sweep_value = config.sweep_values[s];
      row.method = solver.name;
      double ratio_sum = 0.0, opt_hits = 0.0;
      int ratio_count = 0, opt_count = 0;
      for (const auto& t : report.trials) {
        if (t.sweep_value != row.sweep_value || t.method != row.method) continue;
        ++row.trials;
        row.mean_objective += t.objective;
        row.mean_accuracy += t.accuracy;
        row.mean_matched += static_cast<double>(t.matched);
        row.mean_iterations += t.iterations;
        row.converged_fraction += t.converged ? 1.0 : 0.0;
        row.mean_time_ms += t.time_ms;
        if (t.objective_ratio) {
          ratio_sum += *t.objective_ratio;
          ++ratio_count;
        }
        if (t.global_opt) {
          opt_hits += *t.global_opt ? 1.0 : 0.0;
          ++opt_count;
        }
      }
      if (row.trials == 0) continue;
      const double n = row.trials;
      row.mean_objective /= n;
      row.mean_accuracy /= n;
      row.mean_matched /= n;
      row.mean_iterations /= n;
      row.converged_fraction /= n;
      row.mean_time_ms /= n;
      if (ratio_count > 0) row.mean_objective_ratio = ratio_sum / ratio_count;
      if (opt_count > 0) row.global_opt_pct = 100.0 * opt_hits / opt_count;
      report.summary.push_back(row);
    }
  }

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    auto open = [&](const char* name) {
      std::ofstream out(config.out_dir / name);
      if (!out) throw std::runtime_error("cannot write " + (config.out_dir / name).string());
      return out;
    };
    {
      auto out = open("trials.csv");
      write_trials_csv(out, report.trials);
    }
    {
      auto out = open("summary.csv");
      write_summary_csv(out, config.sweep_name, report.summary);
    }
    {
      auto out = open("oracle.csv");
      write_oracle_csv(out, report.trials);
    }
    if (config.plot) {
      auto out = open("plot.py");
      write_plot_script(out, config.sweep_name);
    }
  }
  return report;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialReport>& trials) {
  os << kTrialCsvHeader << '\n';
  const auto old_precision = os.precision(12);
  for (const auto& t : trials) {
    os << t.instance_id << ',' << t.method << ',' << t.objective << ',' << format_optional(t.objective_ratio)
       << ',' << t.accuracy << ',' << t.matched << ',' << t.iterations << ',' << (t.converged ? 1 : 0) << ','
       << t.time_ms << '\n';
  }
  os.precision(old_precision);
}

void write_summary_csv(std::ostream& os, const std::string& sweep_name, const std::vector<SummaryRow>& rows) {
  os << sweep_name
     << ",method,trials,mean_objective,mean_objective_ratio,mean_accuracy,mean_matched,mean_iterations,"
        "converged_fraction,mean_time_ms,global_opt_pct\n";
  const auto old_precision = os.precision(12);
  for (const auto& r : rows) {
    os << r.sweep_value << ',' << r.method << ',' << r.trials << ',' << r.mean_objective << ','
       << format_optional(r.mean_objective_ratio) << ',' << r.mean_accuracy << ',' << r.mean_matched << ','
       << r.mean_iterations << ',' << r.converged_fraction << ',' << r.mean_time_ms << ','
       << format_optional(r.global_opt_pct) << '\n';
  }
  os.precision(old_precision);
}

void write_oracle_csv(std::ostream& os, const std::vector<TrialReport>& trials) {
  os << "instance_id,method,objective,optimum,global_opt\n";
  const auto old_precision = os.precision(12);
  for (const auto& t : trials) {
    os << t.instance_id << ',' << t.method << ',' << t.objective << ',' << format_optional(t.optimum) << ','
       << (t.global_opt ? (*t.global_opt ? "1" : "0") : "") << '\n';
  }
  os.precision(old_precision);
}

void write_plot_script(std::ostream& os, const std::string& sweep_name) {
  os << R"(#!/usr/bin/env python3
# Plots mean accuracy and mean objective per method from summary.csv.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "summary.csv"))))
sweep = ")" << sweep_name << R"("
methods = sorted({r["method"] for r in rows})
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for m in methods:
    sel = [r for r in rows if r["method"] == m]
    xs = [float(r[sweep]) for r in sel]
    axes[0].plot(xs, [float(r["mean_accuracy"]) for r in sel], marker="o", label=m)
    axes[1].plot(xs, [float(r["mean_objective"]) for r in sel], marker="o", label=m)
axes[0].set_ylabel("accuracy")
axes[1].set_ylabel("objective")
for ax in axes:
    ax.set_xlabel(sweep)
    ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "summary.png"))
)";
}

}  // namespace adgm
