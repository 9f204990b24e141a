#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spaceopt/rng.hpp"
#include "spaceopt/scoring.hpp"
#include "spaceopt/search_space.hpp"

namespace spaceopt::bench {

/// Branin on R^2 (canonical constants); global minimum 0.397887 at
/// (pi, 2.275), (-pi, 12.275) and (9.42478, 2.475).
double branin(const Eigen::VectorXd& x);

/// Canonical 4-term Hartmann-6 on [0,1]^6; global minimum -3.32237.
/// Throws an out-of-domain error outside the unit cube.
double hartmann6(const Eigen::VectorXd& x);

double sphere(const Eigen::VectorXd& x);

SearchSpace branin_space();     // [[-5,10],[0,15]]
SearchSpace hartmann6_space();  // [0,1]^6
SearchSpace sphere_space(int d, double lo = -1.0, double hi = 1.0);

/// A named synthetic objective with optional additive Gaussian observation
/// noise. Noise draws come from the caller's stream, so evaluations stay
/// deterministic and order-independent.
struct SyntheticObjective {
  std::string name;
  double noise_sd = 0.0;
  std::function<double(const Eigen::VectorXd&)> f;
  SearchSpace base;

  double noiseless(const Eigen::VectorXd& x) const { return f(x); }
  double operator()(const Eigen::VectorXd& x, Rng& rng) const {
    const double v = f(x);
    return noise_sd > 0.0 ? v + noise_sd * rng.normal() : v;
  }
  NoisyObjective as_noisy() const {
    return [*this](const Eigen::VectorXd& x, Rng& rng) { return (*this)(x, rng); };
  }
};

/// Registry: branin, hartmann6, sphere, constant. Throws ValidationError for
/// unknown names, listing the known ones.
SyntheticObjective make_objective(const std::string& name, double noise_sd = 0.0);
std::vector<std::string> objective_names();

/// Piecewise-constant objective on [0,1]: cell i of N equal cells takes
/// values[i]. Uniform sampling hits each value with probability 1/N, which
/// makes the order-statistics oracle below exact for it.
SyntheticObjective grid_table_objective(std::vector<double> values);

/// Trajectory of one sampling run.
struct StudyLog {
  std::vector<Observation> evals;
  std::vector<double> best_curve;  // running minimum, same length as evals
  std::optional<int> phase_boundary;
};

/// n uniform evaluations in order, with the running best. Evaluation i uses
/// its own stream derived from (seed, eval_offset + i), so a run of n points
/// extends a run of fewer points and phases can share one numbering.
StudyLog random_search(const NoisyObjective& objective, const SearchSpace& space,
                       int n, RngSeed seed, int eval_offset = 0);

/// As random_search, but "evaluations" draw rows uniformly with replacement
/// from the table rows inside the space (offline stand-in for fresh queries).
StudyLog tabular_random_search(const Dataset& table, const SearchSpace& space,
                               int n, RngSeed seed, int eval_offset = 0);

/// Per-step mean and standard error of best-so-far curves across repeats.
struct CurveStats {
  std::vector<double> mean;
  std::vector<double> std_error;
  int n_repeats = 0;
};

/// Aligned aggregation of best-so-far curves; all logs must have equal
/// length (argument error otherwise) and there must be at least two.
CurveStats aggregate_curves(const std::vector<StudyLog>& logs);

/// Runs `experiment` n_repeats times with derived per-repeat seeds (repeats
/// may run concurrently) and aggregates the best curves.
CurveStats replicate(const std::function<StudyLog(RngSeed)>& experiment,
                     int n_repeats, RngSeed seed, int n_threads = 0);

/// Closed-form E[max(0, incumbent - Y)], Y ~ N(mu, sigma^2); for sigma = 0
/// this is max(0, incumbent - mu). Validation oracle for single-point EI.
double single_point_ei_oracle(double mu, double sigma, double incumbent);

/// Exact E[max(0, incumbent - min of b uniform-with-replacement draws)] over
/// a finite value set, via order statistics.
double grid_min_order_statistics_oracle(std::vector<double> values, Budget b,
                                        double incumbent);

double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace spaceopt::bench
