#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "spaceopt/gp.hpp"
#include "spaceopt/search_space.hpp"

namespace spaceopt {

/// The four search-space score variants: batch expected improvement or batch
/// probability of improvement, aggregated over x-batches by mean or median.
enum class ScoreVariant { kMeanBEi, kMedianBEi, kMeanBPi, kMedianBPi };

std::string_view variant_name(ScoreVariant v);
ScoreVariant parse_variant(std::string_view name);
bool variant_is_ei(ScoreVariant v);
bool variant_is_median(ScoreVariant v);

struct ScoreConfig {
  ScoreVariant variant = ScoreVariant::kMeanBEi;
  int n_x_batches = 1000;
  int n_posterior_samples = 1000;
  RngSeed seed;
  int n_threads = 0;  // <= 0: all hardware threads; result independent of it
};

/// A score value with its Monte Carlo standard error. EI values are in
/// original objective units, PI values are probabilities.
struct ScoreEstimate {
  double value = 0.0;
  double std_error = 0.0;
  ScoreConfig config;
  Budget budget;
  double incumbent = 0.0;
  bool space_contained = true;  // scored space inside the model's base space
};

/// Optional extras a caller can request from predicted scoring.
struct ScoreDiagnostics {
  double min_sample_standardized = 0.0;  // smallest posterior draw seen
};

/// Monte Carlo estimate of the expected batch utility
///   E_{x ~ U_b(space), yhat ~ posterior} [ u(incumbent, yhat) ]
/// where u is max(0, incumbent - min yhat) for EI and the indicator
/// 1[min yhat < incumbent] for PI. Each of n_x_batches uniform batches gets
/// the exact b-point joint posterior; its expected utility is the mean over
/// n_posterior_samples joint draws; batches aggregate by mean or median.
///
/// A space that is not contained in the model's base space is allowed (the
/// GP extrapolates) but flagged via ScoreEstimate::space_contained and a
/// stderr warning.
ScoreEstimate predicted_score(const GpModel& model, const SearchSpace& space,
                              Budget budget, double incumbent,
                              const ScoreConfig& config,
                              ScoreDiagnostics* diag = nullptr);

/// Scores one space at several budgets from a single coupled sample stream:
/// the batch for budget b is a prefix of the batch for any larger budget and
/// posterior draws extend accordingly, so for EI/PI the per-batch utility is
/// exactly non-decreasing in the budget. Budgets must be positive; they are
/// evaluated as given (typically ascending).
std::vector<ScoreEstimate> predicted_score_sweep(const GpModel& model,
                                                 const SearchSpace& space,
                                                 const std::vector<Budget>& budgets,
                                                 double incumbent,
                                                 const ScoreConfig& config,
                                                 ScoreDiagnostics* diag = nullptr);

/// A real objective evaluation: natural-units point in, objective value out.
/// The Rng carries the caller's noise stream so noisy objectives stay
/// deterministic and order-independent.
using NoisyObjective = std::function<double(const Eigen::VectorXd&, Rng&)>;

/// Ex-post score from real evaluations: the utility of n_trials fresh uniform
/// batches of size b, aggregated by mean or median. Values are in raw
/// objective units.
ScoreEstimate empirical_score(const NoisyObjective& objective,
                              const SearchSpace& space, Budget budget,
                              double incumbent, ScoreVariant variant,
                              int n_trials, RngSeed seed);

/// Empirical score for offline data: batches are drawn uniformly with
/// replacement from the table rows that lie inside the space. Throws a
/// no-support ValidationError when no row is inside.
ScoreEstimate tabular_empirical_score(const Dataset& table, const SearchSpace& space,
                                      Budget budget, double incumbent,
                                      ScoreVariant variant, int n_trials,
                                      RngSeed seed);

/// CSV row in the canonical score schema (no trailing newline):
/// space_id,budget,variant,value,std_error,incumbent,n_x_batches,
/// n_posterior_samples,seed
std::string score_csv_row(const std::string& space_id, const ScoreEstimate& e);
inline constexpr const char* kScoreCsvHeader =
    "space_id,budget,variant,value,std_error,incumbent,n_x_batches,"
    "n_posterior_samples,seed";

}  // namespace spaceopt
