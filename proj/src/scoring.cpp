#include "spaceopt/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "spaceopt/errors.hpp"
#include "spaceopt/parallel.hpp"

namespace spaceopt {

std::string_view variant_name(ScoreVariant v) {
  switch (v) {
    case ScoreVariant::kMeanBEi: return "mean-bEI";
    case ScoreVariant::kMedianBEi: return "median-bEI";
    case ScoreVariant::kMeanBPi: return "mean-bPI";
    case ScoreVariant::kMedianBPi: return "median-bPI";
  }
  return "mean-bEI";
}

ScoreVariant parse_variant(std::string_view name) {
  if (name == "mean-bEI") return ScoreVariant::kMeanBEi;
  if (name == "median-bEI") return ScoreVariant::kMedianBEi;
  if (name == "mean-bPI") return ScoreVariant::kMeanBPi;
  if (name == "median-bPI") return ScoreVariant::kMedianBPi;
  throw ValidationError("unknown score variant '" + std::string(name) +
                        "' (expected mean-bEI, median-bEI, mean-bPI or median-bPI)");
}

bool variant_is_ei(ScoreVariant v) {
  return v == ScoreVariant::kMeanBEi || v == ScoreVariant::kMedianBEi;
}

bool variant_is_median(ScoreVariant v) {
  return v == ScoreVariant::kMedianBEi || v == ScoreVariant::kMedianBPi;
}

namespace {

void check_config(const ScoreConfig& config) {
  if (config.n_x_batches < 1) {
    throw ValidationError("n_x_batches must be >= 1");
  }
  if (config.n_posterior_samples < 1) {
    throw ValidationError("n_posterior_samples must be >= 1");
  }
}

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Aggregates per-batch expected utilities into a score value and a Monte
// Carlo standard error. Mean variants use sd/sqrt(n); median variants use a
// 200-resample bootstrap seeded from the score stream.
struct Aggregate {
  double value;
  double std_error;
};

Aggregate aggregate_batches(const std::vector<double>& batch_utils, bool median,
                            RngSeed seed) {
  const std::size_t n = batch_utils.size();
  if (n == 1) {
    return {batch_utils[0], 0.0};
  }
  if (!median) {
    double sum = 0.0;
    for (double u : batch_utils) sum += u;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double u : batch_utils) ss += (u - mean) * (u - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, sd / std::sqrt(static_cast<double>(n))};
  }
  const double med = median_of(batch_utils);
  constexpr int kResamples = 200;
  Rng rng(derive_seed(seed, streams::kBootstrap));
  std::vector<double> meds(kResamples);
  std::vector<double> resample(n);
  for (int r = 0; r < kResamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      resample[i] = batch_utils[rng.uniform_int(n)];
    }
    meds[static_cast<std::size_t>(r)] = median_of(resample);
  }
  double m = 0.0;
  for (double v : meds) m += v;
  m /= kResamples;
  double ss = 0.0;
  for (double v : meds) ss += (v - m) * (v - m);
  return {med, std::sqrt(ss / kResamples)};
}

}  // namespace

std::vector<ScoreEstimate> predicted_score_sweep(const GpModel& model,
                                                 const SearchSpace& space,
                                                 const std::vector<Budget>& budgets,
                                                 double incumbent,
                                                 const ScoreConfig& config,
                                                 ScoreDiagnostics* diag) {
  check_config(config);
  if (budgets.empty()) throw ValidationError("no budgets given");
  for (const Budget& b : budgets) {
    if (b.count < 1) throw ValidationError("budget must be >= 1");
  }
  if (!std::isfinite(incumbent)) throw ValidationError("incumbent must be finite");
  if (!space.same_dimensions(model.base_space())) {
    throw ValidationError(
        "scored space and model base space have different dimensions");
  }
  const bool contained = space.subset_of(model.base_space());
  if (!contained) {
    std::cerr << "spaceopt: warning: scored space is not contained in the "
                 "model's base space; the surrogate extrapolates\n";
  }

  const int b_max = [&] {
    int m = 1;
    for (const Budget& b : budgets) m = std::max(m, b.count);
    return m;
  }();
  const std::size_t n_budgets = budgets.size();
  const int nx = config.n_x_batches;
  const int ny = config.n_posterior_samples;
  const double inc_std = (incumbent - model.y_mean()) / model.y_std();
  const bool ei = variant_is_ei(config.variant);

  // batch_utils[bi][j]: expected utility of x-batch j at budgets[bi].
  std::vector<std::vector<double>> batch_utils(
      n_budgets, std::vector<double>(static_cast<std::size_t>(nx)));
  std::vector<double> batch_min(static_cast<std::size_t>(nx),
                                std::numeric_limits<double>::infinity());

  parallel_for(static_cast<std::size_t>(nx), config.n_threads, [&](std::size_t j) {
    // Points for this batch: a sequential stream, so the batch at budget b
    // is a prefix of the batch at any larger budget.
    Rng point_rng(derive_seed(config.seed, streams::kPoints, j));
    Eigen::MatrixXd U(b_max, space.ndim());
    for (int i = 0; i < b_max; ++i) {
      const Eigen::VectorXd x = space.sample(point_rng);
      U.row(i) = model.base_space().to_unit_cube_unchecked(x).transpose();
    }

    const JointPosterior post = model.joint_posterior(U);
    const CholeskyResult chol = [&] {
      try {
        return cholesky_with_jitter(post.cov, post.jitter_scale);
      } catch (const NumericalError&) {
        throw NumericalError("batch " + std::to_string(j) +
                             ": posterior covariance of size " +
                             std::to_string(b_max) +
                             " not factorizable after maximum jitter");
      }
    }();

    // One normal stream per (batch, sample): draw i of sample s never
    // depends on b_max, which keeps budget sweeps coupled.
    Eigen::MatrixXd Z(ny, b_max);
    for (int s = 0; s < ny; ++s) {
      Rng z_rng(derive_seed(config.seed, streams::kPosterior, j,
                            static_cast<std::uint64_t>(s)));
      for (int i = 0; i < b_max; ++i) Z(s, i) = z_rng.normal();
    }
    Eigen::MatrixXd draws = Z * chol.L.transpose();  // ny x b_max
    draws.rowwise() += post.mean.transpose();

    std::vector<double> sums(n_budgets, 0.0);
    double local_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < ny; ++s) {
      double running = std::numeric_limits<double>::infinity();
      int i = 0;
      for (std::size_t bi = 0; bi < n_budgets; ++bi) {
        // budgets are visited in the caller's order; running prefix minima
        // only advance, so unsorted budget lists recompute nothing.
        const int b = budgets[bi].count;
        if (b >= i) {
          for (; i < b; ++i) running = std::min(running, draws(s, i));
          sums[bi] += ei ? std::max(0.0, inc_std - running)
                         : (running < inc_std ? 1.0 : 0.0);
        } else {
          double prefix = std::numeric_limits<double>::infinity();
          for (int t = 0; t < b; ++t) prefix = std::min(prefix, draws(s, t));
          sums[bi] += ei ? std::max(0.0, inc_std - prefix)
                         : (prefix < inc_std ? 1.0 : 0.0);
        }
      }
      if (i < b_max) {
        for (; i < b_max; ++i) running = std::min(running, draws(s, i));
      }
      local_min = std::min(local_min, running);
    }
    for (std::size_t bi = 0; bi < n_budgets; ++bi) {
      batch_utils[bi][j] = sums[bi] / static_cast<double>(ny);
    }
    batch_min[j] = local_min;
  });

  if (diag != nullptr) {
    double mn = std::numeric_limits<double>::infinity();
    for (double v : batch_min) mn = std::min(mn, v);
    diag->min_sample_standardized = mn;
  }

  std::vector<ScoreEstimate> out(n_budgets);
  for (std::size_t bi = 0; bi < n_budgets; ++bi) {
    const Aggregate agg = aggregate_batches(
        batch_utils[bi], variant_is_median(config.variant),
        derive_seed(config.seed, streams::kScore, bi));
    ScoreEstimate& e = out[bi];
    const double unit = ei ? model.y_std() : 1.0;
    e.value = agg.value * unit;
    e.std_error = agg.std_error * unit;
    e.config = config;
    e.budget = budgets[bi];
    e.incumbent = incumbent;
    e.space_contained = contained;
  }
  return out;
}

ScoreEstimate predicted_score(const GpModel& model, const SearchSpace& space,
                              Budget budget, double incumbent,
                              const ScoreConfig& config, ScoreDiagnostics* diag) {
  return predicted_score_sweep(model, space, {budget}, incumbent, config, diag)
      .front();
}

namespace {

ScoreEstimate empirical_from_trials(const std::vector<double>& trial_utils,
                                    Budget budget, double incumbent,
                                    ScoreVariant variant, const RngSeed& seed) {
  ScoreConfig cfg;
  cfg.variant = variant;
  cfg.n_x_batches = static_cast<int>(trial_utils.size());
  cfg.n_posterior_samples = 1;
  cfg.seed = seed;
  const Aggregate agg = aggregate_batches(trial_utils, variant_is_median(variant),
                                          derive_seed(seed, streams::kScore));
  ScoreEstimate e;
  e.value = agg.value;
  e.std_error = agg.std_error;
  e.config = cfg;
  e.budget = budget;
  e.incumbent = incumbent;
  return e;
}

}  // namespace

ScoreEstimate empirical_score(const NoisyObjective& objective,
                              const SearchSpace& space, Budget budget,
                              double incumbent, ScoreVariant variant,
                              int n_trials, RngSeed seed) {
  if (budget.count < 1) throw ValidationError("budget must be >= 1");
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  const bool ei = variant_is_ei(variant);
  std::vector<double> utils(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, streams::kTrials, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::VectorXd> batch;
    batch.reserve(static_cast<std::size_t>(budget.count));
    for (int i = 0; i < budget.count; ++i) batch.push_back(space.sample(rng));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : batch) {
      double y;
      try {
        y = objective(x, rng);
      } catch (const std::exception& ex) {
        std::string coords = "[";
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          coords += (i ? ", " : "") + std::to_string(x[i]);
        }
        throw NumericalError("objective evaluation failed at x=" + coords +
                             "]: " + ex.what());
      }
      best = std::min(best, y);
    }
    utils[static_cast<std::size_t>(t)] =
        ei ? std::max(0.0, incumbent - best) : (best < incumbent ? 1.0 : 0.0);
  }
  return empirical_from_trials(utils, budget, incumbent, variant, seed);
}

ScoreEstimate tabular_empirical_score(const Dataset& table, const SearchSpace& space,
                                      Budget budget, double incumbent,
                                      ScoreVariant variant, int n_trials,
                                      RngSeed seed) {
  if (budget.count < 1) throw ValidationError("budget must be >= 1");
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  std::vector<double> in_space_y;
  for (const auto& o : table.obs()) {
    if (space.contains(o.x)) in_space_y.push_back(o.y);
  }
  if (in_space_y.empty()) {
    throw ValidationError("no table rows inside the scored space (no support)");
  }
  const bool ei = variant_is_ei(variant);
  const std::size_t n_rows = in_space_y.size();
  std::vector<double> utils(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, streams::kTrials, static_cast<std::uint64_t>(t)));
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < budget.count; ++i) {
      best = std::min(best, in_space_y[rng.uniform_int(n_rows)]);
    }
    utils[static_cast<std::size_t>(t)] =
        ei ? std::max(0.0, incumbent - best) : (best < incumbent ? 1.0 : 0.0);
  }
  return empirical_from_trials(utils, budget, incumbent, variant, seed);
}

std::string score_csv_row(const std::string& space_id, const ScoreEstimate& e) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%s,%d,%s,%.12g,%.12g,%.12g,%d,%d,%llu",
                space_id.c_str(), e.budget.count,
                std::string(variant_name(e.config.variant)).c_str(), e.value,
                e.std_error, e.incumbent, e.config.n_x_batches,
                e.config.n_posterior_samples,
                static_cast<unsigned long long>(e.config.seed.value));
  return std::string(buf);
}

}  // namespace spaceopt
