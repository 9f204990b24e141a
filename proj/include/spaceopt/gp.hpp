#pragma once

#include <Eigen/Core>
#include <optional>

#include "spaceopt/rng.hpp"
#include "spaceopt/search_space.hpp"

namespace spaceopt {

/// ARD Matern-5/2 kernel hyperparameters on the positive scale.
/// k(a, b) = amplitude^2 (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r),
/// r = || diag(inv_lengthscales) (a - b) ||.
struct KernelParams {
  double amplitude = 1.0;
  Eigen::VectorXd inv_lengthscales;
  double noise_var = 0.01;
};

double kernel_eval(const KernelParams& params, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

/// Cross-covariance matrix [k(A_i, B_j)] for row-stacked point sets.
Eigen::MatrixXd kernel_cross(const KernelParams& params,
                             const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Symmetric Gram matrix without observation noise.
Eigen::MatrixXd kernel_gram(const KernelParams& params, const Eigen::MatrixXd& X);

/// Lower Cholesky factor computed column by column, so the leading k x k
/// block of the factor depends only on the leading k x k block of the input.
/// Escalates diagonal jitter from 1e-10*scale to 1e-6*scale in decades and
/// throws NumericalError when even the largest jitter fails.
struct CholeskyResult {
  Eigen::MatrixXd L;
  double jitter = 0.0;
};
CholeskyResult cholesky_with_jitter(Eigen::MatrixXd A, double scale,
                                    double first_jitter_rel = 1e-10);

/// Log marginal likelihood of standardized targets under a zero-mean GP,
/// plus the hyperprior terms, with the gradient taken with respect to the
/// unconstrained (pre-softplus) parameters [amplitude, inv_lengthscales...,
/// noise_var].
///
/// Priors: log-Normal(0, 1) on the amplitude and on each inverse lengthscale,
/// Normal(0, 0.1 variance) on the noise variance (a half-normal shrinkage
/// toward noiseless fits).
struct LogMarginalLikelihood {
  double value = 0.0;      // data term + log-prior terms
  double data_term = 0.0;  // GP marginal log likelihood alone
  Eigen::VectorXd grad;    // d value / d unconstrained params
};
LogMarginalLikelihood log_marginal_likelihood(const KernelParams& params,
                                              const Eigen::MatrixXd& X_unit,
                                              const Eigen::VectorXd& y_standardized,
                                              double first_jitter_rel = 1e-10);

double softplus(double u);
double softplus_inv(double s);

struct FitConfig {
  int max_iterations = 3000;
  double grad_tolerance = 1e-8;
  int lbfgs_memory = 10;
};

struct FitDiagnostics {
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
  double log_posterior = 0.0;
  bool degenerate_targets = false;  // zero target variance, fit used y_std = 1
};

/// Fitted surrogate. Inputs live in the unit cube of the base space, targets
/// are standardized to zero mean / unit variance; the factor of
/// K + noise_var I is cached for posterior queries. Immutable once built.
class GpModel {
 public:
  /// Maximum a posteriori fit by L-BFGS from the fixed initialization
  /// (amplitude 1, inverse lengthscales 1, noise variance 0.01).
  static GpModel fit(const Dataset& data, RngSeed seed, const FitConfig& config = {});

  /// Assembles a model from explicit parameters and training data (already in
  /// unit-cube coordinates); used by tests and by anyone wanting to bypass
  /// fitting. y is in natural units and gets standardized here.
  static GpModel from_parts(SearchSpace base, KernelParams params,
                            Eigen::MatrixXd train_x_unit, Eigen::VectorXd y_raw);

  const KernelParams& params() const { return params_; }
  const SearchSpace& base_space() const { return space_; }
  const Eigen::MatrixXd& train_x() const { return train_x_; }
  const Eigen::VectorXd& train_y_standardized() const { return train_y_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const FitDiagnostics& diagnostics() const { return diag_; }
  int n_train() const { return static_cast<int>(train_x_.rows()); }

  /// Exact joint posterior over a batch of unit-cube query points, in
  /// standardized units. Set add_observation_noise to sample noisy y rather
  /// than latent f (off by default; scores use latent f).
  struct JointPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double jitter_scale = 1.0;  // amplitude^2, reference for sampling jitter
  };
  JointPosterior joint_posterior(const Eigen::MatrixXd& batch_unit,
                                 bool add_observation_noise = false) const;

 private:
  GpModel() = default;
  static GpModel build(SearchSpace base, KernelParams params,
                       Eigen::MatrixXd train_x_unit, Eigen::VectorXd y_raw,
                       FitDiagnostics diag);

  KernelParams params_;
  SearchSpace space_;
  Eigen::MatrixXd train_x_;
  Eigen::VectorXd train_y_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;  // (K + noise I)^-1 y, via the cached factor
  FitDiagnostics diag_;
};

using JointPosterior = GpModel::JointPosterior;

/// n_samples joint draws mu + L z, one row per sample, deterministic under
/// the seed (sample s never depends on n_samples or on other samples).
Eigen::MatrixXd sample_posterior(const JointPosterior& post, int n_samples,
                                 RngSeed seed);

}  // namespace spaceopt
