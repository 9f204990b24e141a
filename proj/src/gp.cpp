#include "spaceopt/gp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spaceopt/errors.hpp"
#include "spaceopt/lbfgs.hpp"

namespace spaceopt {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964091736687747;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// Matern-5/2 radial profile and the smooth form of g'(r)/r.
inline double matern_g(double r) {
  return (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r);
}

inline double matern_dg_over_r(double r) {
  return -(5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
}

// Squared scaled distances ||diag(ils)(a_i - b_j)||^2, clamped at zero to
// absorb cancellation in the norm expansion.
Eigen::MatrixXd scaled_sqdist(const Eigen::VectorXd& ils, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd As = A * ils.asDiagonal();
  const Eigen::MatrixXd Bs = B * ils.asDiagonal();
  const Eigen::VectorXd na = As.rowwise().squaredNorm();
  const Eigen::VectorXd nb = Bs.rowwise().squaredNorm();
  Eigen::MatrixXd r2 = -2.0 * (As * Bs.transpose());
  r2.colwise() += na;
  r2.rowwise() += nb.transpose();
  return r2.cwiseMax(0.0);
}

}  // namespace

double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

double softplus_inv(double s) {
  if (s > 30.0) return s;
  return std::log(std::expm1(s));
}

double kernel_eval(const KernelParams& params, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ValidationError("kernel_eval: point dimensions differ");
  }
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = params.inv_lengthscales[i] * (a[i] - b[i]);
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  return params.amplitude * params.amplitude * matern_g(r);
}

Eigen::MatrixXd kernel_cross(const KernelParams& params, const Eigen::MatrixXd& A,
                             const Eigen::MatrixXd& B) {
  const Eigen::ArrayXXd r = scaled_sqdist(params.inv_lengthscales, A, B)
                                .array()
                                .sqrt();
  const double amp2 = params.amplitude * params.amplitude;
  return (amp2 * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r.square()) *
          (-kSqrt5 * r).exp())
      .matrix();
}

Eigen::MatrixXd kernel_gram(const KernelParams& params, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd K = kernel_cross(params, X, X);
  // Exact symmetry and exact amplitude^2 on the diagonal.
  K = 0.5 * (K + K.transpose()).eval();
  K.diagonal().setConstant(params.amplitude * params.amplitude);
  return K;
}

namespace {

// Unblocked lower Cholesky; returns false on a non-positive pivot.
bool cholesky_in_place(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = A(j, j);
    if (j > 0) d -= A.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    A(j, j) = ljj;
    if (j + 1 < n) {
      auto tail = A.col(j).tail(n - j - 1);
      if (j > 0) {
        tail.noalias() -= A.bottomLeftCorner(n - j - 1, j) * A.row(j).head(j).transpose();
      }
      tail /= ljj;
    }
  }
  A.triangularView<Eigen::StrictlyUpper>().setZero();
  return true;
}

}  // namespace

CholeskyResult cholesky_with_jitter(Eigen::MatrixXd A, double scale,
                                    double first_jitter_rel) {
  const Eigen::MatrixXd original = A;
  double rel = first_jitter_rel;
  while (true) {
    A = original;
    const double jitter = rel * scale;
    A.diagonal().array() += jitter;
    if (cholesky_in_place(A)) return {std::move(A), jitter};
    if (rel >= 1e-6) {
      throw NumericalError(
          "covariance not positive definite after jitter up to " +
          std::to_string(1e-6 * scale));
    }
    rel *= 10.0;
  }
}

LogMarginalLikelihood log_marginal_likelihood(const KernelParams& params,
                                              const Eigen::MatrixXd& X_unit,
                                              const Eigen::VectorXd& y,
                                              double first_jitter_rel) {
  const Eigen::Index n = X_unit.rows();
  const Eigen::Index d = X_unit.cols();
  if (n < 1) throw ValidationError("log_marginal_likelihood: empty training set");
  if (params.inv_lengthscales.size() != d) {
    throw ValidationError("log_marginal_likelihood: inverse lengthscale count " +
                          std::to_string(params.inv_lengthscales.size()) +
                          " does not match input dimension " + std::to_string(d));
  }

  const double amp = params.amplitude;
  const double amp2 = amp * amp;
  const Eigen::MatrixXd Knl = kernel_gram(params, X_unit);
  Eigen::MatrixXd C = Knl;
  C.diagonal().array() += params.noise_var;

  const auto chol = cholesky_with_jitter(std::move(C), amp2, first_jitter_rel);
  const Eigen::MatrixXd& L = chol.L;

  const Eigen::VectorXd alpha =
      L.transpose().triangularView<Eigen::Upper>().solve(
          L.triangularView<Eigen::Lower>().solve(y));

  LogMarginalLikelihood out;
  out.data_term = -0.5 * y.dot(alpha) -
                  L.diagonal().array().log().sum() -
                  static_cast<double>(n) * kHalfLog2Pi;

  // M = alpha alpha^T - C^{-1}; gradient of the data term w.r.t. a kernel
  // parameter t is 0.5 tr(M dK/dt).
  Eigen::MatrixXd Cinv = Eigen::MatrixXd::Identity(n, n);
  L.triangularView<Eigen::Lower>().solveInPlace(Cinv);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(Cinv);
  const Eigen::MatrixXd M = alpha * alpha.transpose() - Cinv;

  // Positive-scale gradients of the data term.
  Eigen::VectorXd grad_pos(d + 2);
  grad_pos[0] = M.cwiseProduct(Knl).sum() / amp;  // d/d amplitude
  {
    const Eigen::MatrixXd r2 = scaled_sqdist(params.inv_lengthscales, X_unit, X_unit);
    const Eigen::ArrayXXd r = r2.array().sqrt();
    const Eigen::MatrixXd W =
        (amp2 * (-(5.0 / 3.0)) * (1.0 + kSqrt5 * r) * (-kSqrt5 * r).exp()).matrix();
    const Eigen::MatrixXd MW = M.cwiseProduct(W);
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::VectorXd col = X_unit.col(k);
      const Eigen::MatrixXd diff =
          col.replicate(1, n) - col.transpose().replicate(n, 1);
      grad_pos[1 + k] = 0.5 * params.inv_lengthscales[k] *
                        MW.cwiseProduct(diff.cwiseAbs2()).sum();
    }
  }
  grad_pos[d + 1] = 0.5 * M.trace();  // d/d noise_var

  // Log-prior terms and their positive-scale gradients.
  double prior = 0.0;
  auto log_normal_prior = [&](double s, double& g) {
    const double ls = std::log(s);
    prior += -kHalfLog2Pi - ls - 0.5 * ls * ls;
    g += -(1.0 + ls) / s;
  };
  Eigen::VectorXd prior_grad = Eigen::VectorXd::Zero(d + 2);
  log_normal_prior(amp, prior_grad[0]);
  for (Eigen::Index k = 0; k < d; ++k) {
    log_normal_prior(params.inv_lengthscales[k], prior_grad[1 + k]);
  }
  {
    constexpr double kNoisePriorVar = 0.1;
    const double nv = params.noise_var;
    prior += -kHalfLog2Pi - 0.5 * std::log(kNoisePriorVar) -
             nv * nv / (2.0 * kNoisePriorVar);
    prior_grad[d + 1] += -nv / kNoisePriorVar;
  }

  out.value = out.data_term + prior;

  // Chain rule through the softplus reparameterization:
  // d/du = d/ds * sigmoid(u), sigmoid(softplus_inv(s)) = 1 - exp(-s).
  out.grad.resize(d + 2);
  auto sigmoid_at = [](double s) { return -std::expm1(-s); };
  out.grad[0] = (grad_pos[0] + prior_grad[0]) * sigmoid_at(amp);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.grad[1 + k] = (grad_pos[1 + k] + prior_grad[1 + k]) *
                      sigmoid_at(params.inv_lengthscales[k]);
  }
  out.grad[d + 1] = (grad_pos[d + 1] + prior_grad[d + 1]) * sigmoid_at(params.noise_var);
  return out;
}

GpModel GpModel::build(SearchSpace base, KernelParams params,
                       Eigen::MatrixXd train_x_unit, Eigen::VectorXd y_raw,
                       FitDiagnostics diag) {
  GpModel m;
  const Eigen::Index n = train_x_unit.rows();
  m.y_mean_ = y_raw.mean();
  const double var = (y_raw.array() - m.y_mean_).square().sum() / static_cast<double>(n);
  m.y_std_ = std::sqrt(var);
  if (!(m.y_std_ > 1e-12)) {
    m.y_std_ = 1.0;
    diag.degenerate_targets = true;
  }
  m.train_y_ = (y_raw.array() - m.y_mean_) / m.y_std_;
  m.train_x_ = std::move(train_x_unit);
  m.space_ = std::move(base);
  m.params_ = std::move(params);
  m.diag_ = diag;

  Eigen::MatrixXd C = kernel_gram(m.params_, m.train_x_);
  C.diagonal().array() += m.params_.noise_var;
  m.chol_ = cholesky_with_jitter(std::move(C),
                                 m.params_.amplitude * m.params_.amplitude)
                .L;
  m.alpha_ = m.chol_.transpose().triangularView<Eigen::Upper>().solve(
      m.chol_.triangularView<Eigen::Lower>().solve(m.train_y_));
  return m;
}

GpModel GpModel::from_parts(SearchSpace base, KernelParams params,
                            Eigen::MatrixXd train_x_unit, Eigen::VectorXd y_raw) {
  if (train_x_unit.rows() != y_raw.size()) {
    throw ValidationError("from_parts: row count mismatch between inputs and targets");
  }
  return build(std::move(base), std::move(params), std::move(train_x_unit),
               std::move(y_raw), FitDiagnostics{});
}

GpModel GpModel::fit(const Dataset& data, RngSeed /*seed*/, const FitConfig& config) {
  if (data.size() < 2) {
    throw ValidationError("GP fit needs at least 2 observations, got " +
                          std::to_string(data.size()));
  }
  const int n = data.size();
  const int d = data.space().ndim();

  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) {
    X.row(i) = data.space()
                   .to_unit_cube(data.obs()[static_cast<std::size_t>(i)].x)
                   .transpose();
  }
  Eigen::VectorXd y_raw = data.y_vector();

  const double y_mean = y_raw.mean();
  double y_std = std::sqrt((y_raw.array() - y_mean).square().sum() / n);
  bool degenerate = false;
  if (!(y_std > 1e-12)) {
    y_std = 1.0;
    degenerate = true;
  }
  const Eigen::VectorXd y = (y_raw.array() - y_mean) / y_std;

  auto unpack = [d](const Eigen::VectorXd& u) {
    KernelParams p;
    p.amplitude = softplus(u[0]);
    p.inv_lengthscales.resize(d);
    for (int k = 0; k < d; ++k) p.inv_lengthscales[k] = softplus(u[1 + k]);
    p.noise_var = softplus(u[d + 1]);
    return p;
  };

  LbfgsObjective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
    grad.setZero(u.size());
    KernelParams p = unpack(u);
    try {
      const auto lml = log_marginal_likelihood(p, X, y);
      grad = -lml.grad;
      return -lml.value;
    } catch (const NumericalError&) {
      // Treat an unfactorizable kernel as an infeasible step; the line
      // search backs off.
      return std::numeric_limits<double>::infinity();
    }
  };

  Eigen::VectorXd u0(d + 2);
  u0[0] = softplus_inv(1.0);
  for (int k = 0; k < d; ++k) u0[1 + k] = softplus_inv(1.0);
  u0[d + 1] = softplus_inv(0.01);

  LbfgsOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.grad_tolerance = config.grad_tolerance;
  opt.memory = config.lbfgs_memory;
  const LbfgsResult res = lbfgs_minimize(objective, u0, opt);

  FitDiagnostics diag;
  diag.iterations = res.iterations;
  diag.n_evals = res.n_evals;
  diag.converged = res.converged;
  diag.log_posterior = -res.f;
  diag.degenerate_targets = degenerate;

  return build(data.space(), unpack(res.x), std::move(X), std::move(y_raw), diag);
}

GpModel::JointPosterior GpModel::joint_posterior(const Eigen::MatrixXd& batch_unit,
                                                 bool add_observation_noise) const {
  if (batch_unit.rows() < 1) {
    throw ValidationError("joint_posterior: empty batch");
  }
  if (batch_unit.cols() != train_x_.cols()) {
    throw ValidationError("joint_posterior: query dimension " +
                          std::to_string(batch_unit.cols()) +
                          " does not match training dimension " +
                          std::to_string(train_x_.cols()));
  }
  JointPosterior post;
  const Eigen::MatrixXd Kx = kernel_cross(params_, batch_unit, train_x_);
  post.mean = Kx * alpha_;
  const Eigen::MatrixXd V =
      chol_.triangularView<Eigen::Lower>().solve(Kx.transpose());
  Eigen::MatrixXd cov = kernel_gram(params_, batch_unit);
  cov.noalias() -= V.transpose() * V;
  cov = 0.5 * (cov + cov.transpose()).eval();
  if (add_observation_noise) cov.diagonal().array() += params_.noise_var;
  post.cov = std::move(cov);
  post.jitter_scale = params_.amplitude * params_.amplitude;
  return post;
}

Eigen::MatrixXd sample_posterior(const JointPosterior& post, int n_samples,
                                 RngSeed seed) {
  if (n_samples < 1) throw ValidationError("sample_posterior: n_samples must be >= 1");
  CholeskyResult chol = [&] {
    try {
      return cholesky_with_jitter(post.cov, post.jitter_scale);
    } catch (const NumericalError&) {
      throw NumericalError("degenerate posterior covariance: not factorizable "
                           "after maximum jitter");
    }
  }();
  const Eigen::Index m = post.mean.size();
  Eigen::MatrixXd samples(n_samples, m);
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, streams::kPosterior, static_cast<std::uint64_t>(s)));
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.normal();
    samples.row(s) =
        (post.mean + chol.L.triangularView<Eigen::Lower>() * z).transpose();
  }
  return samples;
}

}  // namespace spaceopt
