#include "spaceopt/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace spaceopt {

namespace {

struct Tracker {
  const LbfgsObjective& f;
  int n_evals = 0;
  double best_f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  Eigen::VectorXd best_g;

  explicit Tracker(const LbfgsObjective& fn) : f(fn) {}

  double eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    ++n_evals;
    const double v = f(x, g);
    if (std::isfinite(v) && v < best_f) {
      best_f = v;
      best_x = x;
      best_g = g;
    }
    return v;
  }
};

// Minimizer of the cubic interpolant through (a, fa, ga) and (b, fb, gb),
// clipped into the interval; falls back to bisection on degenerate data.
double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
  const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
  const double denom = gb - ga + 2.0 * d2;
  if (denom == 0.0 || !std::isfinite(denom)) return 0.5 * (a + b);
  double t = b - (b - a) * (gb + d2 - d1) / denom;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

struct LineSearchResult {
  double step = 0.0;
  double f = 0.0;
  bool ok = false;
};

// Strong-Wolfe line search, Nocedal & Wright Algorithms 3.5/3.6.
LineSearchResult wolfe_line_search(Tracker& track, const Eigen::VectorXd& x0,
                                   double f0, const Eigen::VectorXd& g0,
                                   const Eigen::VectorXd& dir,
                                   Eigen::VectorXd& x_out, Eigen::VectorXd& g_out,
                                   const LbfgsOptions& opt) {
  const double dphi0 = g0.dot(dir);
  if (dphi0 >= 0.0) return {};  // not a descent direction

  auto phi = [&](double alpha, double& dphi) {
    x_out = x0 + alpha * dir;
    const double v = track.eval(x_out, g_out);
    dphi = g_out.dot(dir);
    return v;
  };

  auto zoom = [&](double lo, double f_lo, double g_lo, double hi, double f_hi,
                  double g_hi) -> LineSearchResult {
    for (int i = 0; i < opt.max_line_search; ++i) {
      const double alpha = cubic_step(lo, f_lo, g_lo, hi, f_hi, g_hi);
      double dphi;
      const double v = phi(alpha, dphi);
      if (!std::isfinite(v) || v > f0 + opt.wolfe_c1 * alpha * dphi0 || v >= f_lo) {
        hi = alpha;
        f_hi = v;
        g_hi = dphi;
      } else {
        if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) return {alpha, v, true};
        if (dphi * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          g_hi = g_lo;
        }
        lo = alpha;
        f_lo = v;
        g_lo = dphi;
      }
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return {};
  };

  double alpha_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
  double alpha = 1.0;
  const double alpha_max = 1e10;
  for (int i = 0; i < opt.max_line_search; ++i) {
    double dphi;
    const double v = phi(alpha, dphi);
    if (!std::isfinite(v) || v > f0 + opt.wolfe_c1 * alpha * dphi0 ||
        (i > 0 && v >= f_prev)) {
      return zoom(alpha_prev, f_prev, dphi_prev, alpha, v, dphi);
    }
    if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) return {alpha, v, true};
    if (dphi >= 0.0) {
      return zoom(alpha, v, dphi, alpha_prev, f_prev, dphi_prev);
    }
    alpha_prev = alpha;
    f_prev = v;
    dphi_prev = dphi;
    alpha = std::min(2.0 * alpha, alpha_max);
  }
  return {};
}

}  // namespace

LbfgsResult lbfgs_minimize(const LbfgsObjective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  Tracker track(f);

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n);
  double fx = track.eval(x, g);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  LbfgsResult result;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = g;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha_coef(m);
    for (std::size_t k = m; k-- > 0;) {
      alpha_coef[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha_coef[k] * y_hist[k];
    }
    if (m > 0) {
      const double gamma = s_hist.back().dot(y_hist.back()) /
                           y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha_coef[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd dir = -q;

    Eigen::VectorXd x_new(n), g_new(n);
    LineSearchResult ls = wolfe_line_search(track, x, fx, g, dir, x_new, g_new, opt);
    if (!ls.ok && m > 0) {
      // Retry along steepest descent before giving up.
      dir = -g;
      ls = wolfe_line_search(track, x, fx, g, dir, x_new, g_new, opt);
    }
    if (!ls.ok) break;

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (static_cast<int>(s_hist.size()) == opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    x = std::move(x_new);
    g = std::move(g_new);
    fx = ls.f;
  }

  result.iterations = iter;
  result.n_evals = track.n_evals;
  if (track.best_x.size() > 0) {
    result.x = track.best_x;
    result.f = track.best_f;
    result.grad = track.best_g;
  } else {
    result.x = x;
    result.f = fx;
    result.grad = g;
  }
  return result;
}

}  // namespace spaceopt
