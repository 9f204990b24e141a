#include "spaceopt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spaceopt/errors.hpp"
#include "spaceopt/parallel.hpp"

namespace spaceopt::bench {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

double branin(const Eigen::VectorXd& x) {
  if (x.size() != 2) throw ValidationError("branin expects a 2-vector");
  const double x1 = x[0], x2 = x[1];
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
  return inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double hartmann6(const Eigen::VectorXd& x) {
  if (x.size() != 6) throw ValidationError("hartmann6 expects a 6-vector");
  for (int i = 0; i < 6; ++i) {
    if (x[i] < 0.0 || x[i] > 1.0) {
      throw ValidationError("hartmann6: coordinate " + std::to_string(i) +
                            " = " + std::to_string(x[i]) + " outside [0,1]");
    }
  }
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][6] = {
      {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
      {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
      {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
      {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
  static const double P[4][6] = {
      {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - P[i][j];
      e += A[i][j] * d * d;
    }
    sum += alpha[i] * std::exp(-e);
  }
  return -sum;
}

double sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

SearchSpace branin_space() {
  return SearchSpace({ParamDomain::continuous("x1", Scale::kLinear, -5.0, 10.0),
                      ParamDomain::continuous("x2", Scale::kLinear, 0.0, 15.0)});
}

SearchSpace hartmann6_space() {
  std::vector<ParamDomain> dims;
  for (int i = 0; i < 6; ++i) {
    dims.push_back(ParamDomain::continuous("x" + std::to_string(i + 1),
                                           Scale::kLinear, 0.0, 1.0));
  }
  return SearchSpace(std::move(dims));
}

SearchSpace sphere_space(int d, double lo, double hi) {
  std::vector<ParamDomain> dims;
  for (int i = 0; i < d; ++i) {
    dims.push_back(ParamDomain::continuous("x" + std::to_string(i + 1),
                                           Scale::kLinear, lo, hi));
  }
  return SearchSpace(std::move(dims));
}

SyntheticObjective make_objective(const std::string& name, double noise_sd) {
  if (noise_sd < 0.0) throw ValidationError("noise_sd must be >= 0");
  if (name == "branin") return {name, noise_sd, branin, branin_space()};
  if (name == "hartmann6") return {name, noise_sd, hartmann6, hartmann6_space()};
  if (name == "sphere") return {name, noise_sd, sphere, sphere_space(2)};
  if (name == "constant") {
    return {name, noise_sd, [](const Eigen::VectorXd&) { return 1.0; },
            sphere_space(2)};
  }
  std::string known;
  for (const auto& n : objective_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown objective '" + name + "' (known: " + known + ")");
}

std::vector<std::string> objective_names() {
  return {"branin", "hartmann6", "sphere", "constant"};
}

SyntheticObjective grid_table_objective(std::vector<double> values) {
  if (values.empty()) throw ValidationError("grid table needs at least one value");
  const auto n = static_cast<double>(values.size());
  auto f = [values = std::move(values), n](const Eigen::VectorXd& x) {
    const auto idx = std::min<std::size_t>(
        values.size() - 1,
        static_cast<std::size_t>(std::max(0.0, std::floor(x[0] * n))));
    return values[idx];
  };
  return {"grid-table", 0.0, std::move(f), sphere_space(1, 0.0, 1.0)};
}

StudyLog random_search(const NoisyObjective& objective, const SearchSpace& space,
                       int n, RngSeed seed, int eval_offset) {
  if (n < 1) throw ValidationError("random_search needs n >= 1");
  StudyLog log;
  log.evals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::kEvals,
                        static_cast<std::uint64_t>(eval_offset + i)));
    Observation o;
    o.x = space.sample(rng);
    o.y = objective(o.x, rng);
    log.evals[static_cast<std::size_t>(i)] = std::move(o);
  }
  log.best_curve.resize(log.evals.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log.evals.size(); ++i) {
    best = std::min(best, log.evals[i].y);
    log.best_curve[i] = best;
  }
  return log;
}

StudyLog tabular_random_search(const Dataset& table, const SearchSpace& space,
                               int n, RngSeed seed, int eval_offset) {
  if (n < 1) throw ValidationError("tabular_random_search needs n >= 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < table.obs().size(); ++i) {
    if (space.contains(table.obs()[i].x)) idx.push_back(i);
  }
  if (idx.empty()) {
    throw ValidationError("no table rows inside the sampled space (no support)");
  }
  StudyLog log;
  log.evals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::kEvals,
                        static_cast<std::uint64_t>(eval_offset + i)));
    log.evals[static_cast<std::size_t>(i)] =
        table.obs()[idx[rng.uniform_int(idx.size())]];
  }
  log.best_curve.resize(log.evals.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log.evals.size(); ++i) {
    best = std::min(best, log.evals[i].y);
    log.best_curve[i] = best;
  }
  return log;
}

CurveStats aggregate_curves(const std::vector<StudyLog>& logs) {
  if (logs.size() < 2) throw ValidationError("curve aggregation needs >= 2 runs");
  const std::size_t len = logs.front().best_curve.size();
  for (const auto& log : logs) {
    if (log.best_curve.size() != len) {
      throw ValidationError("curve aggregation: runs produced curves of "
                            "different lengths (" + std::to_string(len) +
                            " vs " + std::to_string(log.best_curve.size()) + ")");
    }
  }
  const int n = static_cast<int>(logs.size());
  CurveStats stats;
  stats.n_repeats = n;
  stats.mean.resize(len);
  stats.std_error.resize(len);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& log : logs) sum += log.best_curve[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& log : logs) {
      const double d = log.best_curve[t] - mean;
      ss += d * d;
    }
    stats.mean[t] = mean;
    stats.std_error[t] = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  }
  return stats;
}

CurveStats replicate(const std::function<StudyLog(RngSeed)>& experiment,
                     int n_repeats, RngSeed seed, int n_threads) {
  if (n_repeats < 2) throw ValidationError("replicate needs n_repeats >= 2");
  std::vector<StudyLog> logs(static_cast<std::size_t>(n_repeats));
  parallel_for(static_cast<std::size_t>(n_repeats), n_threads, [&](std::size_t r) {
    logs[r] = experiment(derive_seed(seed, streams::kRepeat, r));
  });
  return aggregate_curves(logs);
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779399460599344;
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244008443621048);
}

double single_point_ei_oracle(double mu, double sigma, double incumbent) {
  if (sigma < 0.0) throw ValidationError("sigma must be >= 0");
  if (sigma == 0.0) return std::max(0.0, incumbent - mu);
  const double z = (incumbent - mu) / sigma;
  return sigma * normal_pdf(z) + (incumbent - mu) * normal_cdf(z);
}

double grid_min_order_statistics_oracle(std::vector<double> values, Budget b,
                                        double incumbent) {
  if (values.empty()) throw ValidationError("empty value set");
  if (b.count < 1) throw ValidationError("budget must be >= 1");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double expectation = 0.0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    const double p_ge_k = std::pow((n - static_cast<double>(k) + 1.0) / n, b.count);
    const double p_ge_k1 = std::pow((n - static_cast<double>(k)) / n, b.count);
    expectation += std::max(0.0, incumbent - values[k - 1]) * (p_ge_k - p_ge_k1);
  }
  return expectation;
}

}  // namespace spaceopt::bench
