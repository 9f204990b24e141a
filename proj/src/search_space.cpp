#include "spaceopt/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "spaceopt/errors.hpp"

namespace spaceopt {

std::string_view scale_name(Scale s) {
  return s == Scale::kLinear ? "linear" : "log10";
}

Scale parse_scale(std::string_view name) {
  if (name == "linear") return Scale::kLinear;
  if (name == "log10") return Scale::kLog10;
  throw ValidationError("unknown scale '" + std::string(name) +
                        "' (expected 'linear' or 'log10')");
}

ParamDomain ParamDomain::continuous(std::string name, Scale scale, double lower,
                                    double upper) {
  ParamDomain d{std::move(name), scale, lower, upper, {}};
  d.validate();
  return d;
}

ParamDomain ParamDomain::with_grid(std::string name, Scale scale, double lower,
                                   double upper, std::vector<double> grid) {
  ParamDomain d{std::move(name), scale, lower, upper, std::move(grid)};
  d.validate();
  return d;
}

ParamDomain ParamDomain::fixed(std::string name, Scale scale, double value) {
  ParamDomain d{std::move(name), scale, value, value, {}};
  d.validate();
  return d;
}

double ParamDomain::transform(double v) const {
  return scale == Scale::kLinear ? v : std::log10(v);
}

double ParamDomain::untransform(double t) const {
  return scale == Scale::kLinear ? t : std::pow(10.0, t);
}

double ParamDomain::snap_to_grid(double v) const {
  if (grid.empty()) return v;
  double best = grid.front();
  double best_dist = std::abs(v - best);
  for (double g : grid) {
    const double dist = std::abs(v - g);
    if (dist < best_dist) {
      best = g;
      best_dist = dist;
    }
  }
  return best;
}

void ParamDomain::validate() const {
  if (name.empty()) throw ValidationError("dimension with empty name");
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw ValidationError("dimension '" + name + "': non-finite bounds");
  }
  if (lower > upper) {
    throw ValidationError("dimension '" + name + "': lower bound " +
                          std::to_string(lower) + " exceeds upper bound " +
                          std::to_string(upper));
  }
  if (scale == Scale::kLog10 && lower <= 0.0) {
    throw ValidationError("dimension '" + name +
                          "': log10 scale requires a positive lower bound");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw ValidationError("dimension '" + name + "': grid must be ascending");
  }
  for (double g : grid) {
    if (!(g >= lower && g <= upper)) {
      throw ValidationError("dimension '" + name + "': grid value " +
                            std::to_string(g) + " outside [" +
                            std::to_string(lower) + ", " + std::to_string(upper) +
                            "]");
    }
  }
}

SearchSpace::SearchSpace(std::vector<ParamDomain> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ValidationError("search space needs at least one dimension");
  std::set<std::string> names;
  for (const auto& d : dims_) {
    d.validate();
    if (!names.insert(d.name).second) {
      throw ValidationError("duplicate dimension name '" + d.name + "'");
    }
  }
}

int SearchSpace::dim_index(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool SearchSpace::contains(const Eigen::VectorXd& x) const {
  if (x.size() != ndim()) return false;
  for (int i = 0; i < ndim(); ++i) {
    if (!dims_[static_cast<std::size_t>(i)].contains(x[i])) return false;
  }
  return true;
}

double SearchSpace::volume() const {
  double v = 1.0;
  for (const auto& d : dims_) v *= d.t_width();
  return v;
}

Eigen::VectorXd SearchSpace::to_unit_cube(const Eigen::VectorXd& x) const {
  if (x.size() != ndim()) {
    throw ValidationError("point has " + std::to_string(x.size()) +
                          " coordinates, space has " + std::to_string(ndim()));
  }
  for (int i = 0; i < ndim(); ++i) {
    const auto& d = dims_[static_cast<std::size_t>(i)];
    if (!d.contains(x[i])) {
      std::ostringstream oss;
      oss << "coordinate " << x[i] << " outside dimension '" << d.name << "' ["
          << d.lower << ", " << d.upper << "]";
      throw ValidationError(oss.str());
    }
  }
  return to_unit_cube_unchecked(x);
}

Eigen::VectorXd SearchSpace::to_unit_cube_unchecked(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u(ndim());
  for (int i = 0; i < ndim(); ++i) {
    const auto& d = dims_[static_cast<std::size_t>(i)];
    const double w = d.t_width();
    u[i] = w == 0.0 ? 0.0 : (d.transform(x[i]) - d.t_lower()) / w;
  }
  return u;
}

Eigen::VectorXd SearchSpace::from_unit_cube(const Eigen::VectorXd& u) const {
  Eigen::VectorXd x(ndim());
  for (int i = 0; i < ndim(); ++i) {
    const auto& d = dims_[static_cast<std::size_t>(i)];
    x[i] = d.untransform(d.t_lower() + u[i] * d.t_width());
  }
  return x;
}

Eigen::VectorXd SearchSpace::sample(Rng& rng) const {
  Eigen::VectorXd x(ndim());
  for (int i = 0; i < ndim(); ++i) {
    const auto& d = dims_[static_cast<std::size_t>(i)];
    const double t = rng.uniform(d.t_lower(), d.t_upper());
    // Clamp guards against one-ulp overshoot of pow(10, log10(upper)).
    double v = std::clamp(d.untransform(t), d.lower, d.upper);
    x[i] = d.snap_to_grid(v);
  }
  return x;
}

bool SearchSpace::subset_of(const SearchSpace& outer) const {
  if (!same_dimensions(outer)) return false;
  for (int i = 0; i < ndim(); ++i) {
    const auto& in = dims_[static_cast<std::size_t>(i)];
    const auto& out = outer.dims_[static_cast<std::size_t>(i)];
    if (in.lower < out.lower || in.upper > out.upper) return false;
  }
  return true;
}

bool SearchSpace::same_dimensions(const SearchSpace& other) const {
  if (ndim() != other.ndim()) return false;
  for (int i = 0; i < ndim(); ++i) {
    const auto& a = dims_[static_cast<std::size_t>(i)];
    const auto& b = other.dims_[static_cast<std::size_t>(i)];
    if (a.name != b.name || a.scale != b.scale) return false;
  }
  return true;
}

std::vector<Eigen::VectorXd> uniform_sample(const SearchSpace& space, Budget b,
                                            RngSeed seed) {
  if (b.count < 1) throw ValidationError("budget must be at least 1");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(b.count));
  for (int i = 0; i < b.count; ++i) out.push_back(space.sample(rng));
  return out;
}

Dataset::Dataset(SearchSpace space, std::vector<Observation> obs)
    : space_(std::move(space)), obs_(std::move(obs)) {
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    if (!std::isfinite(obs_[i].y)) {
      throw ValidationError("observation " + std::to_string(i) +
                            ": non-finite objective value");
    }
    if (!space_.contains(obs_[i].x)) {
      throw ValidationError("observation " + std::to_string(i) +
                            " lies outside the search space");
    }
  }
}

double Dataset::incumbent() const {
  if (obs_.empty()) throw ValidationError("incumbent of an empty dataset");
  double best = obs_.front().y;
  for (const auto& o : obs_) best = std::min(best, o.y);
  return best;
}

int Dataset::argmin() const {
  if (obs_.empty()) throw ValidationError("argmin of an empty dataset");
  int best = 0;
  for (int i = 1; i < size(); ++i) {
    if (obs_[static_cast<std::size_t>(i)].y < obs_[static_cast<std::size_t>(best)].y)
      best = i;
  }
  return best;
}

int Dataset::argmax() const {
  if (obs_.empty()) throw ValidationError("argmax of an empty dataset");
  int worst = 0;
  for (int i = 1; i < size(); ++i) {
    if (obs_[static_cast<std::size_t>(i)].y > obs_[static_cast<std::size_t>(worst)].y)
      worst = i;
  }
  return worst;
}

Eigen::MatrixXd Dataset::x_matrix() const {
  Eigen::MatrixXd X(size(), space_.ndim());
  for (int i = 0; i < size(); ++i) {
    X.row(i) = obs_[static_cast<std::size_t>(i)].x.transpose();
  }
  return X;
}

Eigen::VectorXd Dataset::y_vector() const {
  Eigen::VectorXd y(size());
  for (int i = 0; i < size(); ++i) y[i] = obs_[static_cast<std::size_t>(i)].y;
  return y;
}

}  // namespace spaceopt
