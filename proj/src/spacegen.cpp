#include "spaceopt/spacegen.hpp"

#include <algorithm>
#include <cmath>

#include "spaceopt/errors.hpp"

namespace spaceopt {

namespace {

void check_rate(ReductionRate rate) {
  if (!(rate.rho > 0.0) || rate.rho > 1.0) {
    throw ValidationError("reduction rate must lie in (0, 1], got " +
                          std::to_string(rate.rho));
  }
}

std::vector<double> filtered_grid(const ParamDomain& base, double lo, double hi) {
  std::vector<double> g;
  for (double v : base.grid) {
    if (v >= lo && v <= hi) g.push_back(v);
  }
  return g;
}

// Rebuilds a dimension from transformed bounds, reusing the base's natural
// bounds exactly when an end is unclipped/at the boundary.
ParamDomain make_subdim(const ParamDomain& base, double t_lo, double t_hi) {
  double lo = t_lo <= base.t_lower() ? base.lower : base.untransform(t_lo);
  double hi = t_hi >= base.t_upper() ? base.upper : base.untransform(t_hi);
  lo = std::clamp(lo, base.lower, base.upper);
  hi = std::clamp(hi, lo, base.upper);
  ParamDomain d{base.name, base.scale, lo, hi, filtered_grid(base, lo, hi)};
  d.validate();
  return d;
}

}  // namespace

SearchSpace random_subspace(const SearchSpace& base, ReductionRate rate,
                            RngSeed seed) {
  check_rate(rate);
  if (rate.rho == 1.0) return base;
  const double per_dim = std::pow(rate.rho, 1.0 / base.ndim());
  Rng rng(seed);
  std::vector<ParamDomain> dims;
  dims.reserve(static_cast<std::size_t>(base.ndim()));
  for (const auto& bd : base.dims()) {
    const double width = bd.t_width();
    const double len = per_dim * width;
    const double u = rng.uniform01();
    const double t_lo = bd.t_lower() + u * std::max(0.0, width - len);
    dims.push_back(make_subdim(bd, t_lo, t_lo + len));
  }
  return SearchSpace(std::move(dims));
}

SearchSpace centered_subspace(const SearchSpace& base, const Eigen::VectorXd& center,
                              ReductionRate rate) {
  check_rate(rate);
  if (center.size() != base.ndim()) {
    throw ValidationError("center has " + std::to_string(center.size()) +
                          " coordinates, base space has " +
                          std::to_string(base.ndim()));
  }
  std::vector<ParamDomain> dims;
  dims.reserve(static_cast<std::size_t>(base.ndim()));
  const double per_dim = std::pow(rate.rho, 1.0 / base.ndim());
  for (int i = 0; i < base.ndim(); ++i) {
    const auto& bd = base.dim(i);
    if (!bd.contains(center[i])) {
      throw ValidationError("center coordinate " + std::to_string(center[i]) +
                            " outside dimension '" + bd.name + "'");
    }
    const double len = per_dim * bd.t_width();
    const double tc = bd.transform(center[i]);
    const double t_lo = std::max(bd.t_lower(), tc - 0.5 * len);
    const double t_hi = std::min(bd.t_upper(), tc + 0.5 * len);
    ParamDomain d = make_subdim(bd, t_lo, t_hi);
    // The center stays inside even when untransform rounds by an ulp.
    d.lower = std::min(d.lower, center[i]);
    d.upper = std::max(d.upper, center[i]);
    dims.push_back(std::move(d));
  }
  return SearchSpace(std::move(dims));
}

std::vector<RatedSpace> propose_search_spaces(const SearchSpace& base,
                                              const std::vector<ReductionRate>& rates,
                                              int per_rate, RngSeed seed) {
  if (per_rate < 1) throw ValidationError("per_rate must be >= 1");
  if (rates.empty()) throw ValidationError("no reduction rates given");
  std::vector<RatedSpace> out;
  out.reserve(rates.size() * static_cast<std::size_t>(per_rate));
  std::uint64_t index = 0;
  for (const ReductionRate& rate : rates) {
    check_rate(rate);
    for (int k = 0; k < per_rate; ++k, ++index) {
      const RngSeed sub = derive_seed(seed, streams::kSpaceGen, index);
      out.push_back({random_subspace(base, rate, sub), rate.rho, sub});
    }
  }
  return out;
}

}  // namespace spaceopt
