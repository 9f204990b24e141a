#pragma once

#include <vector>

#include "spaceopt/rng.hpp"
#include "spaceopt/search_space.hpp"

namespace spaceopt {

/// Target ratio of a generated subspace's transformed volume to the base
/// space's volume.
struct ReductionRate {
  double rho = 1.0;
};

/// A generated subspace together with the rate and stream that produced it.
struct RatedSpace {
  SearchSpace space;
  double rate = 1.0;
  RngSeed seed;
};

/// Uniformly placed subspace with exactly rho times the base volume: each
/// transformed interval gets length rho^(1/d) * width and a lower bound drawn
/// uniformly over the feasible range. rho = 1 returns the base intervals
/// unchanged. Grids are inherited, filtered to the new interval.
SearchSpace random_subspace(const SearchSpace& base, ReductionRate rate,
                            RngSeed seed);

/// Subspace of target volume rho * volume(base) centered on a point, with
/// interval ends clipped to the base bounds; clipping can shrink the volume
/// below the target (never above). The center must lie inside the base.
SearchSpace centered_subspace(const SearchSpace& base, const Eigen::VectorXd& center,
                              ReductionRate rate);

/// |rates| * per_rate random subspaces tagged with their rates, one derived
/// stream per space.
std::vector<RatedSpace> propose_search_spaces(const SearchSpace& base,
                                              const std::vector<ReductionRate>& rates,
                                              int per_rate, RngSeed seed);

}  // namespace spaceopt
