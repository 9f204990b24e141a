#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spaceopt/rng.hpp"

namespace spaceopt {

/// How many future objective evaluations a score is conditioned on.
struct Budget {
  int count = 1;
};

enum class Scale { kLinear, kLog10 };

std::string_view scale_name(Scale s);
Scale parse_scale(std::string_view name);

/// One dimension of a hyperrectangular search space: a closed interval in
/// natural units, searched either linearly or on a log10 scale, optionally
/// quantized to a grid of allowed values.
///
/// A zero-width interval (lower == upper) marks a dimension pinned to a fixed
/// value; sampling always returns that value and the dimension contributes
/// zero transformed length.
struct ParamDomain {
  std::string name;
  Scale scale = Scale::kLinear;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<double> grid;  // ascending, all inside [lower, upper]; may be empty

  static ParamDomain continuous(std::string name, Scale scale, double lower,
                                double upper);
  static ParamDomain with_grid(std::string name, Scale scale, double lower,
                               double upper, std::vector<double> grid);
  static ParamDomain fixed(std::string name, Scale scale, double value);

  bool is_fixed() const { return lower == upper; }
  bool contains(double v) const { return v >= lower && v <= upper; }

  /// Natural units -> transformed coordinate (identity or log10).
  double transform(double v) const;
  double untransform(double t) const;
  double t_lower() const { return transform(lower); }
  double t_upper() const { return transform(upper); }
  double t_width() const { return t_upper() - t_lower(); }

  /// Nearest grid value (ties resolve to the smaller value). Identity when
  /// the grid is empty.
  double snap_to_grid(double v) const;

  /// Throws ValidationError when the invariants do not hold.
  void validate() const;
};

/// An axis-aligned hyperrectangle over named dimensions. Geometry (volume,
/// sampling, unit-cube mapping) lives in transformed coordinates; grids only
/// affect sampling.
class SearchSpace {
 public:
  /// Empty placeholder (ndim() == 0); every constructed-from-dims space has
  /// at least one dimension.
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamDomain> dims);

  int ndim() const { return static_cast<int>(dims_.size()); }
  const std::vector<ParamDomain>& dims() const { return dims_; }
  const ParamDomain& dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }

  /// Index of a dimension by name, or -1.
  int dim_index(std::string_view name) const;

  bool contains(const Eigen::VectorXd& x) const;

  /// Product of transformed interval lengths.
  double volume() const;

  /// Maps a natural-units point into [0,1]^d. Throws an out-of-domain
  /// ValidationError naming the offending dimension.
  Eigen::VectorXd to_unit_cube(const Eigen::VectorXd& x) const;

  /// Same map without the containment check; coordinates outside the space
  /// land outside [0,1]. Used when querying a model beyond its training box.
  Eigen::VectorXd to_unit_cube_unchecked(const Eigen::VectorXd& x) const;

  Eigen::VectorXd from_unit_cube(const Eigen::VectorXd& u) const;

  /// One uniform draw in the transformed hyperrectangle, mapped back to
  /// natural units and snapped to the grid where one is present. Consumes
  /// exactly one uniform per dimension.
  Eigen::VectorXd sample(Rng& rng) const;

  /// True when every interval of this space lies inside the corresponding
  /// interval of `outer` (dimensions matched by position).
  bool subset_of(const SearchSpace& outer) const;

  bool same_dimensions(const SearchSpace& other) const;

 private:
  std::vector<ParamDomain> dims_;
};

/// i.i.d. uniform batch of b points, deterministic under the seed.
std::vector<Eigen::VectorXd> uniform_sample(const SearchSpace& space, Budget b,
                                            RngSeed seed);

/// One observed evaluation: natural-units location and objective value
/// (lower is better).
struct Observation {
  Eigen::VectorXd x;
  double y = 0.0;
};

/// Observations together with the base space they were drawn from.
class Dataset {
 public:
  Dataset(SearchSpace space, std::vector<Observation> obs);

  const SearchSpace& space() const { return space_; }
  const std::vector<Observation>& obs() const { return obs_; }
  int size() const { return static_cast<int>(obs_.size()); }

  /// Best (minimum) observed objective value. Throws on an empty dataset.
  double incumbent() const;
  /// Index of the best observation.
  int argmin() const;
  /// Index of the worst observation.
  int argmax() const;

  Eigen::MatrixXd x_matrix() const;  // n x d, natural units
  Eigen::VectorXd y_vector() const;

 private:
  SearchSpace space_;
  std::vector<Observation> obs_;
};

}  // namespace spaceopt
