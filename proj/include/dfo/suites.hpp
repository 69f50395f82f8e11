#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/core.hpp"

namespace dfo::suites {

/// Side of the common search box [-kBoxHalfWidth, kBoxHalfWidth]^D.
inline constexpr double kBoxHalfWidth = 100.0;
/// Shifted optima are drawn from [-kShiftHalfWidth, kShiftHalfWidth]^D.
inline constexpr double kShiftHalfWidth = 80.0;

// A classical test function on its usual domain. The minimizer is the
// constant vector (optimum_coord, ..., optimum_coord).
struct BaseFunction {
  std::string_view name;
  double domain_lo;
  double domain_hi;
  double optimum_coord;
  double (*evaluator)(std::span<const double>);
  bool smooth;
  bool multimodal;

  double f_star(std::size_t dim) const;
  std::vector<double> x_star_canonical(std::size_t dim) const;
  /// Box coordinate of the canonical optimum under the domain map.
  double optimum_in_box() const;
  /// Maps a box coordinate in [-100, 100] onto the canonical domain.
  double to_domain(double z) const;
};

const std::vector<BaseFunction>& catalog();
/// Throws InvalidArgument("unknown function ...") when absent.
const BaseFunction& find_function(std::string_view name);

enum class TransformKind { none, shift, shift_rotate };

std::string_view to_string(TransformKind kind);

// x_problem = rotation * x_classic + shift, i.e. the transformed problem at
// R*x + s equals the untransformed one at x.
struct Transform {
  std::vector<double> shift;
  std::vector<double> rotation;  // row-major dim x dim; empty means identity
  std::uint64_t seed = 0;
  std::size_t dim = 0;

  bool rotated() const { return !rotation.empty(); }
  /// R * x + shift.
  std::vector<double> forward(std::span<const double> x) const;
  /// R^T * (y - shift).
  std::vector<double> inverse(std::span<const double> y) const;
};

/// Product of `dim` Householder reflections built from seeded Gaussian vectors.
/// Row-major dim x dim.
std::vector<double> random_orthogonal(std::size_t dim, std::uint64_t seed);

/// Transform for `base` in `dim`; the optimum lands at a point drawn uniformly
/// from [-80, 80]^dim. Seed 0 or kind none gives the identity.
Transform make_transform(const BaseFunction& base, std::size_t dim, std::uint64_t seed,
                         TransformKind kind);

/// Builds a problem on [-100, 100]^dim. Throws InvalidArgument for unknown
/// names or dim < 2.
Problem make_function(std::string_view name, std::size_t dim, std::uint64_t seed,
                      TransformKind kind = TransformKind::shift_rotate);

const std::vector<std::string>& suite_names();

/// Deterministic problem list. Suites: classic, shifted, shifted_rotated,
/// multimodal_hard.
std::vector<Problem> suite(std::string_view name, std::size_t dim);

/// JSON array describing the suite instances (name, base, dim, f_star, seed,
/// transform, multimodal, x_star).
std::string suite_listing_json(std::string_view name, std::span<const std::size_t> dims);

}  // namespace dfo::suites
