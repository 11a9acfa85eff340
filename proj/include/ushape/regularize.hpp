#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ushape/stepfn.hpp"

namespace ushape {

/// nonincreasing is u_shaped with the valley pinned at b; nondecreasing is
/// u_shaped with the valley pinned at a.
enum class ShapeKind { u_shaped, unimodal, nonincreasing, nondecreasing };

std::string_view to_string(ShapeKind shape);
/// Throws UsageError on an unknown name.
ShapeKind parse_shape(std::string_view name);

enum class Direction { nonincreasing, nondecreasing };

/// Weighted L2 projection of `values` onto the monotone cone (pool adjacent
/// violators). Throws DomainError on empty input, mismatched sizes or a
/// nonpositive weight.
std::vector<double> pava(std::span<const double> values, std::span<const double> weights,
                         Direction direction);

/// Least concave majorant of F restricted to J.
///
/// The hull runs over (J.a, F(J.a)) and, at every later knot, the larger of
/// the two one-sided values of F. The result is continuous on J except that
/// its value at J.b is F(J.b) itself (a concave function may drop at its
/// right end). Throws DomainError when J is not inside F's domain.
PiecewiseAffine concave_majorant(const PiecewiseAffine& F, const Interval& j);
inline PiecewiseAffine concave_majorant(const StepFunction& F, const Interval& j) {
  return concave_majorant(as_affine(F), j);
}

/// Greatest convex minorant of F restricted to J; mirror image of
/// concave_majorant using the smaller one-sided value at each knot.
PiecewiseAffine convex_minorant(const PiecewiseAffine& F, const Interval& j);
inline PiecewiseAffine convex_minorant(const StepFunction& F, const Interval& j) {
  return convex_minorant(as_affine(F), j);
}

struct Regularization {
  PiecewiseAffine envelope;
  double d;  ///< sup_I |F - envelope|
};

/// U-shaped (LCM on [a, m], GCM on [m, b]) or unimodal (GCM then LCM)
/// regularization of F at m. Monotone shapes ignore m and pin it to the
/// matching endpoint. Throws DomainError when m lies outside the domain.
Regularization regularize_at(const PiecewiseAffine& F, double m, ShapeKind shape);
inline Regularization regularize_at(const StepFunction& F, double m, ShapeKind shape) {
  return regularize_at(as_affine(F), m, shape);
}

/// Right-continuous derivative; the value at b is the final segment's slope.
StepFunction slope(const PiecewiseAffine& envelope);

enum class ModeSearch {
  /// Exploits that the error on [a, m] is nondecreasing in m and the error
  /// on [m, b] nonincreasing: O(log n) regularizations.
  bracketed,
  /// Evaluates every candidate and records the full profile.
  exhaustive,
};

struct ProfilePoint {
  double m;
  double d;
};

struct ModeSelection {
  double m;
  double min_value;
  /// Closure of the set where the minimum is attained (u_shaped), or the
  /// final bisection bracket (unimodal). Always contains m.
  double interval_lo;
  double interval_hi;
  /// Sampled d(m); filled only by ModeSearch::exhaustive.
  std::vector<ProfilePoint> profile;
};

/// Data-driven valley/mode: the midpoint of the leftmost interval where
/// d_S(m) = sup|F - U-regularization at m| is minimal (u_shaped, evaluated
/// once per constancy cell of F), or the bisection-refined minimizer of the
/// unimodal error d_N. For monotone shapes returns the pinned endpoint.
ModeSelection select_mode(const PiecewiseAffine& F, ShapeKind shape,
                          ModeSearch search = ModeSearch::bracketed);
inline ModeSelection select_mode(const StepFunction& F, ShapeKind shape,
                                 ModeSearch search = ModeSearch::bracketed) {
  return select_mode(as_affine(F), shape, search);
}

struct ShapeEstimate {
  StepFunction f;
  ShapeKind shape;
  double mode;
  PiecewiseAffine envelope;
  double d;                   ///< sup_I |F - envelope| at the chosen mode
  bool input_nondecreasing;   ///< false flags the regression-style case
};

/// The shape-respecting estimate: slope of the regularization of F at the
/// selected (or supplied) mode.
ShapeEstimate shape_map(const PiecewiseAffine& F, ShapeKind shape,
                        std::optional<double> mode = std::nullopt,
                        ModeSearch search = ModeSearch::bracketed);
inline ShapeEstimate shape_map(const StepFunction& F, ShapeKind shape,
                               std::optional<double> mode = std::nullopt,
                               ModeSearch search = ModeSearch::bracketed) {
  return shape_map(as_affine(F), shape, mode, search);
}

}  // namespace ushape
