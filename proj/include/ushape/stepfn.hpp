#pragma once

#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ushape {

/// Which one-sided value to take at a point: the cadlag value (`right`) or
/// the limit from below (`left`).
enum class Side { right, left };

/// Compact interval [a, b] with finite a < b.
class Interval {
 public:
  Interval(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  double midpoint() const noexcept { return 0.5 * (a_ + b_); }
  bool contains(double t) const noexcept { return t >= a_ && t <= b_; }
  bool contains(const Interval& j) const noexcept { return j.a_ >= a_ && j.b_ <= b_; }

  /// Breakpoints closer than this are treated as one.
  double merge_tolerance() const noexcept { return 1e-12 * (b_ - a_); }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Cadlag piecewise-constant function on an interval.
///
/// `values()[0]` holds on [a, t_1), `values()[k]` on [t_k, t_{k+1}), and the
/// last value on [t_K, b]. A breakpoint may sit exactly at b, in which case
/// the final value is the value at the single point b.
class StepFunction {
 public:
  enum class Monotone { none, nondecreasing };

  /// Breakpoints closer than `domain.merge_tolerance()` are merged (the later
  /// value wins); breakpoints at or numerically on top of `a` fold into the
  /// initial value. Throws DomainError on size mismatch, unsorted or
  /// out-of-domain breakpoints, non-finite values, or when `flag` is
  /// `nondecreasing` but the values are not.
  StepFunction(Interval domain, std::vector<double> breakpoints, std::vector<double> values,
               Monotone flag = Monotone::none);

  static StepFunction constant(Interval domain, double value);

  const Interval& domain() const noexcept { return domain_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  Monotone monotone() const noexcept { return monotone_; }

  /// Throws DomainError when t lies outside the domain.
  double eval(double t, Side side = Side::right) const;
  double operator()(double t, Side side = Side::right) const { return eval(t, side); }

  bool is_nondecreasing() const noexcept;

 private:
  Interval domain_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  Monotone monotone_;
};

/// Piecewise-affine function on an interval.
///
/// Segment i runs over [x_i, x_{i+1}] and interpolates from `starts()[i]`
/// (the value at x_i) to `ends()[i]` (the limit at x_{i+1} from below). The
/// value at the closed right end b is `terminal()`. The function is
/// continuous wherever `ends()[i-1] == starts()[i]`; envelopes built by this
/// library jump at most at the unimodal mode and at b.
class PiecewiseAffine {
 public:
  /// Continuous interpolant through (knots[i], values[i]).
  PiecewiseAffine(Interval domain, std::vector<double> knots, std::vector<double> values);

  static PiecewiseAffine from_segments(Interval domain, std::vector<double> knots,
                                       std::vector<double> starts, std::vector<double> ends,
                                       double terminal);

  /// The function t -> intercept + slope * (t - a).
  static PiecewiseAffine affine(Interval domain, double intercept, double slope);

  const Interval& domain() const noexcept { return domain_; }
  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> starts() const noexcept { return starts_; }
  std::span<const double> ends() const noexcept { return ends_; }
  double terminal() const noexcept { return terminal_; }
  std::size_t segments() const noexcept { return starts_.size(); }

  double eval(double t, Side side = Side::right) const;
  double operator()(double t, Side side = Side::right) const { return eval(t, side); }

  /// Points where the left limit and the value differ by more than `tol`.
  std::vector<double> discontinuities(double tol = 0.0) const;

 private:
  PiecewiseAffine(Interval domain);

  Interval domain_;
  std::vector<double> knots_;
  std::vector<double> starts_;
  std::vector<double> ends_;
  double terminal_ = 0.0;
};

/// Finite partition a = t_0 < ... < t_D = b of an interval.
class Partition {
 public:
  explicit Partition(std::vector<double> endpoints);

  static Partition uniform(const Interval& domain, std::size_t cells);

  std::span<const double> endpoints() const noexcept { return endpoints_; }
  std::size_t cells() const noexcept { return endpoints_.size() - 1; }
  Interval cell(std::size_t k) const { return {endpoints_[k], endpoints_[k + 1]}; }
  Interval domain() const { return {endpoints_.front(), endpoints_.back()}; }

 private:
  std::vector<double> endpoints_;
};

template <class F>
concept PiecewiseFunction = std::same_as<F, StepFunction> || std::same_as<F, PiecewiseAffine>;

/// Exact conversion of a step function into segment form.
PiecewiseAffine as_affine(const StepFunction& f);
inline const PiecewiseAffine& as_affine(const PiecewiseAffine& f) { return f; }

inline double eval(const PiecewiseFunction auto& f, double t, Side side = Side::right) {
  return f.eval(t, side);
}

namespace detail {
double integral(const PiecewiseAffine& f, const Interval& j);
double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j);
double sup_difference(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j,
                      double offset);
double sup_distance(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j,
                    double offset);
void check_subdomain(const Interval& outer, const Interval& inner);
void require_same_domain(const Interval& f, const Interval& g);
}  // namespace detail

/// ∫_J f(t) dt.
inline double integral(const PiecewiseFunction auto& f, const Interval& j) {
  return detail::integral(as_affine(f), j);
}
inline double integral(const PiecewiseFunction auto& f) { return integral(f, f.domain()); }

/// ∫_J |f - g|, exact on the merged breakpoint grid.
inline double l1_distance(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g,
                          const Interval& j) {
  return detail::l1_distance(as_affine(f), as_affine(g), j);
}
/// Over the common domain; throws DomainError when the domains differ.
double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g);
inline double l1_distance(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g) {
  return l1_distance(as_affine(f), as_affine(g));
}

/// L1 distance divided by the length of J (the per-unit-time convention
/// used for counting-process rates).
inline double normalized_l1_distance(const PiecewiseFunction auto& f,
                                     const PiecewiseFunction auto& g, const Interval& j) {
  return l1_distance(f, g, j) / j.length();
}

/// sup_{t in J} (f(t) - g(t) - offset), including left limits and the value
/// at the closed right end of J.
inline double sup_difference(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g,
                             const Interval& j, double offset = 0.0) {
  return detail::sup_difference(as_affine(f), as_affine(g), j, offset);
}

/// sup_{t in J} |f(t) - g(t)|, both one-sided values at every breakpoint.
inline double sup_distance(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g,
                           const Interval& j) {
  return detail::sup_distance(as_affine(f), as_affine(g), j, 0.0);
}
inline double sup_distance(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g) {
  detail::require_same_domain(f.domain(), g.domain());
  return sup_distance(f, g, f.domain());
}

/// sup_{t in J} |Z(t) - Z(J.a)| for Z = f - g.
inline double sup_increment(const PiecewiseFunction auto& f, const PiecewiseFunction auto& g,
                            const Interval& j) {
  const double z0 = f.eval(j.a()) - g.eval(j.a());
  return detail::sup_distance(as_affine(f), as_affine(g), j, z0);
}

struct IntervalStats {
  double mean;         ///< (1/l(J)) ∫_J g
  double oscillation;  ///< ∫_J |g - mean|
};

IntervalStats interval_stats(const StepFunction& g, const Interval& j);

/// Continuous antiderivative, zero at the left end of the domain.
PiecewiseAffine cumulative(const StepFunction& f);

// CSV serialization. Rows are `t,value` under that header: a leading row at
// a, one per breakpoint (two rows, left then right, at a jump of a
// piecewise-affine function), and a closing row at b.
void write_csv(std::ostream& out, const StepFunction& f);
void write_csv(std::ostream& out, const PiecewiseAffine& f);
StepFunction read_step_function_csv(std::istream& in);
PiecewiseAffine read_piecewise_affine_csv(std::istream& in);

}  // namespace ushape
