#include "ushape/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "numeric.hpp"
#include "ushape/error.hpp"

namespace ushape {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string show(double x) { return detail::format_number(x); }

// Walks a piecewise-affine function left to right; calls must come with
// nondecreasing t.
class Cursor {
 public:
  explicit Cursor(const PiecewiseAffine& f) : f_(f), knots_(f.knots()) {}

  double right(double t) {
    if (t >= knots_.back()) return f_.terminal();
    while (knots_[seg_ + 1] <= t) ++seg_;
    return interpolate(t);
  }

  double left(double t) {
    if (t <= knots_.front()) return f_.starts()[0];
    while (knots_[seg_ + 1] < t) ++seg_;
    return interpolate(t);
  }

 private:
  double interpolate(double t) const {
    const double x0 = knots_[seg_];
    const double x1 = knots_[seg_ + 1];
    return std::lerp(f_.starts()[seg_], f_.ends()[seg_], (t - x0) / (x1 - x0));
  }

  const PiecewiseAffine& f_;
  std::span<const double> knots_;
  std::size_t seg_ = 0;
};

std::vector<double> merged_grid(std::span<const double> x, std::span<const double> y,
                                const Interval& j) {
  std::vector<double> grid;
  grid.reserve(x.size() + y.size() + 2);
  grid.push_back(j.a());
  auto xi = std::upper_bound(x.begin(), x.end(), j.a());
  auto yi = std::upper_bound(y.begin(), y.end(), j.a());
  while (true) {
    const double nx = (xi != x.end() && *xi < j.b()) ? *xi : j.b();
    const double ny = (yi != y.end() && *yi < j.b()) ? *yi : j.b();
    const double next = std::min(nx, ny);
    if (next >= j.b()) break;
    grid.push_back(next);
    if (nx == next) ++xi;
    if (ny == next) ++yi;
  }
  grid.push_back(j.b());
  return grid;
}

// Visits every cell of the merged grid with the difference f - g - offset
// at the cell's left end (right value) and right end (left limit), then the
// value at the closed right end of J.
template <class CellFn, class PointFn>
void walk_difference(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j,
                     double offset, CellFn&& on_cell, PointFn&& on_end) {
  detail::check_subdomain(f.domain(), j);
  detail::check_subdomain(g.domain(), j);
  const auto grid = merged_grid(f.knots(), g.knots(), j);
  Cursor cf(f), cg(g);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double x0 = grid[i], x1 = grid[i + 1];
    const double d0 = cf.right(x0) - cg.right(x0) - offset;
    const double d1 = cf.left(x1) - cg.left(x1) - offset;
    on_cell(x0, x1, d0, d1);
  }
  on_end(cf.right(j.b()) - cg.right(j.b()) - offset);
}

// ∫ |affine from d0 to d1| over a cell of width h.
double abs_affine_integral(double d0, double d1, double h) {
  const double a0 = std::abs(d0), a1 = std::abs(d1);
  if ((d0 >= 0 && d1 >= 0) || (d0 <= 0 && d1 <= 0)) return 0.5 * (a0 + a1) * h;
  return 0.5 * (d0 * d0 + d1 * d1) / (a0 + a1) * h;
}

}  // namespace

// --- Interval -------------------------------------------------------------

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!finite(a) || !finite(b) || !(a < b))
    throw DomainError("interval requires finite a < b, got [" + show(a) + ", " + show(b) + "]");
}

// --- StepFunction ---------------------------------------------------------

StepFunction::StepFunction(Interval domain, std::vector<double> breakpoints,
                           std::vector<double> values, Monotone flag)
    : domain_(domain), monotone_(flag) {
  if (values.size() != breakpoints.size() + 1)
    throw DomainError("step function needs exactly one more value than breakpoints");
  const double tol = domain.merge_tolerance();
  values_.push_back(values[0]);
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    double t = breakpoints[k];
    const double v = values[k + 1];
    if (!finite(t) || t < domain.a() - tol || t > domain.b() + tol)
      throw DomainError("breakpoint " + show(t) + " outside domain");
    if (t <= domain.a() + tol) {
      if (!breakpoints_.empty()) throw DomainError("breakpoints must be increasing");
      values_.back() = v;
      continue;
    }
    t = std::min(t, domain.b());
    if (!breakpoints_.empty() && t <= breakpoints_.back() + tol) {
      if (t < breakpoints_.back() - tol) throw DomainError("breakpoints must be increasing");
      values_.back() = v;
      continue;
    }
    breakpoints_.push_back(t);
    values_.push_back(v);
  }
  for (double v : values_)
    if (!finite(v)) throw DomainError("step function values must be finite");
  if (monotone_ == Monotone::nondecreasing && !is_nondecreasing())
    throw DomainError("values flagged nondecreasing are not");
}

StepFunction StepFunction::constant(Interval domain, double value) {
  return StepFunction(domain, {}, {value});
}

double StepFunction::eval(double t, Side side) const {
  if (!domain_.contains(t))
    throw DomainError("t = " + show(t) + " outside [" + show(domain_.a()) + ", " +
                      show(domain_.b()) + "]");
  const auto& bp = breakpoints_;
  const auto it = side == Side::right ? std::upper_bound(bp.begin(), bp.end(), t)
                                      : std::lower_bound(bp.begin(), bp.end(), t);
  return values_[static_cast<std::size_t>(it - bp.begin())];
}

bool StepFunction::is_nondecreasing() const noexcept {
  return std::is_sorted(values_.begin(), values_.end());
}

// --- PiecewiseAffine ------------------------------------------------------

PiecewiseAffine::PiecewiseAffine(Interval domain) : domain_(domain) {}

PiecewiseAffine::PiecewiseAffine(Interval domain, std::vector<double> knots,
                                 std::vector<double> values)
    : domain_(domain) {
  if (knots.size() < 2 || values.size() != knots.size())
    throw DomainError("piecewise-affine function needs matching knots and values (>= 2)");
  std::vector<double> starts(values.begin(), values.end() - 1);
  std::vector<double> ends(values.begin() + 1, values.end());
  *this = from_segments(domain, std::move(knots), std::move(starts), std::move(ends), values.back());
}

PiecewiseAffine PiecewiseAffine::from_segments(Interval domain, std::vector<double> knots,
                                               std::vector<double> starts,
                                               std::vector<double> ends, double terminal) {
  if (knots.size() < 2 || starts.size() + 1 != knots.size() || ends.size() != starts.size())
    throw DomainError("piecewise-affine segment arrays have inconsistent sizes");
  const double tol = domain.merge_tolerance();
  if (std::abs(knots.front() - domain.a()) > tol || std::abs(knots.back() - domain.b()) > tol)
    throw DomainError("piecewise-affine knots must start at a and end at b");
  knots.front() = domain.a();
  knots.back() = domain.b();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i] < knots[i + 1])) throw DomainError("knots must be strictly increasing");
  for (std::size_t i = 0; i < starts.size(); ++i)
    if (!finite(starts[i]) || !finite(ends[i])) throw DomainError("non-finite knot value");
  if (!finite(terminal)) throw DomainError("non-finite knot value");
  PiecewiseAffine f(domain);
  f.knots_ = std::move(knots);
  f.starts_ = std::move(starts);
  f.ends_ = std::move(ends);
  f.terminal_ = terminal;
  return f;
}

PiecewiseAffine PiecewiseAffine::affine(Interval domain, double intercept, double slope) {
  return PiecewiseAffine(domain, {domain.a(), domain.b()},
                         {intercept, intercept + slope * domain.length()});
}

double PiecewiseAffine::eval(double t, Side side) const {
  if (!domain_.contains(t))
    throw DomainError("t = " + show(t) + " outside [" + show(domain_.a()) + ", " +
                      show(domain_.b()) + "]");
  if (side == Side::right && t >= domain_.b()) return terminal_;
  if (side == Side::left && t <= domain_.a()) return starts_[0];
  const auto it = side == Side::right ? std::upper_bound(knots_.begin(), knots_.end(), t)
                                      : std::lower_bound(knots_.begin(), knots_.end(), t);
  const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::lerp(starts_[i], ends_[i], (t - knots_[i]) / (knots_[i + 1] - knots_[i]));
}

std::vector<double> PiecewiseAffine::discontinuities(double tol) const {
  std::vector<double> out;
  for (std::size_t i = 1; i < starts_.size(); ++i)
    if (std::abs(starts_[i] - ends_[i - 1]) > tol) out.push_back(knots_[i]);
  if (std::abs(terminal_ - ends_.back()) > tol) out.push_back(knots_.back());
  return out;
}

// --- Partition ------------------------------------------------------------

Partition::Partition(std::vector<double> endpoints) : endpoints_(std::move(endpoints)) {
  if (endpoints_.size() < 2) throw DomainError("partition needs at least one cell");
  for (double t : endpoints_)
    if (!finite(t)) throw DomainError("partition endpoints must be finite");
  for (std::size_t i = 0; i + 1 < endpoints_.size(); ++i)
    if (!(endpoints_[i] < endpoints_[i + 1]))
      throw DomainError("partition endpoints must be strictly increasing");
}

Partition Partition::uniform(const Interval& domain, std::size_t cells) {
  if (cells == 0) throw DomainError("partition needs at least one cell");
  std::vector<double> e(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    e[k] = domain.a() + domain.length() * static_cast<double>(k) / static_cast<double>(cells);
  e.back() = domain.b();
  return Partition(std::move(e));
}

// --- geometry -------------------------------------------------------------

PiecewiseAffine as_affine(const StepFunction& f) {
  const auto& d = f.domain();
  const auto bp = f.breakpoints();
  const auto v = f.values();
  std::vector<double> knots{d.a()};
  std::vector<double> levels;
  for (std::size_t k = 0; k < bp.size(); ++k) {
    if (bp[k] >= d.b()) break;
    knots.push_back(bp[k]);
    levels.push_back(v[k]);
  }
  levels.push_back(v[knots.size() - 1]);
  knots.push_back(d.b());
  return PiecewiseAffine::from_segments(d, std::move(knots), levels, levels, v.back());
}

namespace detail {

void check_subdomain(const Interval& outer, const Interval& inner) {
  if (!outer.contains(inner))
    throw DomainError("interval [" + show(inner.a()) + ", " + show(inner.b()) +
                      "] not inside domain [" + show(outer.a()) + ", " + show(outer.b()) + "]");
}

void require_same_domain(const Interval& f, const Interval& g) {
  if (!(f == g)) throw DomainError("functions are defined on different domains");
}

double integral(const PiecewiseAffine& f, const Interval& j) {
  CompensatedSum sum;
  walk_difference(
      f, PiecewiseAffine::affine(f.domain(), 0.0, 0.0), j, 0.0,
      [&](double x0, double x1, double d0, double d1) { sum += 0.5 * (d0 + d1) * (x1 - x0); },
      [](double) {});
  return sum.value();
}

double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j) {
  CompensatedSum sum;
  walk_difference(
      f, g, j, 0.0,
      [&](double x0, double x1, double d0, double d1) {
        sum += abs_affine_integral(d0, d1, x1 - x0);
      },
      [](double) {});
  return sum.value();
}

double sup_difference(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j,
                      double offset) {
  double best = -INFINITY;
  walk_difference(
      f, g, j, offset,
      [&](double, double, double d0, double d1) { best = std::max({best, d0, d1}); },
      [&](double d) { best = std::max(best, d); });
  return best;
}

double sup_distance(const PiecewiseAffine& f, const PiecewiseAffine& g, const Interval& j,
                    double offset) {
  double best = 0.0;
  walk_difference(
      f, g, j, offset,
      [&](double, double, double d0, double d1) {
        best = std::max({best, std::abs(d0), std::abs(d1)});
      },
      [&](double d) { best = std::max(best, std::abs(d)); });
  return best;
}

}  // namespace detail

double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g) {
  detail::require_same_domain(f.domain(), g.domain());
  return detail::l1_distance(f, g, f.domain());
}

IntervalStats interval_stats(const StepFunction& g, const Interval& j) {
  detail::check_subdomain(g.domain(), j);
  const double mean = integral(g, j) / j.length();
  return {mean, l1_distance(g, StepFunction::constant(g.domain(), mean), j)};
}

PiecewiseAffine cumulative(const StepFunction& f) {
  const auto h = as_affine(f);
  const auto x = h.knots();
  std::vector<double> y(x.size(), 0.0);
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    acc += h.starts()[i] * (x[i + 1] - x[i]);
    y[i + 1] = acc.value();
  }
  return PiecewiseAffine(f.domain(), {x.begin(), x.end()}, std::move(y));
}

// --- CSV ------------------------------------------------------------------

namespace {

void write_row(std::ostream& out, double t, double v) {
  out << detail::format_number(t) << ',' << detail::format_number(v) << '\n';
}

std::vector<std::pair<double, double>> read_rows(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  bool header = false;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++row;
    const auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (!header) {
      if (s != "t,value") throw ParseError("expected header 't,value'", row);
      header = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected two columns", row);
    rows.emplace_back(detail::parse_number(s.substr(0, comma), row),
                      detail::parse_number(s.substr(comma + 1), row));
  }
  if (!header) throw ParseError("missing header 't,value'");
  if (rows.size() < 2) throw ParseError("function CSV needs at least two rows");
  return rows;
}

}  // namespace

void write_csv(std::ostream& out, const StepFunction& f) {
  out << "t,value\n";
  const auto bp = f.breakpoints();
  const auto v = f.values();
  write_row(out, f.domain().a(), v[0]);
  for (std::size_t k = 0; k < bp.size(); ++k) write_row(out, bp[k], v[k + 1]);
  if (bp.empty() || bp.back() < f.domain().b()) write_row(out, f.domain().b(), v.back());
}

void write_csv(std::ostream& out, const PiecewiseAffine& f) {
  out << "t,value\n";
  const auto x = f.knots();
  const auto s = f.starts();
  const auto e = f.ends();
  write_row(out, x[0], s[0]);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (e[i - 1] != s[i]) write_row(out, x[i], e[i - 1]);
    write_row(out, x[i], s[i]);
  }
  write_row(out, x.back(), e.back());
  if (f.terminal() != e.back()) write_row(out, x.back(), f.terminal());
}

StepFunction read_step_function_csv(std::istream& in) {
  const auto rows = read_rows(in);
  const Interval domain(rows.front().first, rows.back().first);
  std::vector<double> bp;
  std::vector<double> v{rows.front().second};
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    bp.push_back(rows[i].first);
    v.push_back(rows[i].second);
  }
  if (rows.back().second != v.back()) {
    bp.push_back(domain.b());
    v.push_back(rows.back().second);
  }
  return StepFunction(domain, std::move(bp), std::move(v));
}

PiecewiseAffine read_piecewise_affine_csv(std::istream& in) {
  const auto rows = read_rows(in);
  const Interval domain(rows.front().first, rows.back().first);
  // Group rows sharing an abscissa: one row is a continuity point, two rows
  // are (left limit, value).
  std::vector<double> knots, left, right;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double t = rows[i].first;
    if (!knots.empty() && t == knots.back()) {
      if (right.back() != left.back()) throw ParseError("more than two rows at t = " + show(t));
      right.back() = rows[i].second;
      continue;
    }
    knots.push_back(t);
    left.push_back(rows[i].second);
    right.push_back(rows[i].second);
  }
  if (left.front() != right.front()) throw ParseError("jump at the left end of the domain");
  const std::size_t n = knots.size();
  if (n < 2) throw ParseError("function CSV needs at least two distinct abscissae");
  std::vector<double> starts(right.begin(), right.end() - 1);
  std::vector<double> ends(left.begin() + 1, left.end());
  return PiecewiseAffine::from_segments(domain, std::move(knots), std::move(starts),
                                        std::move(ends), right.back());
}

}  // namespace ushape
