#include "ushape/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ushape/error.hpp"

namespace ushape {

std::string_view to_string(ShapeKind shape) {
  switch (shape) {
    case ShapeKind::u_shaped: return "u_shaped";
    case ShapeKind::unimodal: return "unimodal";
    case ShapeKind::nonincreasing: return "nonincreasing";
    case ShapeKind::nondecreasing: return "nondecreasing";
  }
  return "?";
}

ShapeKind parse_shape(std::string_view name) {
  if (name == "u_shaped" || name == "u-shaped") return ShapeKind::u_shaped;
  if (name == "unimodal") return ShapeKind::unimodal;
  if (name == "nonincreasing") return ShapeKind::nonincreasing;
  if (name == "nondecreasing") return ShapeKind::nondecreasing;
  throw UsageError("unknown shape '" + std::string(name) + "'");
}

// --- PAVA -----------------------------------------------------------------

std::vector<double> pava(std::span<const double> values, std::span<const double> weights,
                         Direction direction) {
  if (values.empty()) throw DomainError("pava: empty input");
  if (values.size() != weights.size()) throw DomainError("pava: values and weights differ in size");

  struct Block {
    double wsum;
    double w;
    std::size_t count;
    double mean() const { return wsum / w; }
  };
  // A violation is a block whose mean breaks the requested order relative to
  // its left neighbour.
  const auto violates = [direction](const Block& left, const Block& right) {
    return direction == Direction::nonincreasing ? left.mean() < right.mean()
                                                 : left.mean() > right.mean();
  };

  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0) || !std::isfinite(weights[i]))
      throw DomainError("pava: weights must be positive");
    if (!std::isfinite(values[i])) throw DomainError("pava: values must be finite");
    blocks.push_back({values[i] * weights[i], weights[i], 1});
    while (blocks.size() > 1 && violates(blocks[blocks.size() - 2], blocks.back())) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().wsum += top.wsum;
      blocks.back().w += top.w;
      blocks.back().count += top.count;
    }
  }

  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

// --- hulls ----------------------------------------------------------------

namespace {

struct Point {
  double x, y;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Candidate vertices of the envelope of F on J: the value at J.a, then the
// extreme one-sided value at every knot inside (J.a, J.b].
std::vector<Point> envelope_points(const PiecewiseAffine& F, const Interval& j, bool upper) {
  detail::check_subdomain(F.domain(), j);
  const auto pick = [upper](double l, double r) { return upper ? std::max(l, r) : std::min(l, r); };
  const auto knots = F.knots();
  std::vector<Point> pts;
  pts.push_back({j.a(), F.eval(j.a(), Side::right)});
  auto i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), j.a()) - knots.begin());
  for (; i < knots.size() && knots[i] < j.b(); ++i)
    pts.push_back({knots[i], pick(F.ends()[i - 1], F.starts()[i])});
  pts.push_back({j.b(), pick(F.eval(j.b(), Side::left), F.eval(j.b(), Side::right))});
  return pts;
}

PiecewiseAffine hull_envelope(const PiecewiseAffine& F, const Interval& j, bool upper) {
  const auto pts = envelope_points(F, j, upper);
  std::vector<Point> hull;
  hull.reserve(pts.size());
  for (const auto& p : pts) {
    // Upper hull keeps strict right turns, lower hull strict left turns;
    // collinear vertices are dropped.
    while (hull.size() >= 2) {
      const double c = cross(hull[hull.size() - 2], hull.back(), p);
      if (upper ? c >= 0 : c <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  std::vector<double> knots, starts, ends;
  knots.reserve(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    knots.push_back(hull[i].x);
    if (i + 1 < hull.size()) {
      starts.push_back(hull[i].y);
      ends.push_back(hull[i + 1].y);
    }
  }
  return PiecewiseAffine::from_segments(j, std::move(knots), std::move(starts), std::move(ends),
                                        F.eval(j.b(), Side::right));
}

PiecewiseAffine join(const PiecewiseAffine& left, const PiecewiseAffine& right,
                     const Interval& domain) {
  std::vector<double> knots(left.knots().begin(), left.knots().end());
  knots.insert(knots.end(), right.knots().begin() + 1, right.knots().end());
  std::vector<double> starts(left.starts().begin(), left.starts().end());
  starts.insert(starts.end(), right.starts().begin(), right.starts().end());
  std::vector<double> ends(left.ends().begin(), left.ends().end());
  ends.insert(ends.end(), right.ends().begin(), right.ends().end());
  return PiecewiseAffine::from_segments(domain, std::move(knots), std::move(starts),
                                        std::move(ends), right.terminal());
}

bool valley_shape(ShapeKind s) { return s != ShapeKind::unimodal; }

double pinned_mode(const Interval& d, double m, ShapeKind shape) {
  if (shape == ShapeKind::nonincreasing) return d.b();
  if (shape == ShapeKind::nondecreasing) return d.a();
  if (!d.contains(m)) throw DomainError("mode outside the domain");
  return m;
}

// The two halves of the regularization at m and their sup errors. The
// error on [a, m] can only grow with m and the error on [m, b] can only
// shrink, which is what the bracketed mode search relies on.
struct Split {
  std::optional<PiecewiseAffine> left, right;
  double left_error = 0.0;
  double right_error = 0.0;
  double d() const { return std::max(left_error, right_error); }
};

Split split_at(const PiecewiseAffine& F, double m, ShapeKind shape) {
  const auto& dom = F.domain();
  const bool valley = valley_shape(shape);
  Split s;
  if (m > dom.a()) {
    const Interval j(dom.a(), m);
    s.left = valley ? concave_majorant(F, j) : convex_minorant(F, j);
    s.left_error = sup_distance(F, *s.left, j);
  }
  if (m < dom.b()) {
    const Interval j(m, dom.b());
    s.right = valley ? convex_minorant(F, j) : concave_majorant(F, j);
    s.right_error = sup_distance(F, *s.right, j);
  }
  return s;
}

bool nondecreasing(const PiecewiseAffine& F) {
  const auto s = F.starts();
  const auto e = F.ends();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (e[i] < s[i]) return false;
    if (i > 0 && s[i] < e[i - 1]) return false;
  }
  return F.terminal() >= e.back();
}

bool is_constant(const PiecewiseAffine& F) {
  const double v = F.starts()[0];
  for (std::size_t i = 0; i < F.segments(); ++i)
    if (F.starts()[i] != v || F.ends()[i] != v) return false;
  return F.terminal() == v;
}

struct Cell {
  double lo, hi;
  double mid() const { return 0.5 * (lo + hi); }
};

// Memoized split errors over an indexed candidate list.
class CandidateErrors {
 public:
  CandidateErrors(const PiecewiseAffine& F, ShapeKind shape, std::vector<double> m)
      : F_(F), shape_(shape), m_(std::move(m)) {}

  std::size_t size() const { return m_.size(); }
  double m(std::size_t i) const { return m_[i]; }

  const std::pair<double, double>& at(std::size_t i) {
    auto it = cache_.find(i);
    if (it == cache_.end()) {
      const auto s = split_at(F_, m_[i], shape_);
      it = cache_.emplace(i, std::pair{s.left_error, s.right_error}).first;
    }
    return it->second;
  }
  double left(std::size_t i) { return at(i).first; }
  double right(std::size_t i) { return at(i).second; }
  double d(std::size_t i) { return std::max(left(i), right(i)); }

  /// First index whose left error reaches its right error (size() if none).
  std::size_t crossing() {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (left(mid) >= right(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  const PiecewiseAffine& F_;
  ShapeKind shape_;
  std::vector<double> m_;
  std::map<std::size_t, std::pair<double, double>> cache_;
};

double tie_tolerance(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

ModeSelection select_valley(const PiecewiseAffine& F, ModeSearch search) {
  const auto& dom = F.domain();
  const auto knots = F.knots();
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) cells.push_back({knots[i], knots[i + 1]});
  if (F.terminal() != F.ends().back()) cells.push_back({dom.b(), dom.b()});

  std::vector<double> mids;
  for (const auto& c : cells) mids.push_back(c.mid());
  CandidateErrors errs(F, ShapeKind::u_shaped, mids);
  const std::size_t n = errs.size();

  ModeSelection out{};
  std::size_t first = 0, last = 0;
  if (search == ModeSearch::exhaustive) {
    double best = INFINITY;
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, errs.d(i));
    const double thr = best + tie_tolerance(best);
    while (errs.d(first) > thr) ++first;
    last = first;
    while (last + 1 < n && errs.d(last + 1) <= thr) ++last;
    out.min_value = best;
    out.profile.push_back({dom.a(), split_at(F, dom.a(), ShapeKind::u_shaped).d()});
    for (std::size_t i = 0; i < n; ++i) out.profile.push_back({errs.m(i), errs.d(i)});
    out.profile.push_back({dom.b(), split_at(F, dom.b(), ShapeKind::u_shaped).d()});
  } else {
    const std::size_t k = errs.crossing();
    double best = INFINITY;
    if (k > 0) best = std::min(best, errs.d(k - 1));
    if (k < n) best = std::min(best, errs.d(k));
    const double thr = best + tie_tolerance(best);
    // Left of the crossing d equals the (nonincreasing) right error.
    std::size_t lo = 0, hi = k;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (errs.right(mid) <= thr)
        hi = mid;
      else
        lo = mid + 1;
    }
    first = lo;
    // From the crossing on d equals the (nondecreasing) left error.
    lo = k;
    hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (errs.left(mid) <= thr)
        lo = mid + 1;
      else
        hi = mid;
    }
    last = lo == k ? k - 1 : lo - 1;
    out.min_value = best;
  }
  out.interval_lo = cells[first].lo;
  out.interval_hi = cells[last].hi;
  out.m = 0.5 * (out.interval_lo + out.interval_hi);
  return out;
}

ModeSelection select_peak(const PiecewiseAffine& F, ModeSearch search) {
  const auto& dom = F.domain();
  const auto knots = F.knots();
  std::vector<double> pts;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    pts.push_back(knots[i]);
    pts.push_back(0.5 * (knots[i] + knots[i + 1]));
  }
  pts.push_back(dom.b());
  CandidateErrors errs(F, ShapeKind::unimodal, pts);

  ModeSelection out{};
  if (search == ModeSearch::exhaustive)
    for (std::size_t i = 0; i < errs.size(); ++i) out.profile.push_back({errs.m(i), errs.d(i)});

  const std::size_t j = errs.crossing();
  if (j == 0) {
    out.m = out.interval_lo = out.interval_hi = dom.a();
    out.min_value = errs.d(0);
    return out;
  }
  // Bisect on the sign of (left error - right error) inside the bracket.
  double lo = errs.m(j - 1), hi = errs.m(j);
  double d_lo = errs.right(j - 1), d_hi = errs.left(j);
  const double tol = 1e-9 * dom.length();
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const auto s = split_at(F, mid, ShapeKind::unimodal);
    if (s.left_error >= s.right_error) {
      hi = mid;
      d_hi = s.left_error;
    } else {
      lo = mid;
      d_lo = s.right_error;
    }
  }
  out.interval_lo = lo;
  out.interval_hi = hi;
  if (d_lo <= d_hi) {
    out.m = lo;
    out.min_value = d_lo;
  } else {
    out.m = hi;
    out.min_value = d_hi;
  }
  return out;
}

}  // namespace

PiecewiseAffine concave_majorant(const PiecewiseAffine& F, const Interval& j) {
  return hull_envelope(F, j, true);
}

PiecewiseAffine convex_minorant(const PiecewiseAffine& F, const Interval& j) {
  return hull_envelope(F, j, false);
}

Regularization regularize_at(const PiecewiseAffine& F, double m, ShapeKind shape) {
  const auto& dom = F.domain();
  m = pinned_mode(dom, m, shape);
  auto s = split_at(F, m, shape);
  PiecewiseAffine env = !s.left    ? std::move(*s.right)
                        : !s.right ? std::move(*s.left)
                                   : join(*s.left, *s.right, dom);
  const double d = sup_distance(F, env, dom);
  return {std::move(env), d};
}

StepFunction slope(const PiecewiseAffine& envelope) {
  const auto x = envelope.knots();
  std::vector<double> bp(x.begin() + 1, x.end() - 1);
  std::vector<double> v;
  v.reserve(envelope.segments());
  for (std::size_t i = 0; i < envelope.segments(); ++i)
    v.push_back((envelope.ends()[i] - envelope.starts()[i]) / (x[i + 1] - x[i]));
  return StepFunction(envelope.domain(), std::move(bp), std::move(v));
}

ModeSelection select_mode(const PiecewiseAffine& F, ShapeKind shape, ModeSearch search) {
  const auto& dom = F.domain();
  if (shape == ShapeKind::nonincreasing || shape == ShapeKind::nondecreasing) {
    const double m = pinned_mode(dom, 0.0, shape);
    const double d = regularize_at(F, m, shape).d;
    return {m, d, m, m, {}};
  }
  if (is_constant(F)) return {dom.midpoint(), 0.0, dom.a(), dom.b(), {}};
  return shape == ShapeKind::u_shaped ? select_valley(F, search) : select_peak(F, search);
}

ShapeEstimate shape_map(const PiecewiseAffine& F, ShapeKind shape, std::optional<double> mode,
                        ModeSearch search) {
  double m;
  if (shape == ShapeKind::nonincreasing || shape == ShapeKind::nondecreasing)
    m = pinned_mode(F.domain(), 0.0, shape);
  else if (mode)
    m = pinned_mode(F.domain(), *mode, shape);
  else
    m = select_mode(F, shape, search).m;
  auto reg = regularize_at(F, m, shape);
  auto f = slope(reg.envelope);
  return {std::move(f), shape, m, std::move(reg.envelope), reg.d, nondecreasing(F)};
}

}  // namespace ushape
