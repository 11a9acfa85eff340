#pragma once

// Independent reference implementations used only by the tests. They are
// deliberately naive (quadratic or exponential) and share no code with the
// library beyond the StepFunction container.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "ushape/stepfn.hpp"

namespace oracle {

struct Pt {
  double x, y;
};

// Point set of a step function on J: the value at J.a, then both one-sided
// values at every breakpoint in (J.a, J.b], then both values at J.b.
inline std::vector<Pt> step_points(const ushape::StepFunction& F, double a, double b) {
  std::vector<Pt> p{{a, F.eval(a)}};
  for (double t : F.breakpoints())
    if (t > a && t <= b) {
      p.push_back({t, F.eval(t, ushape::Side::left)});
      p.push_back({t, F.eval(t)});
    }
  p.push_back({b, F.eval(b, ushape::Side::left)});
  p.push_back({b, F.eval(b)});
  return p;
}

// Gift wrapping: from the current vertex, jump to the point of maximal
// (upper) or minimal (lower) slope, preferring the farthest on ties.
inline std::vector<Pt> hull(std::vector<Pt> p, bool upper) {
  std::stable_sort(p.begin(), p.end(), [](const Pt& l, const Pt& r) { return l.x < r.x; });
  std::vector<Pt> h{p.front()};
  const double xmax = p.back().x;
  while (h.back().x < xmax) {
    const Pt cur = h.back();
    double best = upper ? -INFINITY : INFINITY;
    Pt next = cur;
    for (const auto& q : p) {
      if (q.x <= cur.x) continue;
      const double s = (q.y - cur.y) / (q.x - cur.x);
      const bool better = upper ? s > best : s < best;
      const bool tie = s == best && q.x > next.x;
      if (better || tie) {
        best = s;
        next = q;
      }
    }
    h.push_back(next);
  }
  return h;
}

// Step function of hull slopes on [a, b]; value at b is the last slope.
inline ushape::StepFunction hull_slope(const std::vector<Pt>& h, double a, double b) {
  std::vector<double> bp, v;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    if (i > 0) bp.push_back(h[i].x);
    v.push_back((h[i + 1].y - h[i].y) / (h[i + 1].x - h[i].x));
  }
  return ushape::StepFunction(ushape::Interval(a, b), bp, v);
}

// Projection onto the monotone cone by exhaustive search over all block
// partitions (2^(n-1) of them); n must be small.
inline std::vector<double> isotonic_bruteforce(const std::vector<double>& y,
                                               const std::vector<double>& w, bool nonincreasing) {
  const std::size_t n = y.size();
  double best_loss = INFINITY;
  std::vector<double> best;
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    double prev = nonincreasing ? INFINITY : -INFINITY;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool cut = i + 1 == n || (mask >> i & 1ul);
      if (!cut) continue;
      double sw = 0, swy = 0;
      for (std::size_t k = start; k <= i; ++k) {
        sw += w[k];
        swy += w[k] * y[k];
      }
      const double m = swy / sw;
      if (nonincreasing ? m > prev + 1e-15 : m < prev - 1e-15) ok = false;
      prev = m;
      for (std::size_t k = start; k <= i; ++k) fit[k] = m;
      start = i + 1;
    }
    if (!ok) continue;
    double loss = 0;
    for (std::size_t k = 0; k < n; ++k) loss += w[k] * (y[k] - fit[k]) * (y[k] - fit[k]);
    if (loss < best_loss) {
      best_loss = loss;
      best = fit;
    }
  }
  return best;
}

// sup over a dense grid of |f - g| (both evaluated at the grid points), per
// cell of the grid.
template <class F, class G>
double dense_sup(const F& f, const G& g, double a, double b, std::size_t n) {
  double best = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    best = std::max(best, std::abs(f(t) - g(t)));
  }
  return best;
}

// Midpoint-rule integral of |f - g| on [a, b] with n cells.
template <class F, class G>
double riemann_l1(const F& f, const G& g, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a + (static_cast<double>(i) + 0.5) * h;
    s += std::abs(f(t) - g(t));
  }
  return s * h;
}

// Random step function with breakpoints on a dyadic grid of [a, b] so that
// dense dyadic grids hit them exactly.
inline ushape::StepFunction random_dyadic_step(std::mt19937_64& rng, double a, double b,
                                               int pieces, double lo, double hi,
                                               unsigned grid = 1024) {
  std::uniform_int_distribution<unsigned> cell(1, grid - 1);
  std::uniform_real_distribution<double> val(lo, hi);
  std::vector<unsigned> idx;
  while (static_cast<int>(idx.size()) < pieces - 1) {
    const unsigned c = cell(rng);
    if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
  }
  std::sort(idx.begin(), idx.end());
  std::vector<double> bp, v{val(rng)};
  for (unsigned c : idx) {
    bp.push_back(a + (b - a) * c / grid);
    v.push_back(val(rng));
  }
  return ushape::StepFunction(ushape::Interval(a, b), bp, v);
}

}  // namespace oracle
