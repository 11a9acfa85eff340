#include "ushape/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"
#include "ushape/error.hpp"

namespace ushape {

namespace {

void require_spans(const Partition& pi, const Interval& domain) {
  const double tol = domain.merge_tolerance();
  const auto e = pi.endpoints();
  if (std::abs(e.front() - domain.a()) > tol || std::abs(e.back() - domain.b()) > tol)
    throw DomainError("partition does not span the function's domain");
}

std::vector<double> interior(const Partition& pi) {
  const auto e = pi.endpoints();
  return {e.begin() + 1, e.end() - 1};
}

// Pieces (value, length) of g restricted to J.
std::vector<std::pair<double, double>> pieces(const StepFunction& g, const Interval& j) {
  const auto bp = g.breakpoints();
  const auto v = g.values();
  std::vector<std::pair<double, double>> out;
  auto k = static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), j.a()) - bp.begin());
  double lo = j.a();
  for (; k < bp.size() && bp[k] < j.b(); ++k) {
    out.emplace_back(v[k], bp[k] - lo);
    lo = bp[k];
  }
  out.emplace_back(v[k], j.b() - lo);
  return out;
}

double median_deviation(std::vector<std::pair<double, double>> p) {
  std::sort(p.begin(), p.end());
  double total = 0.0;
  for (const auto& [v, w] : p) total += w;
  double acc = 0.0;
  double med = p.back().first;
  for (const auto& [v, w] : p) {
    acc += w;
    if (acc >= 0.5 * total) {
      med = v;
      break;
    }
  }
  detail::CompensatedSum dev;
  for (const auto& [v, w] : p) dev += std::abs(v - med) * w;
  return dev.value();
}

}  // namespace

StepFunction histogram_estimate(const StepFunction& G_hat, const Partition& pi) {
  require_spans(pi, G_hat.domain());
  std::vector<double> v;
  for (std::size_t k = 0; k < pi.cells(); ++k) {
    const auto c = pi.cell(k);
    const double lo = G_hat.eval(std::max(c.a(), G_hat.domain().a()));
    const double hi = G_hat.eval(std::min(c.b(), G_hat.domain().b()));
    v.push_back((hi - lo) / c.length());
  }
  return StepFunction(G_hat.domain(), interior(pi), std::move(v));
}

StepFunction projection(const StepFunction& g, const Partition& pi) {
  require_spans(pi, g.domain());
  std::vector<double> v;
  for (std::size_t k = 0; k < pi.cells(); ++k) {
    const Interval c(std::max(pi.cell(k).a(), g.domain().a()),
                     std::min(pi.cell(k).b(), g.domain().b()));
    v.push_back(integral(g, c) / c.length());
  }
  return StepFunction(g.domain(), interior(pi), std::move(v));
}

double best_step_distance(const StepFunction& g, const Partition& pi, StepDistance method) {
  require_spans(pi, g.domain());
  if (method == StepDistance::projection_bound) return l1_distance(projection(g, pi), g);
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < pi.cells(); ++k) {
    const Interval c(std::max(pi.cell(k).a(), g.domain().a()),
                     std::min(pi.cell(k).b(), g.domain().b()));
    sum += median_deviation(pieces(g, c));
  }
  return sum.value();
}

std::vector<CellIncrement> cell_increments(const StepFunction& G_hat, const PiecewiseAffine& G,
                                           const Partition& pi) {
  detail::require_same_domain(G_hat.domain(), G.domain());
  require_spans(pi, G.domain());
  const auto z = [&](double t) { return G_hat.eval(t) - G.eval(t); };
  std::vector<CellIncrement> out;
  out.reserve(pi.cells());
  for (std::size_t k = 0; k < pi.cells(); ++k) {
    const Interval c(std::max(pi.cell(k).a(), G.domain().a()),
                     std::min(pi.cell(k).b(), G.domain().b()));
    out.push_back({sup_increment(G_hat, G, c), std::abs(z(c.b()) - z(c.a()))});
  }
  return out;
}

RiskBracket risk_bracket(const StepFunction& g, const PiecewiseAffine& G,
                         const StepFunction& G_hat, const Partition& pi, double C) {
  if (!(C >= 1.0)) throw DomainError("risk bracket constant must be >= 1");
  detail::CompensatedSum fluct;
  for (const auto& c : cell_increments(G_hat, G, pi)) fluct += c.sup_increment;
  const double bias = 4.0 * best_step_distance(g, pi, StepDistance::exact_median);
  const double f = C * fluct.value();
  return {pi, bias, f, bias + f, C};
}

Condition4 condition4_ratio(const std::vector<std::vector<CellIncrement>>& samples,
                            const Partition& pi) {
  if (samples.size() < 2) throw UsageError("the sup/endpoint ratio needs at least two replications");
  const std::size_t D = pi.cells();
  const auto n = static_cast<double>(samples.size());
  Condition4 out{-INFINITY, 0.0, 0, std::vector<double>(D, std::numeric_limits<double>::quiet_NaN())};
  for (std::size_t k = 0; k < D; ++k) {
    detail::CompensatedSum sa, sb;
    for (const auto& s : samples) {
      if (s.size() != D) throw UsageError("replication has the wrong number of cells");
      sa += s[k].sup_increment;
      sb += s[k].endpoint_increment;
    }
    const double ma = sa.value() / n, mb = sb.value() / n;
    if (ma == 0.0 && mb == 0.0) continue;
    double r, se;
    if (mb == 0.0) {
      r = INFINITY;
      se = 0.0;
    } else {
      r = ma / mb;
      detail::CompensatedSum vaa, vbb, vab;
      for (const auto& s : samples) {
        const double da = s[k].sup_increment - ma, db = s[k].endpoint_increment - mb;
        vaa += da * da;
        vbb += db * db;
        vab += da * db;
      }
      const double var = (vaa.value() - 2.0 * r * vab.value() + r * r * vbb.value()) / (n - 1.0);
      se = std::sqrt(std::max(0.0, var) / n) / mb;
    }
    out.per_cell[k] = r;
    if (r > out.ratio) {
      out.ratio = r;
      out.std_error = se;
      out.worst_cell = k;
    }
  }
  if (out.ratio == -INFINITY) out.ratio = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace ushape
