#include "ushape/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "numeric.hpp"
#include "ushape/error.hpp"

namespace ushape {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

namespace {

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Runs fn(i) for i in [0, n), possibly on several threads. Results must be
// written to index-addressed storage so the outcome does not depend on
// scheduling.
void for_each_index(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(std::span<const double> x) {
  detail::CompensatedSum s;
  for (double v : x) s += v;
  const auto n = static_cast<double>(x.size());
  const double mean = s.value() / n;
  detail::CompensatedSum ss;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = x.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// Inverse of a continuous nondecreasing piecewise-affine function at level
// u in [G(a), G(b)).
double invert(const PiecewiseAffine& G, double u) {
  const auto x = G.knots();
  std::vector<double> cum(G.starts().begin(), G.starts().end());
  cum.push_back(G.ends().back());
  auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  i = std::clamp<std::size_t>(i, 1, cum.size() - 1) - 1;
  while (i > 0 && cum[i + 1] <= cum[i]) --i;
  const double w = cum[i + 1] - cum[i];
  if (!(w > 0)) return x[i];
  return std::lerp(x[i], x[i + 1], std::clamp((u - cum[i]) / w, 0.0, 1.0));
}

double max_value(const StepFunction& g) {
  const auto v = g.values();
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

// --- truths ---------------------------------------------------------------

bool has_shape(const StepFunction& g, ShapeKind shape) {
  const auto v = g.values();
  const std::size_t n = v.size();
  switch (shape) {
    case ShapeKind::nonincreasing: return std::is_sorted(v.rbegin(), v.rend());
    case ShapeKind::nondecreasing: return std::is_sorted(v.begin(), v.end());
    case ShapeKind::u_shaped: {
      std::size_t k = 0;
      while (k + 1 < n && v[k + 1] <= v[k]) ++k;
      while (k + 1 < n && v[k + 1] >= v[k]) ++k;
      return k + 1 == n;
    }
    case ShapeKind::unimodal: {
      std::size_t k = 0;
      while (k + 1 < n && v[k + 1] >= v[k]) ++k;
      while (k + 1 < n && v[k + 1] <= v[k]) ++k;
      return k + 1 == n;
    }
  }
  return false;
}

TruthSpec::TruthSpec(Model kind, StepFunction g, ShapeKind shape, double sigma,
                     std::optional<StepFunction> censor_density)
    : kind_(kind),
      g_(std::move(g)),
      shape_(shape),
      sigma_(sigma),
      censor_(std::move(censor_density)),
      G_(cumulative(g_)) {
  const auto v = g_.values();
  if (kind_ != Model::regression && *std::min_element(v.begin(), v.end()) < 0)
    throw DomainError("truth must be nonnegative for the " + std::string(to_string(kind_)) +
                      " model");
  if (kind_ == Model::density && std::abs(G_.terminal() - 1.0) > 1e-9)
    throw DomainError("density truth must integrate to 1");
  if (!(sigma_ >= 0) || !std::isfinite(sigma_)) throw DomainError("sigma must be >= 0");
  if (!has_shape(g_, shape_))
    throw DomainError("truth is not " + std::string(to_string(shape_)));
  if ((kind_ == Model::hazard || kind_ == Model::nhpp) && horizon().a() != 0.0)
    throw DomainError("hazard and nhpp horizons start at 0");
  if (censor_) {
    const auto c = censor_->values();
    if (*std::min_element(c.begin(), c.end()) < 0)
      throw DomainError("censoring density must be nonnegative");
    if (integral(*censor_) > 1.0 + 1e-9) throw DomainError("censoring density has mass above 1");
  }
}

double TruthSpec::mode() const {
  const auto& d = horizon();
  if (shape_ == ShapeKind::nonincreasing) return d.b();
  if (shape_ == ShapeKind::nondecreasing) return d.a();
  const auto v = g_.values();
  const auto bp = g_.breakpoints();
  const auto it = shape_ == ShapeKind::unimodal ? std::max_element(v.begin(), v.end())
                                                : std::min_element(v.begin(), v.end());
  const auto j = static_cast<std::size_t>(it - v.begin());
  const double lo = j == 0 ? d.a() : bp[j - 1];
  const double hi = j == bp.size() ? d.b() : bp[j];
  return 0.5 * (lo + hi);
}

StepFunction random_shaped_step(Rng& rng, const Interval& domain, ShapeKind shape,
                                const RandomStepOptions& options) {
  const int k = uniform_int(rng, options.min_pieces, options.max_pieces);
  std::vector<double> bp;
  do {
    bp.clear();
    for (int i = 0; i + 1 < k; ++i) bp.push_back(uniform(rng, domain.a(), domain.b()));
    std::sort(bp.begin(), bp.end());
  } while (std::adjacent_find(bp.begin(), bp.end(), [&](double l, double r) {
             return r - l < 1e-9 * domain.length();
           }) != bp.end() ||
           (!bp.empty() && (bp.front() - domain.a() < 1e-9 * domain.length() ||
                            domain.b() - bp.back() < 1e-9 * domain.length())));

  std::vector<double> vals(static_cast<std::size_t>(k));
  for (auto& v : vals) v = uniform(rng, 0.0, options.max_value);
  std::sort(vals.begin(), vals.end());

  int j = 0;
  switch (shape) {
    case ShapeKind::nonincreasing: j = k - 1; break;
    case ShapeKind::nondecreasing: j = 0; break;
    default: j = uniform_int(rng, 0, k - 1);
  }
  const bool valley = shape != ShapeKind::unimodal;
  const double extremum = valley ? vals.front() : vals.back();
  std::vector<double> rest = valley ? std::vector<double>(vals.begin() + 1, vals.end())
                                    : std::vector<double>(vals.begin(), vals.end() - 1);
  std::shuffle(rest.begin(), rest.end(), rng);
  std::vector<double> left(rest.begin(), rest.begin() + j);
  std::vector<double> right(rest.begin() + j, rest.end());
  if (valley) {
    std::sort(left.rbegin(), left.rend());
    std::sort(right.begin(), right.end());
  } else {
    std::sort(left.begin(), left.end());
    std::sort(right.rbegin(), right.rend());
  }
  left.push_back(extremum);
  left.insert(left.end(), right.begin(), right.end());
  return StepFunction(domain, std::move(bp), std::move(left));
}

TruthSpec random_truth(Rng& rng, Model kind, ShapeKind shape, double nhpp_horizon) {
  const Interval unit(0.0, 1.0);
  switch (kind) {
    case Model::density:
      while (true) {
        const auto g = random_shaped_step(rng, unit, shape);
        const double mass = integral(g);
        if (!(mass > 0)) continue;
        std::vector<double> v(g.values().begin(), g.values().end());
        for (auto& x : v) x /= mass;
        StepFunction h(unit, {g.breakpoints().begin(), g.breakpoints().end()}, std::move(v));
        return TruthSpec(kind, std::move(h), shape);
      }
    case Model::regression: {
      auto g = random_shaped_step(rng, unit, shape);
      return TruthSpec(kind, std::move(g), shape, uniform(rng, 0.1, 1.0));
    }
    case Model::hazard: {
      auto g = random_shaped_step(rng, unit, shape);
      return TruthSpec(kind, std::move(g), shape, 0.0,
                       StepFunction::constant(Interval(0.0, 2.0), 0.5));
    }
    case Model::nhpp:
      return TruthSpec(kind, random_shaped_step(rng, Interval(0.0, nhpp_horizon), shape), shape);
  }
  throw UsageError("unknown model");
}

// --- generators -----------------------------------------------------------

Observations generate(const TruthSpec& spec, double n_or_T, std::uint64_t seed,
                      std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  return generate(spec, n_or_T, rng);
}

Observations generate(const TruthSpec& spec, double n_or_T, Rng& rng) {
  if (!(n_or_T > 0) || !std::isfinite(n_or_T))
    throw DomainError("sample size or horizon must be positive");
  const auto& dom = spec.horizon();
  const auto& g = spec.g();
  const auto count = [&] {
    const auto n = static_cast<std::size_t>(std::llround(n_or_T));
    if (n == 0) throw DomainError("sample size must be at least 1");
    return n;
  };

  switch (spec.kind()) {
    case Model::density: {
      const std::size_t n = count();
      const auto& G = spec.G();
      std::vector<double> x(n);
      for (auto& xi : x) xi = invert(G, uniform(rng) * G.terminal());
      return Sample(std::move(x), dom);
    }
    case Model::regression: {
      const std::size_t n = count();
      std::normal_distribution<double> noise(0.0, 1.0);
      std::vector<std::pair<double, double>> pairs;
      pairs.reserve(n);
      for (std::size_t i = 1; i <= n; ++i) {
        const double x = i == n ? dom.b()
                                : dom.a() + dom.length() * static_cast<double>(i) /
                                                static_cast<double>(n);
        const double e = noise(rng);
        pairs.emplace_back(x, g.eval(x) + spec.sigma() * e);
      }
      return RegressionData(std::move(pairs), dom);
    }
    case Model::hazard: {
      const std::size_t n = count();
      const auto& Lambda = spec.G();
      const double c = dom.b();
      const double tail = g.values().back();
      std::optional<PiecewiseAffine> H;
      if (spec.censor_density()) H = cumulative(*spec.censor_density());
      std::exponential_distribution<double> unit_exp(1.0);
      std::vector<CensoredRecord> rec;
      rec.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double e = unit_exp(rng);
        double t;
        if (e < Lambda.terminal())
          t = invert(Lambda, e);
        else
          t = c + (e - Lambda.terminal()) / (tail > 0 ? tail : 1.0);
        double u = INFINITY;
        if (H) {
          const double p = uniform(rng);
          if (p < H->terminal()) u = invert(*H, p);
        }
        rec.push_back(t <= u ? CensoredRecord{t, 1} : CensoredRecord{u, 0});
      }
      return CensoredSample(std::move(rec), c);
    }
    case Model::nhpp: {
      const double T = dom.b();
      if (std::abs(n_or_T - T) > dom.merge_tolerance())
        throw UsageError("nhpp horizon " + detail::format_number(n_or_T) +
                         " differs from the truth's horizon " + detail::format_number(T));
      const double lmax = max_value(g);
      std::vector<double> times;
      if (lmax > 0) {
        std::exponential_distribution<double> gap(lmax);
        for (double t = gap(rng); t <= T; t += gap(rng)) {
          const double accept = uniform(rng);
          if (accept * lmax < g.eval(t) && (times.empty() || t > times.back())) times.push_back(t);
        }
      }
      return EventLog(std::move(times), T);
    }
  }
  throw UsageError("unknown model");
}

// --- Monte Carlo risk -----------------------------------------------------

std::optional<double> RiskReport::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  return std::nullopt;
}

RiskReport monte_carlo_risk(const TruthSpec& spec, const Estimator& estimator, double n_or_T,
                            std::size_t reps, std::uint64_t seed,
                            const MonteCarloOptions& options) {
  if (reps < 2) throw UsageError("Monte Carlo risk needs at least two replications");
  if (std::holds_alternative<ConstantMleEstimator>(estimator) && spec.kind() != Model::nhpp)
    throw UsageError("the constant-rate MLE applies to the nhpp model only");
  const double norm = spec.kind() == Model::nhpp ? spec.horizon().length() : 1.0;

  std::vector<double> err(reps);
  for_each_index(reps, options.threads, [&](std::size_t r) {
    const auto obs = generate(spec, n_or_T, seed, r);
    const StepFunction f = std::visit(
        [&](const auto& est) -> StepFunction {
          using E = std::decay_t<decltype(est)>;
          if constexpr (std::is_same_v<E, ShapeMapEstimator>) {
            return fit(obs, spec.kind(), {est.shape.value_or(spec.shape()), std::nullopt})
                .estimate.f;
          } else if constexpr (std::is_same_v<E, HistogramEstimator>) {
            return histogram_estimate(cumulative_estimate(obs, spec.kind()), est.partition);
          } else if constexpr (std::is_same_v<E, KnownModeEstimator>) {
            return fit(obs, spec.kind(), {spec.shape(), est.mode}).estimate.f;
          } else {
            const auto& log = std::get<EventLog>(obs);
            return StepFunction::constant(log.domain(), constant_rate_mle(log));
          }
        },
        estimator);
    err[r] = l1_distance(f, spec.g()) / norm;
  });

  const auto [mean, se] = mean_se(err);
  RiskReport rep;
  rep.label = "risk";
  rep.mean_l1 = mean;
  rep.std_error = se;
  rep.replications = reps;
  if (options.keep_per_rep) rep.per_rep = std::move(err);
  rep.metrics.emplace_back("normalizer", norm);
  return rep;
}

// --- inequality suites ----------------------------------------------------

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::theorem1: return "theorem1";
    case Suite::lemma2: return "lemma2";
    case Suite::lemma4: return "lemma4";
    case Suite::lemma5: return "lemma5";
    case Suite::marshall: return "marshall";
    case Suite::eq5_sandwich: return "eq5_sandwich";
    case Suite::prop_bounds: return "prop_bounds";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (auto s : {Suite::theorem1, Suite::lemma2, Suite::lemma4, Suite::lemma5, Suite::marshall,
                 Suite::eq5_sandwich, Suite::prop_bounds})
    if (to_string(s) == name) return s;
  throw UsageError("unknown suite '" + std::string(name) + "'");
}

namespace {

// One deterministic comparison. For inequalities lhs <= rhs is checked;
// for identities |lhs - rhs|.
struct Trial {
  double lhs;
  double rhs;
  bool violated;
};

Partition random_partition(Rng& rng, const Interval& dom, int max_cells) {
  const int D = uniform_int(rng, 1, max_cells);
  std::vector<double> e{dom.a()};
  std::vector<double> inner;
  for (int i = 0; i + 1 < D; ++i) inner.push_back(uniform(rng, dom.a(), dom.b()));
  std::sort(inner.begin(), inner.end());
  for (double t : inner)
    if (t - e.back() > 1e-9 * dom.length() && dom.b() - t > 1e-9 * dom.length()) e.push_back(t);
  e.push_back(dom.b());
  return Partition(std::move(e));
}

Partition adapted_partition(const StepFunction& g) {
  std::vector<double> e{g.domain().a()};
  for (double t : g.breakpoints())
    if (t < g.domain().b()) e.push_back(t);
  e.push_back(g.domain().b());
  return Partition(std::move(e));
}

// A truth for model `kind` together with the regularization shape the
// suites fit to it: unimodal for density and regression, U-shaped for
// hazard and nhpp.
struct Instance {
  TruthSpec spec;
  StepFunction F;
};

Instance draw(Rng& rng, Model kind, ShapeKind shape) {
  const double T = kind == Model::nhpp ? uniform(rng, 5.0, 40.0) : 1.0;
  auto spec = random_truth(rng, kind, shape, T);
  const double n = kind == Model::nhpp ? T : static_cast<double>(uniform_int(rng, 50, 400));
  auto obs = generate(spec, n, rng);
  auto F = cumulative_estimate(obs, kind);
  return {std::move(spec), std::move(F)};
}

Model model_for(std::size_t trial, bool monotone_only) {
  static constexpr Model all[] = {Model::density, Model::regression, Model::hazard, Model::nhpp};
  static constexpr Model monotone[] = {Model::density, Model::hazard, Model::nhpp};
  return monotone_only ? monotone[trial % 3] : all[trial % 4];
}

ShapeKind natural_shape(Model m) { return default_shape(m); }

Trial theorem1_trial(Rng& rng, std::size_t trial, double C) {
  const Model kind = model_for(trial, false);
  const ShapeKind shape = natural_shape(kind);
  const auto [spec, F] = draw(rng, kind, shape);
  const auto f = shape_map(F, shape).f;
  const double lhs = l1_distance(f, spec.g());
  const auto& dom = spec.horizon();
  const Partition parts[] = {random_partition(rng, dom, 20),
                             Partition::uniform(dom, static_cast<std::size_t>(uniform_int(rng, 1, 32))),
                             adapted_partition(spec.g())};
  double rhs = INFINITY;
  for (const auto& pi : parts) rhs = std::min(rhs, risk_bracket(spec.g(), spec.G(), F, pi, C).total);
  return {lhs, rhs, lhs > rhs + 1e-10};
}

Trial lemma2_trial(Rng& rng, std::size_t trial) {
  const Model kind = model_for(trial, true);
  const auto [spec, F] = draw(rng, kind, ShapeKind::u_shaped);
  const auto fm = shape_map(F, ShapeKind::u_shaped, spec.mode()).f;
  const auto f = shape_map(F, ShapeKind::u_shaped).f;
  const double lhs = l1_distance(fm, f);
  const double rhs = 4.0 * sup_distance(as_affine(F), spec.G());
  return {lhs, rhs, lhs > rhs + 1e-10};
}

Trial lemma4_trial(Rng& rng) {
  const double a = uniform(rng, -2.0, 2.0);
  const Interval J(a, a + uniform(rng, 0.1, 5.0));
  const auto h = random_shaped_step(rng, J, ShapeKind::nonincreasing);
  const double lhs = interval_stats(h, J).oscillation;
  const auto H = cumulative(h);
  const auto line = PiecewiseAffine::affine(J, 0.0, H.terminal() / J.length());
  const double rhs = 2.0 * sup_difference(H, line, J);
  return {lhs, rhs, std::abs(lhs - rhs) > 1e-10};
}

Trial lemma5_trial(Rng& rng, std::size_t trial) {
  const Model kind = model_for(trial, true);
  const auto [spec, F] = draw(rng, kind, ShapeKind::u_shaped);
  const auto& dom = F.domain();
  double r = uniform(rng, dom.a(), dom.b()), s = uniform(rng, dom.a(), dom.b());
  if (r > s) std::swap(r, s);
  if (!(r < s)) s = dom.b();
  const auto Fa = as_affine(F);
  const auto er = regularize_at(Fa, r, ShapeKind::u_shaped).envelope;
  const auto es = regularize_at(Fa, s, ShapeKind::u_shaped).envelope;
  const double lhs = l1_distance(slope(er), slope(es));
  const Interval rs(r, s);
  const double rhs = 2.0 * std::max(sup_difference(Fa, er, rs), sup_difference(es, Fa, rs));
  return {lhs, rhs, std::abs(lhs - rhs) > 1e-9};
}

Trial marshall_trial(Rng& rng, std::size_t trial) {
  const Model kind = model_for(trial, true);
  const auto [spec, F] = draw(rng, kind, ShapeKind::u_shaped);
  const auto env = regularize_at(F, spec.mode(), ShapeKind::u_shaped).envelope;
  const double lhs = sup_distance(spec.G(), env);
  const double rhs = sup_distance(spec.G(), as_affine(F));
  return {lhs, rhs, lhs > rhs + 1e-12};
}

Trial sandwich_trial(Rng& rng, std::size_t trial) {
  const Model kind = model_for(trial, false);
  const auto [spec, F] = draw(rng, kind, natural_shape(kind));
  const auto pi = random_partition(rng, spec.horizon(), 20);
  const auto hist = histogram_estimate(F, pi);
  const double mid = l1_distance(hist, spec.g());
  detail::CompensatedSum lower, sups;
  for (const auto& c : cell_increments(F, spec.G(), pi)) {
    lower += c.endpoint_increment;
    sups += c.sup_increment;
  }
  const double upper = 2.0 * best_step_distance(spec.g(), pi) + sups.value();
  const double tol = 1e-10 * std::max(1.0, upper);
  return {mid, upper, lower.value() > mid + tol || mid > upper + tol};
}

RiskReport summarize(Suite suite, const std::vector<Trial>& trials, bool identity) {
  RiskReport rep;
  rep.label = std::string(to_string(suite));
  rep.replications = trials.size();
  std::vector<double> lhs;
  double worst_gap = -INFINITY, worst_ratio = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    lhs.push_back(t.lhs);
    if (t.violated) {
      ++rep.violations;
      rep.violation_trials.push_back(i);
    }
    worst_gap = std::max(worst_gap, identity ? std::abs(t.lhs - t.rhs) : t.lhs - t.rhs);
    if (!identity && t.rhs > 0) worst_ratio = std::max(worst_ratio, t.lhs / t.rhs);
  }
  const auto [mean, se] = mean_se(lhs);
  rep.mean_l1 = mean;
  rep.std_error = se;
  rep.per_rep = std::move(lhs);
  rep.metrics.emplace_back("trials", static_cast<double>(trials.size()));
  if (identity) {
    rep.metrics.emplace_back("max_abs_difference", worst_gap);
  } else {
    rep.metrics.emplace_back("max_lhs_minus_rhs", worst_gap);
    rep.metrics.emplace_back("max_lhs_over_rhs", worst_ratio);
  }
  return rep;
}

// Monte Carlo checks with paper-derivable constants. Each failing check
// counts as one violation.
RiskReport prop_bounds(std::size_t reps, std::uint64_t seed, unsigned threads) {
  if (reps < 2) throw UsageError("prop_bounds needs at least two replications");
  RiskReport rep;
  rep.label = "prop_bounds";
  rep.replications = reps;
  std::size_t check = 0;
  const auto record = [&](const std::string& name, double value, double bound) {
    rep.metrics.emplace_back(name, value);
    rep.metrics.emplace_back(name + "_bound", bound);
    if (!(value <= bound)) {
      ++rep.violations;
      rep.violation_trials.push_back(check);
    }
    ++check;
  };

  // Constant rate: E‖N(T)/T - λ‖ <= sqrt(λ/T).
  const double lambda = 5.0, T = 100.0;
  const TruthSpec flat(Model::nhpp, StepFunction::constant(Interval(0.0, T), lambda),
                       ShapeKind::u_shaped);
  const auto mle = monte_carlo_risk(flat, ConstantMleEstimator{}, T, reps, seed, {false, threads});
  record("constant_mle_risk", mle.mean_l1, std::sqrt(lambda / T) + 3.0 * mle.std_error);
  rep.mean_l1 = mle.mean_l1;
  rep.std_error = mle.std_error;

  const auto cell_study = [&](const TruthSpec& spec, double n_or_T, const Partition& pi,
                              std::uint64_t stream_seed) {
    std::vector<std::vector<CellIncrement>> inc(reps);
    for_each_index(reps, threads, [&](std::size_t r) {
      const auto obs = generate(spec, n_or_T, stream_seed, r);
      inc[r] = cell_increments(cumulative_estimate(obs, spec.kind()), spec.G(), pi);
    });
    return inc;
  };
  const auto cell_sup_check = [&](const std::string& tag,
                                  const std::vector<std::vector<CellIncrement>>& inc,
                                  const TruthSpec& spec, const Partition& pi,
                                  const std::function<double(double)>& bound) {
    for (std::size_t k = 0; k < pi.cells(); ++k) {
      std::vector<double> s;
      for (const auto& row : inc) s.push_back(row[k].sup_increment);
      const auto [m, se] = mean_se(s);
      const auto c = pi.cell(k);
      const double Gk = spec.G().eval(c.b()) - spec.G().eval(c.a());
      record(tag + "_cell" + std::to_string(k) + "_sup", m, bound(Gk) + 3.0 * se);
    }
  };

  // NHPP: per-cell E sup <= 2 sqrt(G(I_k)) and the moment ratio <= 8.
  for (int which = 0; which < 2; ++which) {
    auto rng = make_rng(seed, 1'000'003 + static_cast<std::uint64_t>(which));
    const TruthSpec spec =
        which == 0 ? flat : random_truth(rng, Model::nhpp, ShapeKind::u_shaped, 20.0);
    const auto pi = Partition::uniform(spec.horizon(), 4);
    const auto inc = cell_study(spec, spec.horizon().b(), pi, seed ^ (0x9e37 + which));
    const std::string tag = which == 0 ? "nhpp_constant" : "nhpp_ushaped";
    cell_sup_check(tag, inc, spec, pi, [](double Gk) { return 2.0 * std::sqrt(Gk); });
    const auto c4 = condition4_ratio(inc, pi);
    record(tag + "_condition4_ratio", c4.ratio, 8.0 + 3.0 * c4.std_error);
  }

  // Density: per-cell E sup <= (1 + sqrt(pi/2)) sqrt(G(I_k)/n).
  {
    auto rng = make_rng(seed, 1'000'007);
    const auto spec = random_truth(rng, Model::density, ShapeKind::unimodal);
    const double n = 200.0;
    const auto pi = Partition::uniform(spec.horizon(), 4);
    const auto inc = cell_study(spec, n, pi, seed ^ 0x51ed);
    const double k = 1.0 + std::sqrt(std::numbers::pi / 2.0);
    cell_sup_check("density", inc, spec, pi, [&](double Gk) { return k * std::sqrt(Gk / n); });
  }
  rep.metrics.insert(rep.metrics.begin(), {"checks", static_cast<double>(check)});
  return rep;
}

}  // namespace

RiskReport verify_inequalities(Suite suite, std::size_t trials, std::uint64_t seed,
                               const VerifyOptions& options) {
  if (trials < 1) throw UsageError("verification needs at least one trial");
  if (!(options.C >= 1.0)) throw UsageError("the bracket constant must be >= 1");
  if (suite == Suite::prop_bounds) return prop_bounds(trials, seed, options.threads);

  std::vector<Trial> out(trials);
  for_each_index(trials, options.threads, [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    switch (suite) {
      case Suite::theorem1: out[i] = theorem1_trial(rng, i, options.C); break;
      case Suite::lemma2: out[i] = lemma2_trial(rng, i); break;
      case Suite::lemma4: out[i] = lemma4_trial(rng); break;
      case Suite::lemma5: out[i] = lemma5_trial(rng, i); break;
      case Suite::marshall: out[i] = marshall_trial(rng, i); break;
      case Suite::eq5_sandwich: out[i] = sandwich_trial(rng, i); break;
      case Suite::prop_bounds: break;
    }
  });
  const bool identity = suite == Suite::lemma4 || suite == Suite::lemma5;
  auto rep = summarize(suite, out, identity);
  if (suite == Suite::theorem1) rep.metrics.emplace_back("C", options.C);
  return rep;
}

void write_report_csv(std::ostream& out, const RiskReport& report) {
  const auto row = [&](std::string_view k, double v) {
    out << k << ',' << detail::format_number(v) << '\n';
  };
  out << "metric,value\n";
  row("mean_l1", report.mean_l1);
  row("stderr", report.std_error);
  row("replications", static_cast<double>(report.replications));
  row("violations", static_cast<double>(report.violations));
  for (const auto& [k, v] : report.metrics) row(k, v);
  for (auto t : report.violation_trials) row("violation", static_cast<double>(t));
  row("pass", report.passed() ? 1.0 : 0.0);
}

}  // namespace ushape
