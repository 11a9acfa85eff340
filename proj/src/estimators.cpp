#include "ushape/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numeric.hpp"
#include "ushape/error.hpp"

namespace ushape {

namespace {

std::string show(double x) { return detail::format_number(x); }

template <class T>
const char* kind_name() {
  if constexpr (std::is_same_v<T, Sample>) return "a sample";
  if constexpr (std::is_same_v<T, CensoredSample>) return "censored records";
  if constexpr (std::is_same_v<T, RegressionData>) return "regression pairs";
  return "an event log";
}

}  // namespace

// --- containers -----------------------------------------------------------

Sample::Sample(std::vector<double> values, Interval domain)
    : values_(std::move(values)), domain_(domain) {
  for (double v : values_)
    if (!domain_.contains(v))
      throw DomainError("observation " + show(v) + " outside [" + show(domain_.a()) + ", " +
                        show(domain_.b()) + "]");
}

CensoredSample::CensoredSample(std::vector<CensoredRecord> records, double horizon)
    : records_(std::move(records)), horizon_(horizon) {
  if (!(horizon_ > 0) || !std::isfinite(horizon_))
    throw DomainError("censoring horizon must be positive");
  for (const auto& r : records_) {
    if (!(r.x >= 0) || !std::isfinite(r.x)) throw DomainError("censored times must be >= 0");
    if (r.delta != 0 && r.delta != 1) throw DomainError("delta must be 0 or 1");
  }
}

RegressionData::RegressionData(std::vector<std::pair<double, double>> pairs, Interval domain)
    : pairs_(std::move(pairs)), domain_(domain) {
  for (const auto& [x, y] : pairs_) {
    if (!domain_.contains(x)) throw DomainError("design point " + show(x) + " outside domain");
    if (!std::isfinite(y)) throw DomainError("responses must be finite");
  }
  std::stable_sort(pairs_.begin(), pairs_.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
}

double RegressionData::design_discrepancy() const {
  const auto n = static_cast<double>(pairs_.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const double u = (pairs_[i].first - domain_.a()) / domain_.length();
    worst = std::max({worst, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  return worst;
}

EventLog::EventLog(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (!(horizon_ > 0) || !std::isfinite(horizon_))
    throw DomainError("observation horizon must be positive");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > 0) || times_[i] > horizon_)
      throw DomainError("event time " + show(times_[i]) + " outside (0, " + show(horizon_) + "]");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw DomainError("event times must be strictly increasing");
  }
}

// --- names ----------------------------------------------------------------

std::string_view to_string(Model model) {
  switch (model) {
    case Model::density: return "density";
    case Model::regression: return "regression";
    case Model::hazard: return "hazard";
    case Model::nhpp: return "nhpp";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  if (name == "density") return Model::density;
  if (name == "regression") return Model::regression;
  if (name == "hazard") return Model::hazard;
  if (name == "nhpp") return Model::nhpp;
  throw UsageError("unknown model '" + std::string(name) + "'");
}

ShapeKind default_shape(Model model) {
  return model == Model::density || model == Model::regression ? ShapeKind::unimodal
                                                               : ShapeKind::u_shaped;
}

// --- cumulative estimates -------------------------------------------------

StepFunction ecdf(const Sample& s) {
  if (s.values().empty()) throw DomainError("empirical distribution of an empty sample");
  std::vector<double> x(s.values().begin(), s.values().end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  std::vector<double> bp;
  std::vector<double> v{0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i + 1 < x.size() && x[i + 1] == x[i]) continue;
    bp.push_back(x[i]);
    v.push_back(static_cast<double>(i + 1) / n);
  }
  return StepFunction(s.domain(), std::move(bp), std::move(v),
                      StepFunction::Monotone::nondecreasing);
}

StepFunction cumulative_regression(const RegressionData& d) {
  const auto pairs = d.pairs();
  if (pairs.empty()) throw DomainError("cumulative regression of empty data");
  const auto n = static_cast<double>(pairs.size());
  std::vector<double> bp;
  std::vector<double> v{0.0};
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    acc += pairs[i].second / n;
    if (i + 1 < pairs.size() && pairs[i + 1].first == pairs[i].first) continue;
    bp.push_back(pairs[i].first);
    v.push_back(acc.value());
  }
  return StepFunction(d.domain(), std::move(bp), std::move(v));
}

namespace {

// Distinct observed times up to the horizon with their death count and the
// size of the risk set just before.
struct RiskGroup {
  double t;
  std::size_t deaths;
  std::size_t at_risk;
};

std::vector<RiskGroup> risk_groups(const CensoredSample& cs) {
  if (cs.records().empty()) throw DomainError("no censored records");
  std::vector<CensoredRecord> r(cs.records().begin(), cs.records().end());
  std::sort(r.begin(), r.end(), [](const auto& l, const auto& rr) { return l.x < rr.x; });
  std::vector<RiskGroup> groups;
  std::size_t at_risk = r.size();
  for (std::size_t i = 0; i < r.size() && r[i].x <= cs.horizon();) {
    std::size_t j = i, deaths = 0;
    for (; j < r.size() && r[j].x == r[i].x; ++j) deaths += static_cast<std::size_t>(r[j].delta);
    groups.push_back({r[i].x, deaths, at_risk});
    at_risk -= j - i;
    i = j;
  }
  return groups;
}

}  // namespace

StepFunction kaplan_meier(const CensoredSample& cs) {
  std::vector<double> bp;
  std::vector<double> v{0.0};
  double survival = 1.0;
  for (const auto& g : risk_groups(cs)) {
    if (g.deaths == 0) continue;
    survival *= 1.0 - static_cast<double>(g.deaths) / static_cast<double>(g.at_risk);
    bp.push_back(g.t);
    v.push_back(1.0 - survival);
  }
  return StepFunction(cs.domain(), std::move(bp), std::move(v));
}

StepFunction nelson_aalen(const CensoredSample& cs, std::vector<std::string>* warnings) {
  std::vector<double> bp;
  std::vector<double> v{0.0};
  detail::CompensatedSum acc;
  for (const auto& g : risk_groups(cs)) {
    if (g.deaths == 0) continue;
    if (g.at_risk == 0) {
      if (warnings) warnings->push_back("empty risk set at t = " + show(g.t) + "; increment skipped");
      continue;
    }
    acc += static_cast<double>(g.deaths) / static_cast<double>(g.at_risk);
    bp.push_back(g.t);
    v.push_back(acc.value());
  }
  if (warnings) {
    const auto r = cs.records();
    const bool any = std::any_of(r.begin(), r.end(),
                                 [&](const auto& rec) { return rec.x >= cs.horizon(); });
    if (!any)
      warnings->push_back("no subject at risk at the horizon " + show(cs.horizon()) +
                          "; the hazard estimate near it is unreliable");
  }
  return StepFunction(cs.domain(), std::move(bp), std::move(v),
                      StepFunction::Monotone::nondecreasing);
}

StepFunction nhpp_counting(const EventLog& e) {
  std::vector<double> bp(e.times().begin(), e.times().end());
  std::vector<double> v(bp.size() + 1);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k);
  return StepFunction(e.domain(), std::move(bp), std::move(v),
                      StepFunction::Monotone::nondecreasing);
}

double constant_rate_mle(const EventLog& e) {
  return static_cast<double>(e.times().size()) / e.horizon();
}

StepFunction cumulative_estimate(const Observations& data, Model model,
                                 std::vector<std::string>* warnings) {
  return std::visit(
      [&](const auto& obs) -> StepFunction {
        using T = std::decay_t<decltype(obs)>;
        const auto mismatch = [&]() {
          return UsageError("model '" + std::string(to_string(model)) + "' cannot be fitted to " +
                            kind_name<T>());
        };
        if constexpr (std::is_same_v<T, Sample>) {
          if (model != Model::density) throw mismatch();
          return ecdf(obs);
        } else if constexpr (std::is_same_v<T, RegressionData>) {
          if (model != Model::regression) throw mismatch();
          return cumulative_regression(obs);
        } else if constexpr (std::is_same_v<T, CensoredSample>) {
          if (model != Model::hazard) throw mismatch();
          return nelson_aalen(obs, warnings);
        } else {
          if (model != Model::nhpp) throw mismatch();
          return nhpp_counting(obs);
        }
      },
      data);
}

FitResult fit(const Observations& data, Model model, const FitOptions& options) {
  std::vector<std::string> warnings;
  auto F = cumulative_estimate(data, model, &warnings);
  const ShapeKind shape = options.shape.value_or(default_shape(model));
  auto est = shape_map(F, shape, options.mode, options.search);

  FitResult out{std::move(est), std::move(F), 1.0, std::nullopt, std::move(warnings)};
  if (const auto* e = std::get_if<EventLog>(&data)) out.l1_normalizer = e->horizon();
  if (const auto* r = std::get_if<RegressionData>(&data)) {
    const double disc = r->design_discrepancy();
    out.design_discrepancy = disc;
    if (disc > 2.0 / static_cast<double>(r->pairs().size()))
      out.warnings.push_back("design points are not approximately uniform (discrepancy " +
                             show(disc) + ")");
  }
  if (!out.estimate.input_nondecreasing && model != Model::regression)
    out.warnings.push_back("cumulative estimate is not nondecreasing");
  return out;
}

}  // namespace ushape
