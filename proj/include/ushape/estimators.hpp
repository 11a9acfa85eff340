#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ushape/regularize.hpp"
#include "ushape/stepfn.hpp"

namespace ushape {

/// I.i.d. observations on a bounded domain.
class Sample {
 public:
  /// Throws DomainError when a value lies outside the domain.
  Sample(std::vector<double> values, Interval domain);

  std::span<const double> values() const noexcept { return values_; }
  const Interval& domain() const noexcept { return domain_; }

 private:
  std::vector<double> values_;
  Interval domain_;
};

struct CensoredRecord {
  double x;   ///< observed time min(T, U)
  int delta;  ///< 1 when the lifetime itself was observed
};

/// Right-censored lifetimes; the estimation interval is [0, horizon].
/// Records beyond the horizon are kept because they still belong to the
/// risk sets before it.
class CensoredSample {
 public:
  CensoredSample(std::vector<CensoredRecord> records, double horizon);

  std::span<const CensoredRecord> records() const noexcept { return records_; }
  double horizon() const noexcept { return horizon_; }
  Interval domain() const { return {0.0, horizon_}; }

 private:
  std::vector<CensoredRecord> records_;
  double horizon_;
};

/// Design points and responses, stored sorted by x.
class RegressionData {
 public:
  RegressionData(std::vector<std::pair<double, double>> pairs, Interval domain = {0.0, 1.0});

  std::span<const std::pair<double, double>> pairs() const noexcept { return pairs_; }
  const Interval& domain() const noexcept { return domain_; }

  /// Kolmogorov distance between the design's empirical distribution and the
  /// uniform law on the domain; 1/n for the regular grid x_i = a + i(b-a)/n.
  double design_discrepancy() const;

 private:
  std::vector<std::pair<double, double>> pairs_;
  Interval domain_;
};

/// Failure times of one system observed on [0, horizon].
class EventLog {
 public:
  /// Times must be strictly increasing, positive and at most the horizon.
  EventLog(std::vector<double> times, double horizon);

  std::span<const double> times() const noexcept { return times_; }
  double horizon() const noexcept { return horizon_; }
  Interval domain() const { return {0.0, horizon_}; }

 private:
  std::vector<double> times_;
  double horizon_;
};

using Observations = std::variant<Sample, CensoredSample, RegressionData, EventLog>;

enum class Model { density, regression, hazard, nhpp };

std::string_view to_string(Model model);
/// Throws UsageError on an unknown name.
Model parse_model(std::string_view name);

/// unimodal for density and regression, u_shaped for hazard and nhpp.
ShapeKind default_shape(Model model);

/// Empirical distribution function; throws DomainError on an empty sample.
StepFunction ecdf(const Sample& s);

/// t -> (1/n) Σ y_i 1{x_i <= t}. Not monotone in general.
StepFunction cumulative_regression(const RegressionData& d);

/// Product-limit estimate of the lifetime distribution function on
/// [0, horizon]. Deaths precede censorings at tied times.
StepFunction kaplan_meier(const CensoredSample& cs);

/// Cumulative hazard with increments d/Y at uncensored times. Appends to
/// `warnings` when nobody is at risk at the horizon.
StepFunction nelson_aalen(const CensoredSample& cs, std::vector<std::string>* warnings = nullptr);

/// Counting path N(t) on [0, horizon].
StepFunction nhpp_counting(const EventLog& e);

/// N(T) / T.
double constant_rate_mle(const EventLog& e);

/// The cumulative estimate matching `model`; throws UsageError when the
/// observations are of the wrong kind.
StepFunction cumulative_estimate(const Observations& data, Model model,
                                 std::vector<std::string>* warnings = nullptr);

struct FitOptions {
  std::optional<ShapeKind> shape;  ///< default_shape(model) when unset
  std::optional<double> mode;      ///< known mode; skips the search
  ModeSearch search = ModeSearch::bracketed;
};

struct FitResult {
  ShapeEstimate estimate;
  StepFunction cumulative;
  /// Divisor of the L1 distance used when reporting risk: the horizon T for
  /// nhpp, 1 otherwise.
  double l1_normalizer = 1.0;
  /// Regression only: see RegressionData::design_discrepancy.
  std::optional<double> design_discrepancy;
  std::vector<std::string> warnings;
};

FitResult fit(const Observations& data, Model model, const FitOptions& options = {});

}  // namespace ushape
