#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ushape/estimators.hpp"
#include "ushape/histogram.hpp"
#include "ushape/regularize.hpp"
#include "ushape/stepfn.hpp"

namespace ushape {

using Rng = std::mt19937_64;

/// Independent stream for replication `stream` of a run seeded with `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Ground truth for one of the four sampling models.
class TruthSpec {
 public:
  /// Throws DomainError when g is negative (density, hazard, nhpp), a
  /// density does not integrate to 1 within 1e-9, sigma is negative, g does
  /// not have the declared shape, or hazard/nhpp horizons do not start at 0.
  TruthSpec(Model kind, StepFunction g, ShapeKind shape, double sigma = 0.0,
            std::optional<StepFunction> censor_density = std::nullopt);

  Model kind() const noexcept { return kind_; }
  const StepFunction& g() const noexcept { return g_; }
  ShapeKind shape() const noexcept { return shape_; }
  double sigma() const noexcept { return sigma_; }
  /// Density of the censoring times (hazard model); none means no censoring.
  const std::optional<StepFunction>& censor_density() const noexcept { return censor_; }
  const Interval& horizon() const noexcept { return g_.domain(); }
  /// G = ∫ g.
  const PiecewiseAffine& G() const noexcept { return G_; }
  /// A point where g attains its extremum (minimum for U-shaped and monotone
  /// shapes, maximum for unimodal) and is monotone on either side.
  double mode() const;

 private:
  Model kind_;
  StepFunction g_;
  ShapeKind shape_;
  double sigma_;
  std::optional<StepFunction> censor_;
  PiecewiseAffine G_;
};

/// True when the values of g are nonincreasing then nondecreasing
/// (u_shaped), the reverse (unimodal), or monotone as named.
bool has_shape(const StepFunction& g, ShapeKind shape);

struct RandomStepOptions {
  int min_pieces = 3;
  int max_pieces = 12;
  double max_value = 10.0;
};

/// Random piecewise-constant function of the given shape: uniform
/// breakpoints, values uniform on [0, max_value], extremum position uniform
/// over the pieces.
StepFunction random_shaped_step(Rng& rng, const Interval& domain, ShapeKind shape,
                                const RandomStepOptions& options = {});

/// Random truth of the matching kind: [0, 1] for density, regression and
/// hazard (censoring uniform on [0, 2]); [0, horizon] for nhpp. Density
/// truths are normalized; regression noise sigma is uniform on [0.1, 1].
TruthSpec random_truth(Rng& rng, Model kind, ShapeKind shape, double nhpp_horizon = 20.0);

/// One realization: n = n_or_T observations, or a path on [0, T] with
/// T = n_or_T for nhpp (which must equal the truth's horizon end).
Observations generate(const TruthSpec& spec, double n_or_T, std::uint64_t seed,
                      std::uint64_t stream = 0);
Observations generate(const TruthSpec& spec, double n_or_T, Rng& rng);

struct ShapeMapEstimator {
  std::optional<ShapeKind> shape;  ///< the truth's shape when unset
};
struct HistogramEstimator {
  Partition partition;
};
struct KnownModeEstimator {
  double mode;
};
struct ConstantMleEstimator {};

using Estimator =
    std::variant<ShapeMapEstimator, HistogramEstimator, KnownModeEstimator, ConstantMleEstimator>;

struct RiskReport {
  std::string label;
  double mean_l1 = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  std::vector<double> per_rep;
  std::size_t violations = 0;
  std::vector<std::size_t> violation_trials;
  /// Further named quantities, in insertion order.
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const noexcept { return violations == 0; }
  std::optional<double> metric(std::string_view name) const;
};

struct MonteCarloOptions {
  bool keep_per_rep = false;
  unsigned threads = 1;
};

/// Mean L1 error (normalized by T for nhpp) of the estimator over `reps`
/// independent realizations. Throws UsageError for reps < 2 or a constant
/// MLE requested outside the nhpp model.
RiskReport monte_carlo_risk(const TruthSpec& spec, const Estimator& estimator, double n_or_T,
                            std::size_t reps, std::uint64_t seed,
                            const MonteCarloOptions& options = {});

enum class Suite { theorem1, lemma2, lemma4, lemma5, marshall, eq5_sandwich, prop_bounds };

std::string_view to_string(Suite suite);
/// Throws UsageError on an unknown name.
Suite parse_suite(std::string_view name);

struct VerifyOptions {
  double C = 49.0;
  unsigned threads = 1;
};

/// Randomized check of one inequality family; `violations` counts trials
/// (or, for prop_bounds, Monte Carlo checks) that fail beyond tolerance.
RiskReport verify_inequalities(Suite suite, std::size_t trials, std::uint64_t seed,
                               const VerifyOptions& options = {});

/// `metric,value` rows, then `violation,<trial>` rows and a final
/// `pass,1|0`.
void write_report_csv(std::ostream& out, const RiskReport& report);

}  // namespace ushape
