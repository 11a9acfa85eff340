#pragma once

#include <cstddef>
#include <vector>

#include "ushape/stepfn.hpp"

namespace ushape {

/// Variable-binwidth histogram: on each cell, the increment of G_hat over
/// the cell length. Throws DomainError unless the partition spans G_hat's
/// domain.
StepFunction histogram_estimate(const StepFunction& G_hat, const Partition& pi);

/// Cell-mean (L2-orthogonal) projection of g onto functions constant on the
/// cells of pi.
StepFunction projection(const StepFunction& g, const Partition& pi);

enum class StepDistance {
  /// Exact infimum: a weighted median of g's values on each cell.
  exact_median,
  /// ‖projection(g, pi) - g‖, at most twice the infimum.
  projection_bound,
};

/// L1 distance from g to the functions constant on the cells of pi.
double best_step_distance(const StepFunction& g, const Partition& pi,
                          StepDistance method = StepDistance::exact_median);

struct RiskBracket {
  Partition partition;
  double bias_term;         ///< 4 · best_step_distance(g, pi)
  double fluctuation_term;  ///< C · Σ_k sup_{I_k} |Z(t) - Z(t_{k-1})|
  double total;
  double C;
};

/// Per-realization bracket for Z = G_hat - G. Throws DomainError for C < 1.
RiskBracket risk_bracket(const StepFunction& g, const PiecewiseAffine& G,
                         const StepFunction& G_hat, const Partition& pi, double C = 49.0);

struct CellIncrement {
  double sup_increment;       ///< sup_{I_k} |Z(t) - Z(t_{k-1})|
  double endpoint_increment;  ///< |Z(t_k) - Z(t_{k-1})|
};

std::vector<CellIncrement> cell_increments(const StepFunction& G_hat, const PiecewiseAffine& G,
                                           const Partition& pi);

struct Condition4 {
  double ratio;   ///< max over cells of mean sup / mean endpoint increment
  double std_error;  ///< delta-method standard error of the worst cell's ratio
  std::size_t worst_cell;
  std::vector<double> per_cell;  ///< NaN for cells where Z never moved
};

/// Empirical constant of the sup-versus-endpoint moment condition from
/// replicated cell increments (one inner vector per replication). Throws
/// UsageError with fewer than two replications.
Condition4 condition4_ratio(const std::vector<std::vector<CellIncrement>>& samples,
                            const Partition& pi);

}  // namespace ushape
