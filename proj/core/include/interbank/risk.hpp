#pragma once

#include <optional>
#include <vector>

#include "interbank/simulate.hpp"

namespace interbank {

/// A Monte Carlo frequency with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Default and systemic-event frequencies for one ensemble. Conditionals are
/// empty when nothing fell into the conditioning set (MD: major defaulted,
/// MS: major survived).
struct RiskReport {
  Estimate p0;   // major default
  Estimate pi;   // representative minor default (mean of per-path fractions)
  Estimate pse;  // systemic event: market-state minimum <= D
  std::optional<Estimate> pi_given_MD;
  std::optional<Estimate> pi_given_MS;
  std::optional<Estimate> pse_given_MD;
  std::optional<Estimate> pse_given_MS;

  int n_paths = 0;
  int n_major_default = 0;
  int n_systemic = 0;
  std::vector<double> minor_default_fraction;  // per path
};

struct LossHistogram {
  int n_minors = 0;
  std::vector<double> total;                 // k = 0..N
  std::optional<std::vector<double>> given_MD;
  std::optional<std::vector<double>> given_MS;
  double p0 = 0.0;
};

struct TotalProbabilityResidual {
  double minor = 0.0;
  double systemic = 0.0;
};

/// Default when the running minimum reaches the threshold (boundary included).
inline bool path_default_indicator(double min_over_time, double D) { return min_over_time <= D; }

RiskReport estimate_risk_report(const PathEnsemble& e, double D);

/// pi - [(pi|MD - pi|MS) p0 + pi|MS] and the systemic analogue; empty when a
/// conditional is undefined.
std::optional<TotalProbabilityResidual> total_probability_residual(const RiskReport& r);

/// Distribution of the number of defaulted minors, from the per-path counts the
/// finite simulator recorded at its threshold. Throws UnsupportedInput for limiting ensembles.
LossHistogram loss_distribution(const PathEnsemble& e);

}  // namespace interbank
