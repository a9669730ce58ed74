#pragma once

#include <string>
#include <vector>

namespace interbank {

// Model constants for one major bank and a homogeneous population of minor banks.
// State variables are log-monetary reserves. (a0, F) are stored alongside (a, G)
// and checked for consistency instead of being derived on the fly.
struct MarketParams {
  double a = 5.0;       // minor mean-reversion rate
  double a0 = 2.5;      // major mean-reversion rate
  double F = 0.5;       // relative size of the minor-bank mass
  double G = 0.5;       // relative size of the major bank
  double q = 1.0;       // minor incentive to trade with the central bank
  double q0 = 1.0;      // major incentive to trade with the central bank
  double eps = 10.0;    // minor running deviation penalty
  double eps0 = 10.0;   // major running deviation penalty
  double c = 0.0;       // minor terminal deviation penalty
  double c0 = 0.0;      // major terminal deviation penalty
  double sigma = 1.0;   // minor volatility
  double sigma0 = 1.0;  // major volatility
  double T = 1.0;       // horizon
  double D = -0.65;     // default threshold
  double x0_init = 0.0; // initial major log-reserve
  double xi_init = 0.0; // initial log-reserve of every minor

  bool operator==(const MarketParams&) const = default;
};

struct Clearing {
  double a0;
  double F;
};

/// Market clearing: a0 = a*G and F = 1 - G. Throws ParameterError for a <= 0 or G outside [0,1].
Clearing derive_clearing(double a, double G);

/// Returns `base` with G replaced and (a0, F) re-derived from clearing.
MarketParams with_major_size(MarketParams base, double G);

/// Returns `base` with a replaced and a0 re-derived from clearing at the current G.
MarketParams with_minor_rate(MarketParams base, double a);

/// Checks every invariant and returns the parameters unchanged. All violations are
/// collected into one ParameterError message, each tagged by kind (clearing,
/// convexity, range). A major-bank convexity shortfall (q0^2 > eps0) is only
/// appended to `warnings`.
MarketParams validate_params(const MarketParams& p, std::vector<std::string>* warnings = nullptr);

/// F*x_avg + G*x0.
inline double market_state(double x_avg, double x0, double F, double G) {
  return F * x_avg + G * x0;
}

/// Field names in declaration order; also the configuration-file keys.
const std::vector<std::string>& param_names();

/// Mutable access by field name; nullptr for unknown names.
double* param_field(MarketParams& p, const std::string& name);
double param_value(const MarketParams& p, const std::string& name);

}  // namespace interbank
