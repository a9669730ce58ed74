#include "interbank/model.hpp"

#include <cmath>
#include <sstream>

#include "interbank/errors.hpp"

namespace interbank {

namespace {

// Tolerance for the clearing identities when parameters come from decimal text.
constexpr double kClearingTol = 1e-12;

}  // namespace

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Parameter: return "parameter";
    case ErrorCategory::Numerical: return "numerical";
    case ErrorCategory::Simulation: return "simulation";
    case ErrorCategory::Unsupported: return "unsupported";
    case ErrorCategory::NoMatch: return "no-matching-path";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

Clearing derive_clearing(double a, double G) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ParameterError("range violation: a must be positive and finite");
  }
  if (!(G >= 0.0 && G <= 1.0)) {
    throw ParameterError("range violation: G must lie in [0,1]");
  }
  return Clearing{a * G, 1.0 - G};
}

MarketParams with_major_size(MarketParams base, double G) {
  const Clearing cl = derive_clearing(base.a, G);
  base.G = G;
  base.a0 = cl.a0;
  base.F = cl.F;
  return base;
}

MarketParams with_minor_rate(MarketParams base, double a) {
  const Clearing cl = derive_clearing(a, base.G);
  base.a = a;
  base.a0 = cl.a0;
  base.F = cl.F;
  return base;
}

MarketParams validate_params(const MarketParams& p, std::vector<std::string>* warnings) {
  std::vector<std::string> violations;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) violations.push_back(msg);
  };

  for (const auto& name : param_names()) {
    require(std::isfinite(param_value(p, name)), "range violation: " + name + " is not finite");
  }
  require(p.a > 0.0, "range violation: a > 0 required");
  require(p.T > 0.0, "range violation: T > 0 required");
  require(p.sigma >= 0.0, "range violation: sigma >= 0 required");
  require(p.sigma0 >= 0.0, "range violation: sigma0 >= 0 required");
  require(p.F >= 0.0 && p.F <= 1.0, "range violation: F must lie in [0,1]");
  require(p.G >= 0.0 && p.G <= 1.0, "range violation: G must lie in [0,1]");
  require(p.eps >= 0.0 && p.eps0 >= 0.0, "range violation: eps, eps0 >= 0 required");
  require(p.c >= 0.0 && p.c0 >= 0.0, "range violation: c, c0 >= 0 required");

  require(std::abs(p.F + p.G - 1.0) <= kClearingTol, "clearing violation: F + G != 1");
  require(std::abs(p.a0 - p.a * p.G) <= kClearingTol * std::max(1.0, std::abs(p.a)),
          "clearing violation: a0 != a*G");
  require(std::abs(p.a0 - (p.a - p.a * p.F)) <= kClearingTol * std::max(1.0, std::abs(p.a)),
          "clearing violation: a0 != a - a*F");

  require(p.q * p.q <= p.eps, "convexity violation: q^2 > eps");

  if (!violations.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) os << "; ";
      os << violations[i];
    }
    throw ParameterError(os.str());
  }
  if (warnings && p.q0 * p.q0 > p.eps0) {
    warnings->push_back("major convexity: q0^2 > eps0");
  }
  return p;
}

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = {
      "a", "a0", "F", "G", "q", "q0", "eps", "eps0", "c", "c0",
      "sigma", "sigma0", "T", "D", "x0_init", "xi_init"};
  return names;
}

double* param_field(MarketParams& p, const std::string& name) {
  if (name == "a") return &p.a;
  if (name == "a0") return &p.a0;
  if (name == "F") return &p.F;
  if (name == "G") return &p.G;
  if (name == "q") return &p.q;
  if (name == "q0") return &p.q0;
  if (name == "eps") return &p.eps;
  if (name == "eps0") return &p.eps0;
  if (name == "c") return &p.c;
  if (name == "c0") return &p.c0;
  if (name == "sigma") return &p.sigma;
  if (name == "sigma0") return &p.sigma0;
  if (name == "T") return &p.T;
  if (name == "D") return &p.D;
  if (name == "x0_init") return &p.x0_init;
  if (name == "xi_init") return &p.xi_init;
  return nullptr;
}

double param_value(const MarketParams& p, const std::string& name) {
  MarketParams copy = p;
  const double* field = param_field(copy, name);
  if (!field) throw ConfigError("unknown parameter '" + name + "'");
  return *field;
}

}  // namespace interbank
