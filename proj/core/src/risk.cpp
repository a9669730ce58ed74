#include "interbank/risk.hpp"

#include <cmath>

#include "interbank/errors.hpp"

namespace interbank {

namespace {

Estimate binomial(int hits, int n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

// Sample mean with sample-std / sqrt(n) standard error over the selected paths.
template <typename Select>
std::optional<Estimate> mean_fraction(const std::vector<double>& frac, Select select) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    if (!select(i)) continue;
    sum += frac[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  const double mean = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    if (select(i)) ss += (frac[i] - mean) * (frac[i] - mean);
  }
  const double se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return Estimate{mean, se};
}

}  // namespace

RiskReport estimate_risk_report(const PathEnsemble& e, double D) {
  if (e.n_paths < 1) throw UnsupportedInput("risk estimation needs a nonempty ensemble");
  RiskReport r;
  r.n_paths = e.n_paths;
  r.minor_default_fraction.resize(e.n_paths);

  std::vector<bool> major_default(e.n_paths);
  std::vector<bool> systemic(e.n_paths);
  int md_systemic = 0;
  for (int path = 0; path < e.n_paths; ++path) {
    int defaults = 0;
    for (int i = 0; i < e.n_minors; ++i) {
      if (path_default_indicator(e.minor_minimum(path, i), D)) ++defaults;
    }
    r.minor_default_fraction[path] = static_cast<double>(defaults) / e.n_minors;
    major_default[path] = path_default_indicator(e.major_min[path], D);
    systemic[path] = path_default_indicator(e.market_min[path], D);
    if (major_default[path]) ++r.n_major_default;
    if (systemic[path]) ++r.n_systemic;
    if (major_default[path] && systemic[path]) ++md_systemic;
  }

  const int n = e.n_paths;
  const int n_md = r.n_major_default;
  const int n_ms = n - n_md;
  r.p0 = binomial(n_md, n);
  r.pse = binomial(r.n_systemic, n);
  r.pi = *mean_fraction(r.minor_default_fraction, [](std::size_t) { return true; });
  r.pi_given_MD = mean_fraction(r.minor_default_fraction, [&](std::size_t i) { return bool(major_default[i]); });
  r.pi_given_MS = mean_fraction(r.minor_default_fraction, [&](std::size_t i) { return !major_default[i]; });
  if (n_md > 0) r.pse_given_MD = binomial(md_systemic, n_md);
  if (n_ms > 0) r.pse_given_MS = binomial(r.n_systemic - md_systemic, n_ms);
  return r;
}

std::optional<TotalProbabilityResidual> total_probability_residual(const RiskReport& r) {
  if (!r.pi_given_MD || !r.pi_given_MS || !r.pse_given_MD || !r.pse_given_MS) return std::nullopt;
  const double p0 = r.p0.value;
  TotalProbabilityResidual res;
  res.minor = r.pi.value - ((r.pi_given_MD->value - r.pi_given_MS->value) * p0 + r.pi_given_MS->value);
  res.systemic = r.pse.value - ((r.pse_given_MD->value - r.pse_given_MS->value) * p0 + r.pse_given_MS->value);
  return res;
}

LossHistogram loss_distribution(const PathEnsemble& e) {
  if (e.kind != PopulationKind::Finite || e.minor_defaults.size() != static_cast<std::size_t>(e.n_paths)) {
    throw UnsupportedInput("loss distribution needs a finite-population ensemble with per-path default counts");
  }
  LossHistogram h;
  h.n_minors = e.n_minors;
  const std::size_t bins = static_cast<std::size_t>(e.n_minors) + 1;
  std::vector<double> total(bins, 0.0), md(bins, 0.0), ms(bins, 0.0);
  int n_md = 0;
  for (int path = 0; path < e.n_paths; ++path) {
    const int k = e.minor_defaults[path];
    total[k] += 1.0;
    if (path_default_indicator(e.major_min[path], e.threshold)) {
      md[k] += 1.0;
      ++n_md;
    } else {
      ms[k] += 1.0;
    }
  }
  const int n_ms = e.n_paths - n_md;
  for (auto& v : total) v /= e.n_paths;
  h.total = std::move(total);
  if (n_md > 0) {
    for (auto& v : md) v /= n_md;
    h.given_MD = std::move(md);
  }
  if (n_ms > 0) {
    for (auto& v : ms) v /= n_ms;
    h.given_MS = std::move(ms);
  }
  h.p0 = static_cast<double>(n_md) / e.n_paths;
  return h;
}

}  // namespace interbank
