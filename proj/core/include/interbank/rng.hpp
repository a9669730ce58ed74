#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace interbank {

// Random-number policy. Each Monte Carlo path owns one engine seeded from
// (master_seed, path index) through std::seed_seq, so a path's draws do not
// depend on scheduling or on which worker runs it. With scenario_crn set, every
// scenario sharing the master seed sees identical increments; otherwise the
// scenario index is mixed into the seed.
struct RngPolicy {
  std::uint64_t master_seed = 0;
  bool scenario_crn = true;
  std::uint64_t scenario_index = 0;

  RngPolicy for_scenario(std::uint64_t index) const {
    RngPolicy out = *this;
    out.scenario_index = index;
    return out;
  }

  std::mt19937_64 path_engine(std::uint64_t path) const;

  /// Engine for non-path randomness (e.g. perturbation directions), keyed by `tag`.
  std::mt19937_64 auxiliary_engine(std::uint64_t tag) const;
};

/// Standard normal draws for one path. The simulators read them bank-major: with
/// n_steps per bank, bank b's increments occupy [b * n_steps, (b + 1) * n_steps)
/// and bank 0 is the major bank. Draws are sequential, so bank b's increments do
/// not depend on how many banks follow it.
void fill_path_noise(const RngPolicy& rng, std::uint64_t path, std::span<double> out);

/// FNV-1a style hash over the 64-bit patterns; certifies that scenarios shared increments.
std::uint64_t fnv1a(std::span<const double> values, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace interbank
