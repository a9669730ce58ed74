#include "interbank/rng.hpp"

#include <cstring>

namespace interbank {

namespace {

std::mt19937_64 seeded(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t domain) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffULL); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(a), hi(a), lo(b), hi(b), lo(c), hi(c), lo(domain)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kPathDomain = 0x70617468;  // "path"
constexpr std::uint64_t kAuxDomain = 0x61757821;   // "aux!"

}  // namespace

std::mt19937_64 RngPolicy::path_engine(std::uint64_t path) const {
  return seeded(master_seed, path, scenario_crn ? 0 : scenario_index + 1, kPathDomain);
}

std::mt19937_64 RngPolicy::auxiliary_engine(std::uint64_t tag) const {
  return seeded(master_seed, tag, 0, kAuxDomain);
}

void fill_path_noise(const RngPolicy& rng, std::uint64_t path, std::span<double> out) {
  auto engine = rng.path_engine(path);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& z : out) z = normal(engine);
}

std::uint64_t fnv1a(std::span<const double> values, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof v);
    h ^= bits;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace interbank
