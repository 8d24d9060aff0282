#include "qflow/rng.hpp"

#include <cmath>

namespace qflow {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(a), hi(a), lo(b), hi(b), 0x71f10u};
  return std::mt19937_64(seq);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    : engine_(make_engine(seed, a, b)), normal_(0.0, 1.0), uniform_(0.0, 1.0) {}

double StreamRng::sample(const GaussianMixture1D& m) {
  const auto& comps = m.components();
  std::size_t k = 0;
  if (comps.size() > 1) {
    const double u = uniform();
    double acc = 0.0;
    for (k = 0; k + 1 < comps.size(); ++k) {
      acc += comps[k].weight;
      if (u < acc) break;
    }
  }
  return comps[k].mean + std::sqrt(comps[k].variance) * normal();
}

}  // namespace qflow
