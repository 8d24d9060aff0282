#pragma once

#include <cstdint>
#include <random>

#include "qflow/phase_space.hpp"

namespace qflow {

/// Independent random stream addressed by (seed, a, b), e.g. (trajectory,
/// coordinate). Draws depend only on the address and the draw count, never
/// on which thread runs the stream.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double sample(const GaussianMixture1D& m);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace qflow
