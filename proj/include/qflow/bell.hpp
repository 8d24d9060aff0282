#pragma once

// CHSH experiment on the singlet, each spin read out by an amplifying meter
// and binned by sign.

#include <array>
#include <cstdint>

#include "qflow/dynamics.hpp"

namespace qflow {

using AnglePair = std::array<double, 2>;
using Correlations = std::array<std::array<double, 2>, 2>;

struct ChshAngles {
  AnglePair theta{};
  AnglePair phi{};
};

struct ChshSettings {
  AnglePair theta{};
  AnglePair phi{};
  double gain = 1.0;
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  /// Samples per independent random stream.
  std::size_t batch_size = 4096;
  Execution execution = Execution::Parallel;
};

struct ChshResult {
  Correlations correlations{};  // E(theta_i, phi_j)
  double B = 0.0;
  double B_analytic = 0.0;
  double stderr_B = 0.0;
  Correlations analytic{};
  /// Binned marginals <sigma_b^A> and <sigma_b^B> per setting pair.
  Correlations marginal_a{};
  Correlations marginal_b{};
  std::size_t n_samples = 0;
};

/// 1/4 (1 - a b cos(theta - phi)).
double singlet_branch_probability(int a, int b, double theta, double phi);

/// E11 - E12 + E22 + E21.
double chsh_combination(const Correlations& e);

ChshAngles optimal_angles();

/// E = -eta(G)^2 cos(theta - phi); fills correlations, analytic, B and
/// B_analytic (stderr 0).
ChshResult chsh_analytic(double gain, const ChshAngles& angles);

ChshResult chsh_monte_carlo(const ChshSettings& s);

/// 2 sqrt2 eta(G)^2.
double bell_b_optimal(double gain);

/// Gain where the optimal B crosses 2, i.e. erf(G) = 2^{-1/4}, by bisection.
double bell_threshold_gain(double tol = 1e-12);

}  // namespace qflow
