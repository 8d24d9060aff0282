#pragma once

// Continuous quadrature measurement by parametric amplification, and the
// qubit-meter spin measurement with sign binning.
//
// The continuous model uses OperatorQuadratures (vacuum variance of q is 1);
// the spin model uses AmplitudeParts with sigma_m = x / G.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qflow/fock_oracle.hpp"
#include "qflow/phase_space.hpp"

namespace qflow {

struct ContinuousMeasurementResult {
  double tau = 0.0;
  double gain = 1.0;
  GaussianMixture1D q_distribution;
  GaussianMixture1D q_m_distribution;
  std::optional<std::vector<double>> samples;
};

/// q ~ N(G q0, 1 + G^2 var0) with G = e^tau; q_m = q / G.
ContinuousMeasurementResult continuous_measurement(double q0, double initial_operator_variance,
                                                   double tau);

/// Closed-form P(q_m, tau) for an eigenstate input.
double eigenstate_density(double q_m, double q0, double tau);

struct SpinMeasurementResult {
  double gain = 1.0;
  GaussianMixture1D sigma_m_distribution;
  std::optional<std::vector<int>> binned_samples;
};

/// Two branches at sigma_m = +-1 weighted by |c_up|^2, |c_down|^2, each with
/// variance 1/(2 G^2).
SpinMeasurementResult qubit_measurement(const fock::SpinState& spin, double gain);

/// Sign of sigma_m; exact zero goes to +1.
int bin_spin(double sigma_m);

/// 1/2 (erf G + 1 - erfc G), which is erf G.
double binning_efficiency(double gain);

/// n draws of the mixture, draw i from stream (seed, i, stream).
std::vector<double> sample_mixture(const GaussianMixture1D& m, std::size_t n,
                                   std::uint64_t seed, std::uint64_t stream = 0);

void sample_continuous(ContinuousMeasurementResult& r, std::size_t n, std::uint64_t seed);
/// Fills binned_samples and returns the raw sigma_m values.
std::vector<double> sample_spin(SpinMeasurementResult& r, std::size_t n, std::uint64_t seed);

std::vector<double> linear_grid(double lo, double hi, std::size_t n);

/// "value,density"
void write_distribution_csv(std::ostream& os, const GaussianMixture1D& m,
                            const std::vector<double>& grid);
/// "traj_id,value,binned"
void write_samples_csv(std::ostream& os, const std::vector<double>& values);

}  // namespace qflow
