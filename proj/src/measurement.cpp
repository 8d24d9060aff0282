#include "qflow/measurement.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qflow/csv.hpp"
#include "qflow/rng.hpp"

namespace qflow {

ContinuousMeasurementResult continuous_measurement(double q0, double initial_operator_variance,
                                                   double tau) {
  if (!(tau >= 0)) throw std::invalid_argument("tau must be >= 0");
  if (!(initial_operator_variance >= 0)) {
    throw std::invalid_argument("initial operator variance must be >= 0");
  }
  ContinuousMeasurementResult r;
  r.tau = tau;
  r.gain = std::exp(tau);
  const double g = r.gain;
  r.q_distribution = GaussianMixture1D::single(g * q0, 1.0 + g * g * initial_operator_variance);
  r.q_m_distribution = r.q_distribution.transformed(1.0 / g);
  return r;
}

double eigenstate_density(double q_m, double q0, double tau) {
  const double g2 = std::exp(2.0 * tau);
  const double d = q_m - q0;
  return std::sqrt(g2 / (2.0 * std::numbers::pi)) * std::exp(-0.5 * g2 * d * d);
}

SpinMeasurementResult qubit_measurement(const fock::SpinState& spin, double gain) {
  if (!(gain > 0)) throw std::invalid_argument("gain must be > 0");
  const double up = std::norm(spin.up);
  const double down = std::norm(spin.down);
  const double total = up + down;
  const double var = 1.0 / (2.0 * gain * gain);
  std::vector<GaussianComponent> comps;
  if (up > 0) comps.push_back({up / total, 1.0, var});
  if (down > 0) comps.push_back({down / total, -1.0, var});
  SpinMeasurementResult r;
  r.gain = gain;
  r.sigma_m_distribution = GaussianMixture1D(std::move(comps));
  return r;
}

int bin_spin(double sigma_m) {
  if (!std::isfinite(sigma_m)) throw std::invalid_argument("sigma_m must be finite");
  return sigma_m < 0 ? -1 : 1;
}

double binning_efficiency(double gain) {
  if (!(gain >= 0)) throw std::invalid_argument("gain must be >= 0");
  return 0.5 * (std::erf(gain) + 1.0 - std::erfc(gain));
}

std::vector<double> sample_mixture(const GaussianMixture1D& m, std::size_t n,
                                   std::uint64_t seed, std::uint64_t stream) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    StreamRng rng(seed, i, stream);
    out[i] = rng.sample(m);
  }
  return out;
}

void sample_continuous(ContinuousMeasurementResult& r, std::size_t n, std::uint64_t seed) {
  r.samples = sample_mixture(r.q_m_distribution, n, seed);
}

std::vector<double> sample_spin(SpinMeasurementResult& r, std::size_t n, std::uint64_t seed) {
  auto values = sample_mixture(r.sigma_m_distribution, n, seed);
  std::vector<int> bins(n);
  for (std::size_t i = 0; i < n; ++i) bins[i] = bin_spin(values[i]);
  r.binned_samples = std::move(bins);
  return values;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

void write_distribution_csv(std::ostream& os, const GaussianMixture1D& m,
                            const std::vector<double>& grid) {
  write_csv_row(os, {"value", "density"});
  for (double v : grid) write_csv_row(os, {csv_number(v), csv_number(m.pdf(v))});
}

void write_samples_csv(std::ostream& os, const std::vector<double>& values) {
  write_csv_row(os, {"traj_id", "value", "binned"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    write_csv_row(os, {std::to_string(i), csv_number(values[i]), std::to_string(bin_spin(values[i]))});
  }
}

}  // namespace qflow
