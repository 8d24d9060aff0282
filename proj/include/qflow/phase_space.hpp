#pragma once

// Core phase-space types shared by every qflow module.
//
// Times are dimensionless (tau = g t); the coupling g is never a runtime
// parameter. Variances are stored as variances, never as standard deviations.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow {

using Complex = std::complex<double>;

/// A single-mode phase-space point alpha = x + i p.
struct ComplexAmplitude {
  double x = 0.0;
  double p = 0.0;

  ComplexAmplitude() = default;
  ComplexAmplitude(double x_, double p_);
  explicit ComplexAmplitude(Complex alpha);

  Complex value() const { return {x, p}; }
  double norm_squared() const { return x * x + p * p; }
};

/// How real quadrature values are built from alpha.
///
/// AmplitudeParts: x = Re(alpha); the vacuum Q-variance of x is 1/2.
/// OperatorQuadratures: q = alpha + alpha*, p = (alpha - alpha*)/i; the
/// vacuum Q-variance of q is 1. Values differ by a factor 2, variances by 4.
enum class QuadratureConvention { AmplitudeParts, OperatorQuadratures };

std::string to_string(QuadratureConvention c);
QuadratureConvention parse_convention(const std::string& text);

double convert_quadrature(double value, QuadratureConvention from,
                          QuadratureConvention to);
double convert_variance(double variance, QuadratureConvention from,
                        QuadratureConvention to);

struct TimeGrid {
  double tau_0 = 0.0;
  double tau_f = 1.0;
  std::size_t n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double tau_0_, double tau_f_, std::size_t n_steps_);

  double step() const { return (tau_f - tau_0) / static_cast<double>(n_steps); }
  double time(std::size_t k) const;
  std::size_t n_points() const { return n_steps + 1; }
};

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// Normalized mixture of 1-D Gaussians.
class GaussianMixture1D {
 public:
  GaussianMixture1D() = default;
  explicit GaussianMixture1D(std::vector<GaussianComponent> components);

  static GaussianMixture1D single(double mean, double variance);

  const std::vector<GaussianComponent>& components() const { return components_; }

  double pdf(double value) const;
  double cdf(double value) const;
  double mean() const;
  double variance() const;

  /// Smallest interval covering every component's mean +- k sigma.
  std::pair<double, double> envelope(double k_sigma) const;

  /// Affine map value -> scale * value + shift applied to the random variable.
  GaussianMixture1D transformed(double scale, double shift = 0.0) const;

 private:
  std::vector<GaussianComponent> components_;
};

double mixture_pdf(const GaussianMixture1D& m, double value);

/// Trapezoid integral of the mixture density over its +-k sigma envelope.
double mixture_mass(const GaussianMixture1D& m, double k_sigma = 10.0,
                    std::size_t n_points = 20001);

}  // namespace qflow
