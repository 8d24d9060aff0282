#include "qflow/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qflow {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

double conversion_factor(QuadratureConvention from, QuadratureConvention to) {
  if (from == to) return 1.0;
  return from == QuadratureConvention::AmplitudeParts ? 2.0 : 0.5;
}

}  // namespace

ComplexAmplitude::ComplexAmplitude(double x_, double p_) : x(x_), p(p_) {
  require_finite(x, "amplitude x");
  require_finite(p, "amplitude p");
}

ComplexAmplitude::ComplexAmplitude(Complex alpha)
    : ComplexAmplitude(alpha.real(), alpha.imag()) {}

std::string to_string(QuadratureConvention c) {
  return c == QuadratureConvention::AmplitudeParts ? "amplitude" : "quadrature";
}

QuadratureConvention parse_convention(const std::string& text) {
  if (text == "amplitude" || text == "AmplitudeParts") {
    return QuadratureConvention::AmplitudeParts;
  }
  if (text == "quadrature" || text == "OperatorQuadratures") {
    return QuadratureConvention::OperatorQuadratures;
  }
  throw std::invalid_argument("unknown quadrature convention '" + text + "'");
}

double convert_quadrature(double value, QuadratureConvention from,
                          QuadratureConvention to) {
  return value * conversion_factor(from, to);
}

double convert_variance(double variance, QuadratureConvention from,
                        QuadratureConvention to) {
  const double f = conversion_factor(from, to);
  return variance * f * f;
}

TimeGrid::TimeGrid(double tau_0_, double tau_f_, std::size_t n_steps_)
    : tau_0(tau_0_), tau_f(tau_f_), n_steps(n_steps_) {
  require_finite(tau_0, "tau_0");
  require_finite(tau_f, "tau_f");
  if (!(tau_f > tau_0)) throw std::invalid_argument("TimeGrid requires tau_f > tau_0");
  if (n_steps == 0) throw std::invalid_argument("TimeGrid requires n_steps > 0");
}

double TimeGrid::time(std::size_t k) const {
  if (k == n_steps) return tau_f;
  return tau_0 + step() * static_cast<double>(k);
}

GaussianMixture1D::GaussianMixture1D(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    require_finite(c.mean, "mixture mean");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance)) {
      throw std::invalid_argument("mixture variances must be positive and finite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

GaussianMixture1D GaussianMixture1D::single(double mean, double variance) {
  return GaussianMixture1D({{1.0, mean, variance}});
}

double GaussianMixture1D::pdf(double value) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    const double d = value - c.mean;
    sum += c.weight * std::exp(-0.5 * d * d / c.variance) /
           std::sqrt(2.0 * std::numbers::pi * c.variance);
  }
  return sum;
}

double GaussianMixture1D::cdf(double value) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    sum += c.weight * 0.5 *
           std::erfc(-(value - c.mean) / std::sqrt(2.0 * c.variance));
  }
  return sum;
}

double GaussianMixture1D::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double GaussianMixture1D::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& c : components_) {
    v += c.weight * (c.variance + (c.mean - m) * (c.mean - m));
  }
  return v;
}

std::pair<double, double> GaussianMixture1D::envelope(double k_sigma) const {
  double lo = components_.front().mean;
  double hi = lo;
  for (const auto& c : components_) {
    const double s = k_sigma * std::sqrt(c.variance);
    lo = std::min(lo, c.mean - s);
    hi = std::max(hi, c.mean + s);
  }
  return {lo, hi};
}

GaussianMixture1D GaussianMixture1D::transformed(double scale, double shift) const {
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw std::invalid_argument("mixture scale must be finite and non-zero");
  }
  auto out = components_;
  for (auto& c : out) {
    c.mean = scale * c.mean + shift;
    c.variance *= scale * scale;
  }
  return GaussianMixture1D(std::move(out));
}

double mixture_pdf(const GaussianMixture1D& m, double value) { return m.pdf(value); }

double mixture_mass(const GaussianMixture1D& m, double k_sigma, std::size_t n_points) {
  const auto [lo, hi] = m.envelope(k_sigma);
  const double h = (hi - lo) / static_cast<double>(n_points - 1);
  double sum = 0.5 * (m.pdf(lo) + m.pdf(hi));
  for (std::size_t i = 1; i + 1 < n_points; ++i) {
    sum += m.pdf(lo + h * static_cast<double>(i));
  }
  return sum * h;
}

}  // namespace qflow
