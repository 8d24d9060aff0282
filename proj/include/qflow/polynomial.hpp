#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qflow/operator_expr.hpp"
#include "qflow/rational.hpp"

namespace qflow {

inline constexpr int kMaxVars = 2 * kMaxModes;

using Exponents = std::array<int, kMaxVars>;

int total_degree(const Exponents& e);

/// Multivariate polynomial in up to kMaxVars commuting variables with exact
/// Gaussian-rational coefficients. Zero coefficients are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(GaussRational c);  // NOLINT: constants convert implicitly
  static Polynomial variable(int index);
  static Polynomial monomial(GaussRational c, const Exponents& e);

  const std::map<Exponents, GaussRational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_real() const;
  bool is_constant() const;
  GaussRational constant_term() const;
  int degree() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  Polynomial operator-() const;
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  Polynomial pow(int n) const;
  Polynomial derivative(int var, int order = 1) const;

  /// Replaces variable k by images[k] for every k < images.size().
  Polynomial substitute(std::span<const Polynomial> images) const;

  std::complex<double> evaluate(std::span<const double> values) const;

  /// e.g. "q·p²", "-1/2 + q"; names[k] labels variable k.
  std::string str(std::span<const std::string> names) const;

 private:
  void add_term(const Exponents& e, const GaussRational& c);
  std::map<Exponents, GaussRational> terms_;
};

/// Integer power with superscript digits, "" for 1: "²", "³", ...
std::string superscript(int n);

}  // namespace qflow
