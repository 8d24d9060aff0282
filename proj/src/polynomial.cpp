#include "qflow/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace qflow {

int total_degree(const Exponents& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

Polynomial::Polynomial(GaussRational c) { add_term(Exponents{}, c); }

Polynomial Polynomial::variable(int index) {
  if (index < 0 || index >= kMaxVars) throw std::out_of_range("polynomial variable index");
  Exponents e{};
  e[index] = 1;
  return monomial(1, e);
}

Polynomial Polynomial::monomial(GaussRational c, const Exponents& e) {
  Polynomial p;
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, const GaussRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool Polynomial::is_real() const {
  for (const auto& [e, c] : terms_) {
    if (!c.is_real()) return false;
  }
  return true;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

GaussRational Polynomial::constant_term() const {
  auto it = terms_.find(Exponents{});
  return it == terms_.end() ? GaussRational() : it->second;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  Polynomial out;
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e;
      for (int k = 0; k < kMaxVars; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  *this = std::move(out);
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out;
  for (const auto& [e, c] : terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial out(GaussRational(1));
  for (int i = 0; i < n; ++i) out *= *this;
  return out;
}

Polynomial Polynomial::derivative(int var, int order) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (e[var] < order) continue;
    Exponents d = e;
    std::int64_t factor = 1;
    for (int k = 0; k < order; ++k) factor *= e[var] - k;
    d[var] -= order;
    out.add_term(d, c * GaussRational(factor));
  }
  return out;
}

Polynomial Polynomial::substitute(std::span<const Polynomial> images) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Polynomial term(c);
    for (int k = 0; k < kMaxVars; ++k) {
      if (e[k] == 0) continue;
      if (static_cast<std::size_t>(k) < images.size()) {
        term *= images[k].pow(e[k]);
      } else {
        Exponents single{};
        single[k] = e[k];
        term *= monomial(1, single);
      }
    }
    out += term;
  }
  return out;
}

std::complex<double> Polynomial::evaluate(std::span<const double> values) const {
  std::complex<double> sum = 0.0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> term(c.re.to_double(), c.im.to_double());
    for (int k = 0; k < kMaxVars; ++k) {
      if (e[k] == 0) continue;
      term *= std::pow(values[static_cast<std::size_t>(k)], e[k]);
    }
    sum += term;
  }
  return sum;
}

std::string superscript(int n) {
  static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  if (n == 1) return "";
  std::string s = std::to_string(n);
  std::string out;
  for (char ch : s) out += digits[ch - '0'];
  return out;
}

std::string Polynomial::str(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::string out;
  // highest degree first for readability
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string mono;
    for (int k = 0; k < kMaxVars; ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "·";
      mono += names[static_cast<std::size_t>(k)] + superscript(e[k]);
    }
    GaussRational mag = c;
    bool negative = false;
    if ((c.is_real() && c.re.sign() < 0) || (c.re.is_zero() && c.im.sign() < 0)) {
      negative = true;
      mag = -c;
    }
    if (out.empty()) out += negative ? "−" : "";
    else out += negative ? " − " : " + ";
    if (mono.empty()) out += mag.str();
    else if (mag == GaussRational(1)) out += mono;
    else out += mag.str() + "·" + mono;
  }
  return out;
}

}  // namespace qflow
