#include "qflow/symbolic_fpe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qflow {

OrderError::OrderError(const std::string& term_, int order_)
    : std::runtime_error("term '" + term_ + "' produces derivatives of order " +
                         std::to_string(order_) + " (at most 2 allowed)"),
      term(term_),
      order(order_) {}

int DiffOperator::order() const {
  int o = 0;
  for (const auto& [e, c] : terms) o = std::max(o, total_degree(e));
  return o;
}

void DiffOperator::add(const Exponents& derivative, const Polynomial& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms.try_emplace(derivative, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms.erase(it);
  }
}

namespace {

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Exponents unit(int var, int power = 1) {
  Exponents e{};
  e[var] = power;
  return e;
}

// Product of two operators whose derivatives never act on the other's
// coefficients, so symbols multiply commutatively.
DiffOperator commuting_product(const DiffOperator& a, const DiffOperator& b) {
  DiffOperator out;
  out.n_modes = a.n_modes;
  for (const auto& [ea, ca] : a.terms) {
    for (const auto& [eb, cb] : b.terms) {
      Exponents e;
      for (int k = 0; k < kMaxVars; ++k) e[k] = ea[k] + eb[k];
      out.add(e, ca * cb);
    }
  }
  return out;
}

DiffOperator scalar_operator(int n_modes, const Polynomial& c) {
  DiffOperator d;
  d.n_modes = n_modes;
  d.add(Exponents{}, c);
  return d;
}

// (d_v + coefficient_var)^power expanded binomially.
DiffOperator shifted_derivative_power(int n_modes, int derivative_var, int coefficient_var,
                                      int power) {
  DiffOperator d;
  d.n_modes = n_modes;
  for (int j = 0; j <= power; ++j) {
    d.add(unit(derivative_var, j),
          Polynomial::monomial(GaussRational(binomial(power, j)),
                               unit(coefficient_var, power - j)));
  }
  return d;
}

int modes_of(const OperatorExpr& h) { return std::max(1, h.max_mode() + 1); }

}  // namespace

DiffOperator commutator_action(const OperatorExpr& h) {
  const int n_modes = modes_of(h);
  DiffOperator result;
  result.n_modes = n_modes;
  const GaussRational i_unit = GaussRational::i();
  for (const auto& [m, c] : normal_order(h).canonical_terms()) {
    // H L: alpha^n (d_alpha + alpha*)^m
    Exponents alpha_powers{};
    for (int k = 0; k < n_modes; ++k) alpha_powers[2 * k] = m.annihilate[k];
    DiffOperator left = scalar_operator(n_modes, Polynomial::monomial(c, alpha_powers));
    for (int k = 0; k < n_modes; ++k) {
      left = commuting_product(left, shifted_derivative_power(n_modes, 2 * k, 2 * k + 1,
                                                              m.create[k]));
    }
    // L H: alpha*^m (d_alpha* + alpha)^n
    Exponents conj_powers{};
    for (int k = 0; k < n_modes; ++k) conj_powers[2 * k + 1] = m.create[k];
    DiffOperator right = scalar_operator(n_modes, Polynomial::monomial(c, conj_powers));
    for (int k = 0; k < n_modes; ++k) {
      right = commuting_product(right, shifted_derivative_power(n_modes, 2 * k + 1, 2 * k,
                                                                m.annihilate[k]));
    }
    for (const auto& [e, coeff] : left.terms) result.add(e, Polynomial(i_unit) * coeff);
    for (const auto& [e, coeff] : right.terms) result.add(e, Polynomial(-i_unit) * coeff);
  }
  return result;
}

std::vector<std::string> coordinate_names(int n_modes, QuadratureConvention c) {
  const std::string in_phase = c == QuadratureConvention::OperatorQuadratures ? "q" : "x";
  std::vector<std::string> names;
  for (int k = 0; k < n_modes; ++k) {
    const std::string suffix = n_modes == 1 ? "" : std::to_string(k + 1);
    names.push_back(in_phase + suffix);
    names.push_back("p" + suffix);
  }
  return names;
}

PhaseSpacePDE to_phase_space_pde(const DiffOperator& d, QuadratureConvention c) {
  const int n_modes = d.n_modes;
  const int n_vars = 2 * n_modes;
  // alpha = s (x + i p); s = 1/2 when x is the operator quadrature q.
  const Rational s = c == QuadratureConvention::OperatorQuadratures ? Rational(1, 2) : Rational(1);
  const Rational half_over_s = Rational(1, 2) / s;
  const GaussRational i_unit = GaussRational::i();

  std::vector<Polynomial> coefficient_images(static_cast<std::size_t>(n_vars));
  std::vector<Polynomial> derivative_images(static_cast<std::size_t>(n_vars));
  for (int k = 0; k < n_modes; ++k) {
    const Polynomial x = Polynomial::variable(2 * k);
    const Polynomial p = Polynomial::variable(2 * k + 1);
    coefficient_images[2 * k] = Polynomial(GaussRational(s)) * (x + Polynomial(i_unit) * p);
    coefficient_images[2 * k + 1] = Polynomial(GaussRational(s)) * (x - Polynomial(i_unit) * p);
    // d_alpha = (1/2s)(d_x - i d_p), d_alpha* = (1/2s)(d_x + i d_p)
    derivative_images[2 * k] =
        Polynomial(GaussRational(half_over_s)) * (x - Polynomial(i_unit) * p);
    derivative_images[2 * k + 1] =
        Polynomial(GaussRational(half_over_s)) * (x + Polynomial(i_unit) * p);
  }

  // coefficient-left operator in real variables
  DiffOperator real;
  real.n_modes = n_modes;
  for (const auto& [deriv, coeff] : d.terms) {
    const Polynomial derivative_symbol =
        Polynomial::monomial(1, deriv).substitute(derivative_images);
    const Polynomial real_coeff = coeff.substitute(coefficient_images);
    for (const auto& [e, dc] : derivative_symbol.terms()) {
      real.add(e, Polynomial(dc) * real_coeff);
    }
  }
  if (real.order() > 2) {
    for (const auto& [e, coeff] : real.terms) {
      if (total_degree(e) > 2) {
        throw OrderError(coeff.str(coordinate_names(n_modes, c)) + " × derivative of order " +
                             std::to_string(total_degree(e)),
                         total_degree(e));
      }
    }
  }

  // f d^beta Q = sum_{gamma <= beta} d^gamma [(-1)^|beta-gamma| C(beta,gamma) d^(beta-gamma) f Q]
  DiffOperator adjoint;
  adjoint.n_modes = n_modes;
  for (const auto& [beta, f] : real.terms) {
    Exponents gamma{};
    const auto visit = [&](auto&& self, int var) -> void {
      if (var == n_vars) {
        Polynomial g = f;
        std::int64_t weight = 1;
        int parity = 0;
        for (int k = 0; k < n_vars; ++k) {
          const int diff = beta[k] - gamma[k];
          if (diff > 0) g = g.derivative(k, diff);
          weight *= binomial(beta[k], gamma[k]);
          parity += diff;
        }
        if (parity % 2) weight = -weight;
        adjoint.add(gamma, Polynomial(GaussRational(weight)) * g);
        return;
      }
      for (int j = 0; j <= beta[var]; ++j) {
        gamma[var] = j;
        self(self, var + 1);
      }
      gamma[var] = 0;
    };
    visit(visit, 0);
  }

  for (const auto& [e, g] : adjoint.terms) {
    if (!g.is_real()) {
      throw NonHermitianError("generator has complex coefficients; Hamiltonian is not Hermitian");
    }
    if (total_degree(e) == 0) {
      throw std::logic_error("generator has a zeroth-order term; probability is not conserved");
    }
  }

  PhaseSpacePDE pde;
  pde.convention = c;
  pde.variables = coordinate_names(n_modes, c);
  pde.drift.assign(static_cast<std::size_t>(n_vars), Polynomial());
  pde.diffusion.assign(static_cast<std::size_t>(n_vars),
                       std::vector<Polynomial>(static_cast<std::size_t>(n_vars)));
  for (const auto& [e, g] : adjoint.terms) {
    std::vector<int> vars;
    for (int k = 0; k < n_vars; ++k) {
      for (int r = 0; r < e[k]; ++r) vars.push_back(k);
    }
    if (vars.size() == 1) {
      pde.drift[vars[0]] = -g;
    } else if (vars[0] == vars[1]) {
      pde.diffusion[vars[0]][vars[0]] = Polynomial(GaussRational(2)) * g;
    } else {
      pde.diffusion[vars[0]][vars[1]] = g;
      pde.diffusion[vars[1]][vars[0]] = g;
    }
  }
  return pde;
}

PhaseSpacePDE compile_fpe(const OperatorExpr& h, QuadratureConvention c) {
  const OperatorExpr ordered = normal_order(h);
  for (const auto& [m, coeff] : ordered.canonical_terms()) {
    const int order = std::max(m.creation_count(), m.annihilation_count());
    if (order > 2) throw OrderError(word_to_string(m.word()), order);
  }
  if (!h.is_hermitian()) {
    throw NonHermitianError("Hamiltonian '" + ordered.str() + "' is not Hermitian");
  }
  return to_phase_space_pde(commutator_action(h), c);
}

bool PhaseSpacePDE::is_zero() const {
  for (const auto& a : drift) {
    if (!a.is_zero()) return false;
  }
  for (const auto& row : diffusion) {
    for (const auto& d : row) {
      if (!d.is_zero()) return false;
    }
  }
  return true;
}

Polynomial PhaseSpacePDE::diffusion_trace() const {
  Polynomial t;
  for (std::size_t k = 0; k < diffusion.size(); ++k) t += diffusion[k][k];
  return t;
}

bool PhaseSpacePDE::has_constant_diagonal_diffusion() const {
  for (std::size_t m = 0; m < diffusion.size(); ++m) {
    for (std::size_t n = 0; n < diffusion.size(); ++n) {
      if (m != n && !diffusion[m][n].is_zero()) return false;
    }
    if (!diffusion[m][m].is_constant()) return false;
  }
  return true;
}

std::vector<double> PhaseSpacePDE::diagonal_diffusion() const {
  if (!has_constant_diagonal_diffusion()) {
    throw std::logic_error("diffusion is not diagonal and constant");
  }
  std::vector<double> d;
  for (std::size_t k = 0; k < diffusion.size(); ++k) {
    d.push_back(diffusion[k][k].constant_term().re.to_double());
  }
  return d;
}

std::vector<int> PhaseSpacePDE::sign_split() const {
  std::vector<int> s;
  for (double d : diagonal_diffusion()) s.push_back((d > 0) - (d < 0));
  return s;
}

std::size_t PhaseSpacePDE::index_of(const std::string& name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw std::out_of_range("no coordinate named '" + name + "'");
  return static_cast<std::size_t>(it - variables.begin());
}

namespace {

struct PrintTerm {
  std::string primary;
  int order;
  std::string derivative;
  Polynomial coeff;
};

std::string magnitude_text(const Rational& r) {
  return r.den() == 1 ? r.str() : "(" + r.str() + ")";
}

bool single_monomial(const Polynomial& p) { return p.terms().size() == 1; }

Rational monomial_coeff(const Polynomial& p) { return p.terms().begin()->second.re; }

std::string monomial_text(const Polynomial& p, std::span<const std::string> names) {
  const auto& e = p.terms().begin()->first;
  if (total_degree(e) == 0) return "";
  return Polynomial::monomial(1, e).str(names);
}

}  // namespace

std::string pretty_print(const PhaseSpacePDE& pde) {
  if (pde.is_zero()) return "dQ/dτ = 0";
  const auto& names = pde.variables;
  std::vector<PrintTerm> terms;
  const std::size_t n = pde.dims();
  for (std::size_t m = 0; m < n; ++m) {
    if (!pde.drift[m].is_zero()) {
      terms.push_back({names[m], 1, "∂" + names[m], -pde.drift[m]});
    }
    for (std::size_t k = m; k < n; ++k) {
      const Polynomial& d = pde.diffusion[m][k];
      if (d.is_zero()) continue;
      if (k == m) {
        terms.push_back({names[m], 2, "∂" + names[m] + "²",
                         Polynomial(GaussRational(Rational(1, 2))) * d});
      } else {
        auto lo = std::min(names[m], names[k]);
        auto hi = std::max(names[m], names[k]);
        terms.push_back({lo, 2, "∂" + lo + "∂" + hi, d});
      }
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const PrintTerm& a, const PrintTerm& b) {
    return std::tie(a.primary, a.order, a.derivative) < std::tie(b.primary, b.order, b.derivative);
  });

  // factor out a shared magnitude when every term is a single monomial
  Rational common(0);
  bool factorable = terms.size() > 1;
  for (const auto& t : terms) {
    if (!single_monomial(t.coeff)) {
      factorable = false;
      break;
    }
    const Rational mag = monomial_coeff(t.coeff).sign() < 0 ? -monomial_coeff(t.coeff)
                                                           : monomial_coeff(t.coeff);
    if (common.is_zero()) common = mag;
    else if (mag != common) factorable = false;
  }
  if (common == Rational(1)) factorable = false;

  std::string body;
  bool first = true;
  for (const auto& t : terms) {
    std::string text;
    bool negative = false;
    if (single_monomial(t.coeff)) {
      Rational c = monomial_coeff(t.coeff);
      negative = c.sign() < 0;
      if (negative) c = -c;
      if (factorable) c /= common;
      const std::string mono = monomial_text(t.coeff, names);
      text = (c == Rational(1) ? "" : magnitude_text(c)) + t.derivative +
             (mono.empty() ? "" : "·" + mono);
    } else {
      text = t.derivative + "·(" + t.coeff.str(names) + ")";
    }
    if (first) body += negative ? "−" : "";
    else body += negative ? " − " : " + ";
    body += text;
    first = false;
  }
  if (factorable) body = magnitude_text(common) + "(" + body + ")";
  return "dQ/dτ = [" + body + "] Q";
}

namespace {

nlohmann::ordered_json poly_to_json(const Polynomial& p, std::size_t n_vars) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [e, c] : p.terms()) {
    nlohmann::ordered_json t;
    t["coeff"] = c.re.str();
    if (!c.im.is_zero()) t["coeff_im"] = c.im.str();
    t["powers"] = std::vector<int>(e.begin(), e.begin() + static_cast<long>(n_vars));
    arr.push_back(std::move(t));
  }
  return arr;
}

Polynomial poly_from_json(const nlohmann::ordered_json& j) {
  Polynomial p;
  for (const auto& t : j) {
    Exponents e{};
    const auto powers = t.at("powers").get<std::vector<int>>();
    if (powers.size() > e.size()) throw std::invalid_argument("too many polynomial variables");
    std::copy(powers.begin(), powers.end(), e.begin());
    GaussRational c(Rational::parse(t.at("coeff").get<std::string>()));
    if (t.contains("coeff_im")) c.im = Rational::parse(t.at("coeff_im").get<std::string>());
    p += Polynomial::monomial(c, e);
  }
  return p;
}

}  // namespace

nlohmann::ordered_json to_json(const PhaseSpacePDE& p) {
  nlohmann::ordered_json j;
  j["convention"] = to_string(p.convention);
  j["variables"] = p.variables;
  auto drift = nlohmann::ordered_json::array();
  for (const auto& a : p.drift) drift.push_back(poly_to_json(a, p.dims()));
  j["drift"] = std::move(drift);
  auto diffusion = nlohmann::ordered_json::array();
  for (const auto& row : p.diffusion) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& d : row) r.push_back(poly_to_json(d, p.dims()));
    diffusion.push_back(std::move(r));
  }
  j["diffusion"] = std::move(diffusion);
  return j;
}

PhaseSpacePDE pde_from_json(const nlohmann::ordered_json& j) {
  PhaseSpacePDE p;
  p.convention = parse_convention(j.at("convention").get<std::string>());
  p.variables = j.at("variables").get<std::vector<std::string>>();
  for (const auto& a : j.at("drift")) p.drift.push_back(poly_from_json(a));
  for (const auto& row : j.at("diffusion")) {
    std::vector<Polynomial> r;
    for (const auto& d : row) r.push_back(poly_from_json(d));
    p.diffusion.push_back(std::move(r));
  }
  if (p.drift.size() != p.dims() || p.diffusion.size() != p.dims()) {
    throw std::invalid_argument("PDE JSON has inconsistent dimensions");
  }
  return p;
}

double evaluate_generator(const PhaseSpacePDE& pde,
                          const std::function<double(std::span<const double>)>& density,
                          std::span<const double> point, double h) {
  const std::size_t n = pde.dims();
  std::vector<double> x(point.begin(), point.end());
  const auto product = [&](const Polynomial& c, std::span<const double> at) {
    return c.evaluate(at).real() * density(at);
  };
  const auto first = [&](std::size_t mu, const Polynomial& c, double step) {
    std::vector<double> y = x;
    y[mu] += step;
    const double fp = product(c, y);
    y[mu] -= 2 * step;
    const double fm = product(c, y);
    return (fp - fm) / (2 * step);
  };
  const auto second = [&](std::size_t mu, std::size_t nu, const Polynomial& c, double step) {
    std::vector<double> y = x;
    if (mu == nu) {
      const double f0 = product(c, y);
      y[mu] += step;
      const double fp = product(c, y);
      y[mu] -= 2 * step;
      const double fm = product(c, y);
      return (fp - 2 * f0 + fm) / (step * step);
    }
    double sum = 0.0;
    for (int sa : {1, -1}) {
      for (int sb : {1, -1}) {
        y = x;
        y[mu] += sa * step;
        y[nu] += sb * step;
        sum += sa * sb * product(c, y);
      }
    }
    return sum / (4 * step * step);
  };
  const auto rhs = [&](double step) {
    double total = 0.0;
    for (std::size_t mu = 0; mu < n; ++mu) {
      if (!pde.drift[mu].is_zero()) total -= first(mu, pde.drift[mu], step);
      for (std::size_t nu = 0; nu < n; ++nu) {
        if (!pde.diffusion[mu][nu].is_zero()) total += 0.5 * second(mu, nu, pde.diffusion[mu][nu], step);
      }
    }
    return total;
  };
  return (4.0 * rhs(0.5 * h) - rhs(h)) / 3.0;
}

}  // namespace qflow
