#pragma once

// Compiles a polynomial bosonic Hamiltonian into the generalized
// Fokker-Planck equation obeyed by its Q-function.
//
// Pipeline: OperatorExpr --commutator_action--> DiffOperator (complex
// variables alpha_k, alpha_k*) --to_phase_space_pde--> PhaseSpacePDE (real
// coordinates, adjoint drift/diffusion form).

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflow/operator_expr.hpp"
#include "qflow/phase_space.hpp"
#include "qflow/polynomial.hpp"

namespace qflow {

/// Raised when a term would produce derivatives above second order.
struct OrderError : std::runtime_error {
  OrderError(const std::string& term, int order);
  std::string term;
  int order;
};

struct NonHermitianError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sum of coeff(vars) * d^index acting on Q, coefficients to the left of
/// the derivatives. In the complex form variable 2k is alpha_k and 2k+1 is
/// alpha_k*; in the real form 2k is the k-th in-phase quadrature and 2k+1
/// the conjugate one.
struct DiffOperator {
  int n_modes = 1;
  std::map<Exponents, Polynomial> terms;

  bool is_zero() const { return terms.empty(); }
  int order() const;
  void add(const Exponents& derivative, const Polynomial& coeff);
  friend bool operator==(const DiffOperator&, const DiffOperator&) = default;
};

/// The generator of i[H, Lambda] in terms of the coherent-state identities
///   adag L = (d_alpha + alpha*) L,   a L = alpha L,
///   L a = (d_alpha* + alpha) L,      L adag = alpha* L.
DiffOperator commutator_action(const OperatorExpr& h);

/// dQ/dtau = d_mu[-A^mu + 1/2 d_nu D^{mu nu}] Q with real polynomial
/// coefficients. Coordinates are ordered (q1, p1, q2, p2, ...).
struct PhaseSpacePDE {
  QuadratureConvention convention = QuadratureConvention::OperatorQuadratures;
  std::vector<std::string> variables;
  std::vector<Polynomial> drift;
  std::vector<std::vector<Polynomial>> diffusion;

  std::size_t dims() const { return variables.size(); }
  bool is_zero() const;
  Polynomial diffusion_trace() const;
  bool has_constant_diagonal_diffusion() const;
  /// Throws std::logic_error unless diffusion is diagonal and constant.
  std::vector<double> diagonal_diffusion() const;
  /// +1 forward (D > 0), -1 backward (D < 0), 0 drift-only.
  std::vector<int> sign_split() const;
  std::size_t index_of(const std::string& name) const;

  friend bool operator==(const PhaseSpacePDE&, const PhaseSpacePDE&) = default;
};

std::vector<std::string> coordinate_names(int n_modes, QuadratureConvention c);

PhaseSpacePDE to_phase_space_pde(const DiffOperator& d, QuadratureConvention c);

/// Validates Hermiticity and per-term derivative order, then runs the full
/// pipeline. The OrderError names the offending Hamiltonian term.
PhaseSpacePDE compile_fpe(const OperatorExpr& h, QuadratureConvention c);

/// Canonical text: "dQ/dτ = [∂p·p + ∂p² − ∂q·q − ∂q²] Q".
/// Terms are grouped by their first coordinate name (lexicographic), then by
/// derivative order.
std::string pretty_print(const PhaseSpacePDE& p);

nlohmann::ordered_json to_json(const PhaseSpacePDE& p);
PhaseSpacePDE pde_from_json(const nlohmann::ordered_json& j);

/// Right-hand side of the PDE applied to a callable density at one point,
/// using Richardson-extrapolated central differences of step h.
double evaluate_generator(const PhaseSpacePDE& pde,
                          const std::function<double(std::span<const double>)>& density,
                          std::span<const double> point, double h = 1e-2);

}  // namespace qflow
