#pragma once

// Polynomials in bosonic creation/annihilation operators with exact
// Gaussian-rational coefficients.

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qflow/rational.hpp"

namespace qflow {

/// Modes are indexed 0 ('a') and 1 ('b').
inline constexpr int kMaxModes = 2;

struct BosonOp {
  int mode = 0;
  bool dagger = false;
  friend bool operator==(const BosonOp&, const BosonOp&) = default;
};

using Word = std::vector<BosonOp>;

/// Normal-ordered monomial: prod_k adag_k^create[k] * prod_k a_k^annihilate[k].
struct NormalMonomial {
  std::array<int, kMaxModes> create{};
  std::array<int, kMaxModes> annihilate{};

  int degree() const;
  int creation_count() const;
  int annihilation_count() const;
  NormalMonomial adjoint() const { return {annihilate, create}; }
  Word word() const;

  friend bool operator==(const NormalMonomial&, const NormalMonomial&) = default;
};

/// Canonical term order: higher total degree first, then lexicographic on
/// (create, annihilate) descending.
struct MonomialOrder {
  bool operator()(const NormalMonomial& a, const NormalMonomial& b) const;
};

struct OperatorTerm {
  GaussRational coeff;
  Word word;
};

std::string mode_name(int mode);
std::string word_to_string(const Word& w);

class OperatorExpr {
 public:
  OperatorExpr() = default;
  explicit OperatorExpr(std::vector<OperatorTerm> terms);

  static OperatorExpr scalar(GaussRational c);
  static OperatorExpr annihilation(int mode);
  static OperatorExpr creation(int mode);
  static OperatorExpr monomial(GaussRational c, const NormalMonomial& m);

  const std::vector<OperatorTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  OperatorExpr& operator+=(const OperatorExpr& o);
  OperatorExpr& operator-=(const OperatorExpr& o);
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator*(const GaussRational& c, const OperatorExpr& e);

  OperatorExpr adjoint() const;

  /// Highest mode index used, or -1 for a scalar expression.
  int max_mode() const;

  bool is_normal_ordered() const;

  /// Terms in canonical order with zero coefficients dropped; only
  /// meaningful after normal ordering.
  std::map<NormalMonomial, GaussRational, MonomialOrder> canonical_terms() const;

  bool is_hermitian() const;

  std::string str() const;

 private:
  std::vector<OperatorTerm> terms_;
};

/// Rewrites every word into normal order using [a_j, adag_k] = delta_jk.
/// The result is canonical, so normal_order is idempotent.
OperatorExpr normal_order(const OperatorExpr& e);

struct ParseError : std::runtime_error {
  ParseError(std::size_t offset_, const std::string& message);
  std::size_t offset;
};

/// Parses the textual Hamiltonian grammar, e.g. "0.5i*adag^2 - 0.5i*a^2".
///
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := number ['/' integer] ['i'] | 'i' | op ['^' integer] | '(' expr ')'
///   op     := 'a' | 'adag' | 'b' | 'bdag'
///
/// Whitespace is ignored. Operator words keep the order written.
OperatorExpr parse_hamiltonian(std::string_view text);

}  // namespace qflow
