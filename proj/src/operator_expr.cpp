#include "qflow/operator_expr.hpp"

#include <algorithm>
#include <tuple>

namespace qflow {

int NormalMonomial::degree() const { return creation_count() + annihilation_count(); }

int NormalMonomial::creation_count() const {
  int n = 0;
  for (int c : create) n += c;
  return n;
}

int NormalMonomial::annihilation_count() const {
  int n = 0;
  for (int c : annihilate) n += c;
  return n;
}

Word NormalMonomial::word() const {
  Word w;
  for (int k = 0; k < kMaxModes; ++k) {
    for (int i = 0; i < create[k]; ++i) w.push_back({k, true});
  }
  for (int k = 0; k < kMaxModes; ++k) {
    for (int i = 0; i < annihilate[k]; ++i) w.push_back({k, false});
  }
  return w;
}

bool MonomialOrder::operator()(const NormalMonomial& a, const NormalMonomial& b) const {
  if (a.degree() != b.degree()) return a.degree() > b.degree();
  return std::tie(a.create, a.annihilate) > std::tie(b.create, b.annihilate);
}

std::string mode_name(int mode) {
  if (mode < 0 || mode >= kMaxModes) throw std::out_of_range("mode index out of range");
  return std::string(1, static_cast<char>('a' + mode));
}

std::string word_to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += "*";
    out += mode_name(w[i].mode) + (w[i].dagger ? "dag" : "");
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

OperatorExpr::OperatorExpr(std::vector<OperatorTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    for (const auto& op : t.word) {
      if (op.mode < 0 || op.mode >= kMaxModes) {
        throw std::invalid_argument("operator mode index out of range");
      }
    }
  }
}

OperatorExpr OperatorExpr::scalar(GaussRational c) { return OperatorExpr({{c, {}}}); }
OperatorExpr OperatorExpr::annihilation(int mode) { return OperatorExpr(std::vector<OperatorTerm>{{GaussRational(1), Word{{mode, false}}}}); }
OperatorExpr OperatorExpr::creation(int mode) { return OperatorExpr(std::vector<OperatorTerm>{{GaussRational(1), Word{{mode, true}}}}); }

OperatorExpr OperatorExpr::monomial(GaussRational c, const NormalMonomial& m) {
  return OperatorExpr({{c, m.word()}});
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) {
  for (const auto& t : o.terms_) terms_.push_back({-t.coeff, t.word});
  return *this;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  std::vector<OperatorTerm> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Word w = ta.word;
      w.insert(w.end(), tb.word.begin(), tb.word.end());
      out.push_back({ta.coeff * tb.coeff, std::move(w)});
    }
  }
  return OperatorExpr(std::move(out));
}

OperatorExpr operator*(const GaussRational& c, const OperatorExpr& e) {
  return OperatorExpr::scalar(c) * e;
}

OperatorExpr OperatorExpr::adjoint() const {
  std::vector<OperatorTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Word w(t.word.rbegin(), t.word.rend());
    for (auto& op : w) op.dagger = !op.dagger;
    out.push_back({t.coeff.conj(), std::move(w)});
  }
  return OperatorExpr(std::move(out));
}

int OperatorExpr::max_mode() const {
  int m = -1;
  for (const auto& t : terms_) {
    for (const auto& op : t.word) m = std::max(m, op.mode);
  }
  return m;
}

bool OperatorExpr::is_normal_ordered() const {
  for (const auto& t : terms_) {
    bool seen_annihilation = false;
    for (const auto& op : t.word) {
      if (!op.dagger) seen_annihilation = true;
      else if (seen_annihilation) return false;
    }
  }
  return true;
}

namespace {

NormalMonomial monomial_of(const Word& w) {
  NormalMonomial m;
  for (const auto& op : w) (op.dagger ? m.create : m.annihilate)[op.mode] += 1;
  return m;
}

using TermMap = std::map<NormalMonomial, GaussRational, MonomialOrder>;

void accumulate(TermMap& map, const NormalMonomial& m, const GaussRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = map.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) map.erase(it);
  }
}

// (adag^m a^n) * op, re-normal-ordered.
void multiply_right(TermMap& out, const NormalMonomial& m, const GaussRational& c,
                    const BosonOp& op) {
  NormalMonomial next = m;
  if (!op.dagger) {
    next.annihilate[op.mode] += 1;
    accumulate(out, next, c);
    return;
  }
  // a^n adag = adag a^n + n a^(n-1)
  next.create[op.mode] += 1;
  accumulate(out, next, c);
  const int n = m.annihilate[op.mode];
  if (n > 0) {
    NormalMonomial contracted = m;
    contracted.annihilate[op.mode] -= 1;
    accumulate(out, contracted, c * GaussRational(n));
  }
}

std::string coefficient_prefix(const GaussRational& c, bool first, bool has_word) {
  // sign is pulled out for purely real or purely imaginary coefficients
  GaussRational mag = c;
  bool negative = false;
  if (c.is_real() && c.re.sign() < 0) {
    negative = true;
    mag = -c;
  } else if (c.re.is_zero() && c.im.sign() < 0) {
    negative = true;
    mag = -c;
  }
  std::string out;
  if (first) out = negative ? "-" : "";
  else out = negative ? " - " : " + ";
  if (mag == GaussRational(1)) return has_word ? out : out + "1";
  return out + mag.str() + (has_word ? "*" : "");
}

}  // namespace

TermMap OperatorExpr::canonical_terms() const {
  TermMap map;
  for (const auto& t : terms_) accumulate(map, monomial_of(t.word), t.coeff);
  return map;
}

OperatorExpr normal_order(const OperatorExpr& e) {
  TermMap total;
  for (const auto& t : e.terms()) {
    TermMap current;
    accumulate(current, NormalMonomial{}, t.coeff);
    for (const auto& op : t.word) {
      TermMap next;
      for (const auto& [m, c] : current) multiply_right(next, m, c, op);
      current = std::move(next);
    }
    for (const auto& [m, c] : current) accumulate(total, m, c);
  }
  std::vector<OperatorTerm> terms;
  terms.reserve(total.size());
  for (const auto& [m, c] : total) terms.push_back({c, m.word()});
  return OperatorExpr(std::move(terms));
}

bool OperatorExpr::is_hermitian() const {
  return normal_order(*this - adjoint()).empty();
}

std::string OperatorExpr::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    out += coefficient_prefix(t.coeff, first, !t.word.empty()) + word_to_string(t.word);
    first = false;
  }
  return out;
}

}  // namespace qflow
