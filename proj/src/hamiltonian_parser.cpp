#include <cctype>

#include "qflow/operator_expr.hpp"

namespace qflow {

ParseError::ParseError(std::size_t offset_, const std::string& message)
    : std::runtime_error("parse error at byte " + std::to_string(offset_) + ": " + message),
      offset(offset_) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  OperatorExpr parse() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty expression");
    OperatorExpr e = expr();
    skip_ws();
    if (!at_end()) throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  OperatorExpr expr() {
    OperatorExpr out;
    skip_ws();
    bool negative = false;
    if (peek() == '+' || peek() == '-') negative = text_[pos_++] == '-';
    out = signed_term(negative);
    for (;;) {
      skip_ws();
      if (peek() != '+' && peek() != '-') break;
      negative = text_[pos_++] == '-';
      out += signed_term(negative);
    }
    return out;
  }

  OperatorExpr signed_term(bool negative) {
    OperatorExpr t = term();
    return negative ? GaussRational(-1) * t : t;
  }

  OperatorExpr term() {
    OperatorExpr t = factor();
    while (accept('*')) t = t * factor();
    return t;
  }

  OperatorExpr factor() {
    skip_ws();
    const std::size_t start = pos_;
    const char c = peek();
    if (at_end()) throw ParseError(pos_, "expected a factor, found end of input");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      OperatorExpr inner = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string_view ident = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (ident == "i") return OperatorExpr::scalar(GaussRational::i());
      BosonOp op;
      if (ident == "a" || ident == "adag") op = {0, ident == "adag"};
      else if (ident == "b" || ident == "bdag") op = {1, ident == "bdag"};
      else throw ParseError(start, "unknown symbol '" + std::string(ident) + "'");
      int power = 1;
      if (accept('^')) power = integer("exponent");
      if (power < 0) throw ParseError(start, "negative exponent");
      return OperatorExpr({{1, Word(static_cast<std::size_t>(power), op)}});
    }
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  int integer(const char* what) {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw ParseError(start, std::string("expected integer ") + what);
    const std::string digits(text_.substr(start, pos_ - start));
    if (digits.size() > 9) throw ParseError(start, std::string(what) + " too large");
    return std::stoi(digits);
  }

  OperatorExpr number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    Rational value;
    try {
      value = Rational::parse(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::exception& e) {
      throw ParseError(start, std::string("bad number: ") + e.what());
    }
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      const int den = integer("denominator");
      if (den == 0) throw ParseError(pos_, "zero denominator");
      value /= Rational(den);
    }
    skip_ws();
    // "0.5i" but not the start of an identifier such as "ia"
    if (peek() == 'i' && (pos_ + 1 >= text_.size() ||
                          !std::isalpha(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      return OperatorExpr::scalar(GaussRational(Rational(0), value));
    }
    return OperatorExpr::scalar(GaussRational(value));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

OperatorExpr parse_hamiltonian(std::string_view text) { return Parser(text).parse(); }

}  // namespace qflow
