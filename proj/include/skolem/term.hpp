#pragma once

#include <gmpxx.h>

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skolem/errors.hpp"

// Skolem terms: the closure of {1, x} under +, * and f^g. Natural-number
// literals are grammar sugar for 1+...+1; the AST itself has five node
// kinds. Size of a term is its number of leaf atoms.

namespace skolem::term {

enum class K { One, X, Add, Mul, Pow };

struct Node;
using TermPtr = std::shared_ptr<const Node>;

struct Node {
  K kind;
  TermPtr a, b;
};

inline TermPtr one() {
  static const TermPtr t = std::make_shared<Node>(Node{K::One, nullptr, nullptr});
  return t;
}
inline TermPtr x() {
  static const TermPtr t = std::make_shared<Node>(Node{K::X, nullptr, nullptr});
  return t;
}
inline TermPtr add(TermPtr a, TermPtr b) {
  return std::make_shared<Node>(Node{K::Add, std::move(a), std::move(b)});
}
inline TermPtr mul(TermPtr a, TermPtr b) {
  return std::make_shared<Node>(Node{K::Mul, std::move(a), std::move(b)});
}
inline TermPtr pw(TermPtr a, TermPtr b) {
  return std::make_shared<Node>(Node{K::Pow, std::move(a), std::move(b)});
}

// n >= 1 as a left chain of additions of 1.
inline TermPtr nat(const mpz_class& n) {
  if (n < 1) throw precondition_error("numerals in Sk start at 1");
  TermPtr t = one();
  for (mpz_class i = 1; i < n; ++i) t = add(t, one());
  return t;
}
inline TermPtr nat(long n) { return nat(mpz_class(n)); }

inline std::size_t size(const TermPtr& t) {
  switch (t->kind) {
    case K::One:
    case K::X: return 1;
    default: return size(t->a) + size(t->b);
  }
}

// The numeral denoted by a variable-free term, if it stays within the
// resource bound (numeral towers can be astronomically large).
inline std::optional<mpz_class> semantic_nat(const TermPtr& t) {
  switch (t->kind) {
    case K::One: return mpz_class(1);
    case K::X: return std::nullopt;
    case K::Add: {
      auto a = semantic_nat(t->a), b = semantic_nat(t->b);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case K::Mul: {
      auto a = semantic_nat(t->a), b = semantic_nat(t->b);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    case K::Pow: {
      auto a = semantic_nat(t->a), b = semantic_nat(t->b);
      if (!a || !b) return std::nullopt;
      if (*a == 1) return mpz_class(1);
      if (!b->fits_ulong_p() ||
          mpz_sizeinbase(a->get_mpz_t(), 2) * b->get_ui() > (1u << 20))
        return std::nullopt;  // value exists but is out of numeral range
      mpz_class r;
      mpz_pow_ui(r.get_mpz_t(), a->get_mpz_t(), b->get_ui());
      return r;
    }
  }
  return std::nullopt;
}

// ---- text form ---------------------------------------------------------
// expr := sum ; sum := prod ('+' prod)* ; prod := pow ('*' pow)*
// pow := atom ['^' pow]  (right associative) ; atom := 'x' | nat | '(' expr ')'

namespace detail {

enum Prec { PSum = 0, PProd = 1, PPow = 2, PAtom = 3 };

inline std::string fmt(const TermPtr& t, int ctx) {
  // numeral-valued subtrees print as literals
  if (t->kind != K::X) {
    if (auto n = semantic_nat(t); n && (t->kind == K::One || *n > 1)) return n->get_str();
  }
  switch (t->kind) {
    case K::One: return "1";
    case K::X: return "x";
    case K::Add: {
      std::string s = fmt(t->a, PSum) + " + " + fmt(t->b, PProd);
      return ctx > PSum ? "(" + s + ")" : s;
    }
    case K::Mul: {
      std::string s = fmt(t->a, PProd) + "*" + fmt(t->b, PPow);
      return ctx > PProd ? "(" + s + ")" : s;
    }
    case K::Pow: {
      std::string s = fmt(t->a, PAtom) + "^" + fmt(t->b, PPow);
      return ctx > PPow ? "(" + s + ")" : s;
    }
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}
  TermPtr parse() {
    TermPtr t = sum();
    skip_ws();
    if (pos_ != s_.size()) throw parse_error("unexpected trailing input", pos_);
    return t;
  }

 private:
  TermPtr sum() {
    TermPtr t = prod();
    while (peek() == '+') { ++pos_; t = add(t, prod()); }
    return t;
  }
  TermPtr prod() {
    TermPtr t = powt();
    while (peek() == '*') { ++pos_; t = mul(t, powt()); }
    return t;
  }
  TermPtr powt() {
    TermPtr t = atom();
    if (peek() == '^') { ++pos_; return pw(t, powt()); }
    return t;
  }
  TermPtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      TermPtr t = sum();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ')') throw parse_error("expected ')'", pos_);
      ++pos_;
      return t;
    }
    if (c == 'x') { ++pos_; return x(); }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class n(std::string(s_.substr(start, pos_ - start)));
      if (n < 1) throw parse_error("numerals start at 1", start);
      return nat(n);
    }
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string format(const TermPtr& t) { return detail::fmt(t, detail::PSum); }
inline TermPtr parse(std::string_view text) { return detail::Parser(text).parse(); }

// Canonical key; numeral-equal subtrees share keys, which is harmless since
// they denote the same function.
inline const std::string key(const TermPtr& t) { return format(t); }

}  // namespace skolem::term
