#include "blochlab/core/expression.hpp"

#include <cctype>
#include <string>

#include "blochlab/core/errors.hpp"
#include "blochlab/core/interval_traits.hpp"

namespace blochlab::core {
namespace {

template <class I>
class Parser {
 public:
  Parser(std::string_view text, long precision) : text_(text), precision_(precision) {}

  I parse() {
    I value = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return value;
  }

 private:
  using Traits = IntervalTraits<I>;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  I expr() {
    I acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  I term() {
    I acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        acc = acc / unary();
      } else {
        return acc;
      }
    }
  }

  I unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // Right-associative; an integer literal exponent stays exact.
  I power() {
    I base = primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t save = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    const bool integer_literal = end > pos_ && end - pos_ < 9 &&
                                 (end == text_.size() || (text_[end] != '.' && text_[end] != '^'));
    if (integer_literal) {
      const int n = std::stoi(std::string(text_.substr(pos_, end - pos_)));
      pos_ = end;
      return pow(base, negative ? -n : n);
    }
    pos_ = save;
    return pow(base, unary());
  }

  I primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      I inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "pi") return Traits::pi(precision_);
      if (name == "e") return Traits::e(precision_);
      if (name == "sqrt" || name == "exp" || name == "log") {
        expect('(');
        I arg = expr();
        expect(')');
        if (name == "sqrt") return sqrt(arg);
        if (name == "exp") return exp(arg);
        return log(arg);
      }
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  I number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    try {
      return Traits::rational(Rational::parse(text_.substr(start, pos_ - start)), precision_);
    } catch (const ParseError& err) {
      throw ParseError("bad number literal", start);
    }
  }

  std::string_view text_;
  long precision_;
  std::size_t pos_ = 0;
};

}  // namespace

Interval interval_eval(std::string_view expression, long precision) {
  if (precision <= kNativePrecision) return Parser<Interval>(expression, precision).parse();
  return Parser<MpInterval>(expression, precision).parse().to_interval();
}

}  // namespace blochlab::core
