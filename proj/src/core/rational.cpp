#include "blochlab/core/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::size_t pos) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw ParseError("rational overflows 64 bits", pos);
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, std::size_t pos) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw ParseError("rational overflows 64 bits", pos);
  return out;
}

// Parses an optionally signed decimal, returning it as num/den.
std::pair<std::int64_t, std::int64_t> parse_decimal(std::string_view s, std::size_t offset) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool digits = false;
  bool fraction = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !fraction) {
      fraction = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("unexpected character in number", offset + i);
    digits = true;
    num = checked_add(checked_mul(num, 10, offset + i), c - '0', offset + i);
    if (fraction) den = checked_mul(den, 10, offset + i);
  }
  if (!digits) throw ParseError("expected a number", offset);
  return {negative ? -num : num, den};
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto [n, d] = parse_decimal(text, 0);
    return Rational(n, d);
  }
  auto [pn, pd] = parse_decimal(text.substr(0, slash), 0);
  auto [qn, qd] = parse_decimal(text.substr(slash + 1), slash + 1);
  if (qn == 0) throw ParseError("zero denominator", slash + 1);
  // (pn/pd) / (qn/qd)
  return Rational(checked_mul(pn, qd, 0), checked_mul(pd, qn, slash + 1));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

}  // namespace blochlab::core
