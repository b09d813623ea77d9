#include "blochlab/core/mp_interval.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {
namespace {

std::string render(const mpfr_t x, int digits, mpfr_rnd_t rnd) {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*R*g", digits, rnd, x);
  return buf.data();
}

}  // namespace

MpInterval::MpInterval(long precision) : precision_(std::max<long>(precision, MPFR_PREC_MIN)) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

MpInterval::MpInterval(double point, long precision) : MpInterval(precision) {
  if (!std::isfinite(point)) throw DomainError("interval endpoint must be finite");
  mpfr_set_d(lo_, point, MPFR_RNDD);
  mpfr_set_d(hi_, point, MPFR_RNDU);
}

MpInterval::MpInterval(const MpInterval& other) : MpInterval(other.precision_) {
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

MpInterval::MpInterval(MpInterval&& other) noexcept : MpInterval(other.precision_) {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

MpInterval& MpInterval::operator=(const MpInterval& other) {
  if (this != &other) {
    reset_precision(other.precision_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

MpInterval& MpInterval::operator=(MpInterval&& other) noexcept {
  if (this != &other) {
    std::swap(precision_, other.precision_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
  }
  return *this;
}

MpInterval::~MpInterval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void MpInterval::reset_precision(long precision) {
  if (precision == precision_) return;
  precision_ = precision;
  mpfr_set_prec(lo_, precision_);
  mpfr_set_prec(hi_, precision_);
}

MpInterval MpInterval::from_rational(const Rational& q, long precision) {
  MpInterval out(precision);
  mpfr_set_si(out.lo_, q.num(), MPFR_RNDD);
  mpfr_div_si(out.lo_, out.lo_, q.den(), MPFR_RNDD);
  mpfr_set_si(out.hi_, q.num(), MPFR_RNDU);
  mpfr_div_si(out.hi_, out.hi_, q.den(), MPFR_RNDU);
  return out;
}

MpInterval MpInterval::pi(long precision) {
  MpInterval out(precision);
  mpfr_const_pi(out.lo_, MPFR_RNDD);
  mpfr_const_pi(out.hi_, MPFR_RNDU);
  return out;
}

MpInterval MpInterval::e(long precision) {
  return exp(MpInterval(1.0, precision));
}

Interval MpInterval::to_interval() const { return Interval(lo_down(), hi_up()); }

double MpInterval::lo_down() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double MpInterval::hi_up() const { return mpfr_get_d(hi_, MPFR_RNDU); }
bool MpInterval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool MpInterval::positive() const { return mpfr_sgn(lo_) > 0; }

std::string MpInterval::lo_string(int digits) const { return render(lo_, digits, MPFR_RNDD); }
std::string MpInterval::hi_string(int digits) const { return render(hi_, digits, MPFR_RNDU); }

MpInterval& MpInterval::operator+=(const MpInterval& o) {
  MpInterval out(std::max(precision_, o.precision_));
  mpfr_add(out.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(out.hi_, hi_, o.hi_, MPFR_RNDU);
  return *this = std::move(out);
}

MpInterval& MpInterval::operator-=(const MpInterval& o) {
  const long prec = std::max(precision_, o.precision_);
  MpInterval out(prec);
  mpfr_sub(out.lo_, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(out.hi_, hi_, o.lo_, MPFR_RNDU);
  return *this = std::move(out);
}

MpInterval& MpInterval::operator*=(const MpInterval& o) {
  const long prec = std::max(precision_, o.precision_);
  MpInterval out(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  bool first = true;
  for (const auto* a : {&lo_, &hi_}) {
    for (const auto* b : {&o.lo_, &o.hi_}) {
      mpfr_mul(t, *a, *b, MPFR_RNDD);
      if (first || mpfr_less_p(t, out.lo_)) mpfr_set(out.lo_, t, MPFR_RNDD);
      mpfr_mul(t, *a, *b, MPFR_RNDU);
      if (first || mpfr_greater_p(t, out.hi_)) mpfr_set(out.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return *this = std::move(out);
}

MpInterval& MpInterval::operator/=(const MpInterval& o) {
  if (o.contains_zero()) throw DomainError("interval division by an interval containing 0");
  const long prec = std::max(precision_, o.precision_);
  MpInterval out(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  bool first = true;
  for (const auto* a : {&lo_, &hi_}) {
    for (const auto* b : {&o.lo_, &o.hi_}) {
      mpfr_div(t, *a, *b, MPFR_RNDD);
      if (first || mpfr_less_p(t, out.lo_)) mpfr_set(out.lo_, t, MPFR_RNDD);
      mpfr_div(t, *a, *b, MPFR_RNDU);
      if (first || mpfr_greater_p(t, out.hi_)) mpfr_set(out.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return *this = std::move(out);
}

MpInterval operator-(const MpInterval& a) {
  MpInterval out(a.precision_);
  mpfr_neg(out.lo_, a.hi_, MPFR_RNDD);
  mpfr_neg(out.hi_, a.lo_, MPFR_RNDU);
  return out;
}

MpInterval abs(const MpInterval& x) {
  if (mpfr_sgn(x.lo_) >= 0) return x;
  if (mpfr_sgn(x.hi_) <= 0) return -x;
  MpInterval out(x.precision_);
  mpfr_set_zero(out.lo_, 1);
  if (mpfr_cmpabs(x.lo_, x.hi_) > 0) {
    mpfr_neg(out.hi_, x.lo_, MPFR_RNDU);
  } else {
    mpfr_set(out.hi_, x.hi_, MPFR_RNDU);
  }
  return out;
}

MpInterval sqr(const MpInterval& x) {
  const MpInterval m = abs(x);
  MpInterval out(x.precision_);
  mpfr_sqr(out.lo_, m.lo_, MPFR_RNDD);
  mpfr_sqr(out.hi_, m.hi_, MPFR_RNDU);
  return out;
}

MpInterval sqrt(const MpInterval& x) {
  if (mpfr_sgn(x.lo_) < 0) throw DomainError("interval sqrt of a negative value");
  MpInterval out(x.precision_);
  mpfr_sqrt(out.lo_, x.lo_, MPFR_RNDD);
  mpfr_sqrt(out.hi_, x.hi_, MPFR_RNDU);
  return out;
}

MpInterval exp(const MpInterval& x) {
  MpInterval out(x.precision_);
  mpfr_exp(out.lo_, x.lo_, MPFR_RNDD);
  mpfr_exp(out.hi_, x.hi_, MPFR_RNDU);
  return out;
}

MpInterval log(const MpInterval& x) {
  if (mpfr_sgn(x.lo_) <= 0) throw DomainError("interval log of a non-positive value");
  MpInterval out(x.precision_);
  mpfr_log(out.lo_, x.lo_, MPFR_RNDD);
  mpfr_log(out.hi_, x.hi_, MPFR_RNDU);
  return out;
}

MpInterval pow(const MpInterval& x, int n) {
  if (n == 0) return MpInterval(1.0, x.precision_);
  if (n < 0) return MpInterval(1.0, x.precision_) / pow(x, -n);
  MpInterval out(x.precision_);
  if (n % 2 == 0) {
    const MpInterval m = abs(x);
    mpfr_pow_ui(out.lo_, m.lo_, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_pow_ui(out.hi_, m.hi_, static_cast<unsigned long>(n), MPFR_RNDU);
  } else {
    mpfr_pow_ui(out.lo_, x.lo_, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_pow_ui(out.hi_, x.hi_, static_cast<unsigned long>(n), MPFR_RNDU);
  }
  return out;
}

MpInterval pow(const MpInterval& x, const MpInterval& y) {
  if (mpfr_sgn(x.lo_) <= 0) throw DomainError("interval power needs a positive base");
  return exp(y * log(x));
}

MpInterval hull(const MpInterval& a, const MpInterval& b) {
  MpInterval out(std::max(a.precision_, b.precision_));
  mpfr_min(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

MpInterval intersect(const MpInterval& a, const MpInterval& b) {
  MpInterval out(std::max(a.precision_, b.precision_));
  mpfr_max(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_min(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  if (mpfr_greater_p(out.lo_, out.hi_)) throw DomainError("intersection of disjoint intervals");
  return out;
}

MpInterval max(const MpInterval& a, const MpInterval& b) {
  MpInterval out(std::max(a.precision_, b.precision_));
  mpfr_max(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

MpInterval min(const MpInterval& a, const MpInterval& b) {
  MpInterval out(std::max(a.precision_, b.precision_));
  mpfr_min(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_min(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

}  // namespace blochlab::core
