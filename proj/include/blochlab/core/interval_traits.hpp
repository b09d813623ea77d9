#pragma once

#include "blochlab/core/interval.hpp"
#include "blochlab/core/mp_interval.hpp"

namespace blochlab::core {

/// Uniform construction of constants for code generic over the interval type.
template <class I>
struct IntervalTraits;

template <>
struct IntervalTraits<Interval> {
  static Interval rational(const Rational& q, long /*precision*/) { return Interval::from_rational(q); }
  static Interval pi(long /*precision*/) { return Interval::pi(); }
  static Interval e(long /*precision*/) { return Interval::e(); }
  static Interval to_interval(const Interval& x) { return x; }
};

template <>
struct IntervalTraits<MpInterval> {
  static MpInterval rational(const Rational& q, long precision) { return MpInterval::from_rational(q, precision); }
  static MpInterval pi(long precision) { return MpInterval::pi(precision); }
  static MpInterval e(long precision) { return MpInterval::e(precision); }
  static Interval to_interval(const MpInterval& x) { return x.to_interval(); }
};

/// Precision (mantissa bits) at which the native double interval is used.
inline constexpr long kNativePrecision = 53;

}  // namespace blochlab::core
