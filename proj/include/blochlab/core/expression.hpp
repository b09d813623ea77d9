#pragma once

#include <string_view>

#include "blochlab/core/interval.hpp"

namespace blochlab::core {

/// Evaluates an arithmetic expression to a rigorous enclosure.
///
/// Grammar: numbers (exact decimals or integers), the constants `pi` and `e`,
/// binary `+ - * / ^`, unary minus, parentheses, and `sqrt`, `exp`, `log`.
/// An integer literal exponent uses repeated multiplication; any other
/// exponent goes through exp(y log x). Precision is in mantissa bits; 53 uses
/// the native double interval, anything larger evaluates with MPFR and is
/// rounded outward to doubles at the end.
///
/// Throws ParseError on malformed input and DomainError on division by an
/// interval containing zero or log/sqrt outside their domains.
Interval interval_eval(std::string_view expression, long precision = 53);

}  // namespace blochlab::core
