#include "blochlab/bloch/functions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "blochlab/core/errors.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/core/parallel.hpp"

namespace blochlab::bloch {

using core::Domain;

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr int kSpecialSeriesOrder = 31;

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double binom2(int m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); }

}  // namespace

double special_q0(double a) { return 1.5 * kSqrt3 * a * (1.0 - a * a); }

double special_q1(double a) { return 1.5 * kSqrt3 * (1.0 - a * a) * (1.0 - 3.0 * a * a); }

std::vector<Complex> special_coefficients(double a, int K) {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("special function needs 0 <= a < 1");
  if (K < 0) throw DomainError("truncation order must be >= 0");
  // b' = (3/2) sqrt(3) (1 - a^2) (z + a) / (1 + a z)^3 and
  // 1/(1 + a z)^3 = sum C(m+2, 2) (-a)^m z^m.
  std::vector<Complex> q(static_cast<std::size_t>(K) + 1);
  const double c = 1.5 * kSqrt3 * (1.0 - a * a);
  double power = 1.0;  // (-a)^k
  double prev = 0.0;   // (-a)^(k-1)
  for (int k = 0; k <= K; ++k) {
    const double from_a = a * binom2(k + 2) * power;
    const double from_z = k >= 1 ? binom2(k + 1) * prev : 0.0;
    q[static_cast<std::size_t>(k)] = c * (from_a + from_z);
    prev = power;
    power *= -a;
  }
  return q;
}

BlochFunction make_special(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("special function needs 0 <= a < 1");
  const double c = 0.75 * kSqrt3;
  BlochFunction b(
      [a, c](Complex z) {
        const Complex s = (z + a) / (1.0 + a * z);
        return c * s * s;
      },
      [a, c](Complex z) {
        const Complex d = 1.0 + a * z;
        return 2.0 * c * (1.0 - a * a) * (z + a) / (d * d * d);
      },
      Domain::disk, "special:" + shortest(a));
  b.with_series(special_coefficients(a, kSpecialSeriesOrder)).with_declared_norm(1.0);
  return b;
}

double cauchy_bound(int k) {
  if (k < 1) throw DomainError("cauchy_bound needs k >= 1");
  const double kk = k;
  return 0.5 * (kk + 2.0) * std::pow((kk + 2.0) / kk, 0.5 * kk);
}

DerivativeSeries derivative_coefficients(const BlochFunction& b, int K, double radius) {
  if (b.domain() != Domain::disk) throw DomainError("coefficient extraction needs a disk function");
  if (K < 0) throw DomainError("truncation order must be >= 0");
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("contour radius must lie in (0, 1)");
  const std::size_t max_nodes = std::size_t{1} << 20;
  double contour_max = 0.0;
  auto pass = [&](std::size_t n) {
    std::vector<Complex> values(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      values[j] = b.derivative(std::polar(radius, t));
      contour_max = std::max(contour_max, std::abs(values[j]));
    }
    std::vector<Complex> q(static_cast<std::size_t>(K) + 1);
    std::vector<Complex> terms(n);
    for (int k = 0; k <= K; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const double t = -2.0 * std::numbers::pi * static_cast<double>((static_cast<std::size_t>(k) * j) % n) /
                         static_cast<double>(n);
        terms[j] = values[j] * std::polar(1.0, t);
      }
      q[static_cast<std::size_t>(k)] = core::pairwise_sum(std::span<const Complex>(terms)) /
                                       (static_cast<double>(n) * std::pow(radius, k));
    }
    return q;
  };
  std::size_t n = std::max<std::size_t>(16, 8 * static_cast<std::size_t>(K));
  auto q = pass(n);
  for (;;) {
    if (2 * n > max_nodes) throw ConvergenceError("contour coefficients did not settle", q.back(), q.back());
    n *= 2;
    auto next = pass(n);
    double diff = 0.0;
    // Rounding in the contour values is amplified by radius^-k; that floor
    // is added to the 1e-12 agreement target.
    bool settled = true;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * contour_max /
                           std::pow(radius, static_cast<double>(k));
      if (std::abs(next[k] - q[k]) > 1e-12 + floor) settled = false;
    }
    q = std::move(next);
    if (settled) break;
  }
  return {std::move(q), K, radius, n};
}

BlochFunction lacunary(int base, int K) {
  if (base < 2) throw DomainError("lacunary base must be >= 2");
  if (K < 1) throw DomainError("lacunary order must be >= 1");
  std::vector<double> exponents{1.0};
  std::int64_t e = 1;
  for (int k = 1; k <= K; ++k) {
    if (e > (std::int64_t{1} << 62) / base) throw DomainError("lacunary exponent base^K overflows");
    e *= base;
    exponents.push_back(static_cast<double>(e));
  }
  auto value = [base, K](Complex z) {
    Complex p = z;
    Complex acc = p;
    for (int k = 1; k <= K; ++k) {
      Complex next = p;
      for (int i = 1; i < base; ++i) next *= p;
      p = next;
      if (p == Complex(0.0)) break;
      acc += p;
    }
    return acc;
  };
  // d/dz z^n = n z^(n-1) = n z^n / z; near 0 every term but the first vanishes.
  auto derivative = [base, K, exponents](Complex z) {
    if (std::abs(z) < 1e-150) return Complex(1.0);
    Complex p = z;
    Complex acc = 1.0;
    for (int k = 1; k <= K; ++k) {
      Complex next = p;
      for (int i = 1; i < base; ++i) next *= p;
      p = next;
      if (p == Complex(0.0)) break;
      acc += exponents[static_cast<std::size_t>(k)] * p / z;
    }
    return acc;
  };
  return BlochFunction(value, derivative, Domain::disk,
                       "lacunary:" + std::to_string(base) + "," + std::to_string(K));
}

BlochFunction polynomial(std::vector<Complex> c) {
  if (c.empty()) c.push_back(0.0);
  std::vector<Complex> dc;
  for (std::size_t k = 1; k < c.size(); ++k) dc.push_back(static_cast<double>(k) * c[k]);
  if (dc.empty()) dc.push_back(0.0);
  auto horner = [](const std::vector<Complex>& coef) {
    return [coef](Complex z) {
      Complex acc = 0.0;
      for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * z + *it;
      return acc;
    };
  };
  std::string label = "poly:";
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) label += ",";
    label += shortest(c[k].real());
  }
  BlochFunction b(horner(c), horner(dc), Domain::disk, label);
  b.with_series(dc);
  return b;
}

BlochFunction logmap() {
  BlochFunction b([](Complex z) { return -std::log(1.0 - z); }, [](Complex z) { return 1.0 / (1.0 - z); },
                  Domain::disk, "logmap");
  // sup (1 - |z|^2)/|1 - z| = 2, approached along the radius to 1.
  b.with_series(std::vector<Complex>(32, 1.0)).with_declared_norm(2.0);
  return b;
}

BlochFunction logz() {
  BlochFunction b([](Complex w) { return std::log(w); }, [](Complex w) { return 1.0 / w; }, Domain::half_plane,
                  "logz");
  b.with_declared_norm(2.0);
  return b;
}

BlochFunction conjugate_exponential(const BlochFunction& b) {
  if (b.domain() != Domain::disk) throw DomainError("conjugate_exponential expects a disk function");
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  BlochFunction out([b, two_pi_i](Complex w) { return b(std::exp(two_pi_i * w)); },
                    [b, two_pi_i](Complex w) {
                      const Complex xi = std::exp(two_pi_i * w);
                      return b.derivative(xi) * two_pi_i * xi;
                    },
                    Domain::half_plane, "exp(" + b.label() + ")");
  out.with_period(1.0);
  // The exponential contracts the hyperbolic metric, so quotients only shrink.
  if (b.declared_norm()) out.with_declared_norm(*b.declared_norm());
  return out;
}

NormEstimate bloch_norm_search(const BlochFunction& b, int samples) {
  if (samples < 1) throw DomainError("samples must be >= 1");
  const BlochFunction g = b.domain() == Domain::disk ? b : core::pull_back_to_disk(b, Complex(0.0, 1.0));
  const double max_radius = core::hyperbolic_radius(1.0 - 1e-6);
  const int rings = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples) / 4.0))));
  const int per_ring = std::max(1, samples / rings);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));

  struct Sample {
    double q;
    Complex z;
  };
  std::vector<Sample> found(static_cast<std::size_t>(rings) * static_cast<std::size_t>(per_ring));
  core::parallel_for(static_cast<std::size_t>(rings), [&](std::size_t i) {
    const double R = rings == 1 ? 0.0 : max_radius * static_cast<double>(i) / static_cast<double>(rings - 1);
    const double r = core::euclidean_radius(R);
    for (int j = 0; j < per_ring; ++j) {
      const double t = 2.0 * std::numbers::pi * j / per_ring + golden * static_cast<double>(i);
      const Complex z = std::polar(r, t);
      found[i * static_cast<std::size_t>(per_ring) + static_cast<std::size_t>(j)] = {core::bloch_quotient(g, z), z};
    }
  });
  NormEstimate out;
  out.evaluations = found.size();
  const std::size_t seeds = std::min<std::size_t>(4, found.size());
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(seeds), found.end(),
                    [](const Sample& x, const Sample& y) { return x.q > y.q || (x.q == y.q && std::norm(x.z) < std::norm(y.z)); });
  out.value = found[0].q;
  out.argmax = found[0].z;

  // Compass search in steps measured against the local hyperbolic scale.
  const Complex dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0.7071067811865476, 0.7071067811865476},
                           {-0.7071067811865476, 0.7071067811865476}, {0.7071067811865476, -0.7071067811865476},
                           {-0.7071067811865476, -0.7071067811865476}};
  for (std::size_t s = 0; s < seeds; ++s) {
    Sample best = found[s];
    double step = 0.5 * max_radius / std::max(rings - 1, 1);
    for (int iter = 0; iter < 200 && step > 1e-10; ++iter) {
      bool moved = false;
      const double scale = 0.5 * (1.0 - std::norm(best.z));
      for (const Complex& d : dirs) {
        const Complex z = best.z + step * scale * d;
        if (std::norm(z) >= 1.0 - 1e-15) continue;
        const double q = core::bloch_quotient(g, z);
        ++out.evaluations;
        if (q > best.q) {
          best = {q, z};
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (best.q > out.value) {
      out.value = best.q;
      out.argmax = best.z;
    }
  }
  if (b.domain() == Domain::half_plane) out.argmax = core::DiskToHalfPlane(Complex(0.0, 1.0))(out.argmax);
  return out;
}

double bloch_norm_estimate(const BlochFunction& b, int samples) { return bloch_norm_search(b, samples).value; }

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  BlochFunction parse() {
    BlochFunction b = function();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input in function spec", pos_);
    return b;
  }

 private:
  BlochFunction function() {
    const std::size_t start = pos_;
    const std::string name = word();
    if (name == "special") {
      expect(':');
      const std::size_t at = pos_;
      const double a = number();
      if (!(a >= 0.0 && a < 1.0)) throw ParseError("special parameter must lie in [0, 1)", at);
      return make_special(a);
    }
    if (name == "lacunary") {
      expect(':');
      const std::size_t at = pos_;
      const int base = integer();
      if (base < 2) throw ParseError("lacunary base must be >= 2", at);
      int K = base == 2 ? 40 : 0;
      if (K == 0) {
        // Deepest order whose exponent still fits in 62 bits.
        std::int64_t e = 1;
        while (e <= (std::int64_t{1} << 62) / base && K < 40) {
          e *= base;
          ++K;
        }
      }
      if (peek() == ',') {
        ++pos_;
        const std::size_t kat = pos_;
        K = integer();
        if (K < 1) throw ParseError("lacunary order must be >= 1", kat);
      }
      try {
        return lacunary(base, K);
      } catch (const DomainError& e) {
        throw ParseError(e.what(), at);
      }
    }
    if (name == "poly") {
      expect(':');
      std::vector<Complex> c{number()};
      while (peek() == ',') {
        ++pos_;
        c.push_back(number());
      }
      return polynomial(std::move(c));
    }
    if (name == "logmap") return logmap();
    if (name == "logz") return logz();
    if (name == "exp") {
      expect('(');
      const std::size_t inner_at = pos_;
      BlochFunction inner = function();
      expect(')');
      if (inner.domain() != Domain::disk) throw ParseError("exp(...) needs a disk function", inner_at);
      return conjugate_exponential(inner);
    }
    throw ParseError("unknown function kind '" + name + "'", start);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected a function kind", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    double x = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || !std::isfinite(x)) throw ParseError("expected a number", pos_);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return x;
  }

  int integer() {
    int x = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), x);
    if (ec != std::errc()) throw ParseError("expected an integer", pos_);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return x;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

BlochFunction parse_function_spec(std::string_view spec) { return SpecParser(spec).parse(); }

}  // namespace blochlab::bloch
