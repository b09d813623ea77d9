#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "doctest.h"

#include "blochlab/bloch/functions.hpp"
#include "blochlab/certify/certify.hpp"
#include "blochlab/core/errors.hpp"

using namespace blochlab;
using namespace blochlab::certify;
using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<80>>;

namespace {

Dec dec(const Rational& q) { return Dec(q.num()) / Dec(q.den()); }

Dec tail_oracle(const Rational& r, int K) {
  const Dec x = dec(r) * dec(r);
  Dec sum = 0;
  for (int k = K; k < 600; ++k) {
    const Dec kk = k;
    sum += pow(x, k + 1) / (2 * kk + 2) * pow((kk + 2) / 2, 2) * pow((kk + 2) / kk, k);
  }
  return sum;
}

Dec branch1_oracle(const Rational& r) {
  const Dec x = dec(r) * dec(r);
  return 2 * (1 - x) / x * (x / 2 + Dec(2) / 3 * pow(x, 3) + tail_oracle(r, 3));
}

Dec branch2_oracle(const Rational& r) {
  const Dec x = dec(r) * dec(r);
  return 2 * (1 - x) / x * (x / 2 + Dec(17) / 24 * pow(x, 3) + Dec(277) / 100 * pow(x, 4) + tail_oracle(r, 4));
}

Dec parseval_oracle(const Dec& s) { return (1 / pow(1 - s, 2) - 4 * s * s) / pow(s, 3); }

bool encloses(const Enclosure& e, const Dec& v) { return Dec(e.lo) <= v && v <= Dec(e.hi); }

double b1_direct(double r, double a) {
  const double q0 = bloch::special_q0(a);
  const double q1 = bloch::special_q1(a);
  return r * r / 2 - (r * r / 2 * q0 * q0 + std::pow(r, 4) / 4 * q1 * q1);
}

long double b4_direct(long double r, long double a) {
  const long double q0 = 1.5L * std::sqrt(3.0L) * a * (1 - a * a);
  const long double q1 = 1.5L * std::sqrt(3.0L) * (1 - a * a) * (1 - 3 * a * a);
  const long double q2 = 2 + 2 * std::sqrt(std::max(0.0L, 1 - q0 * q0));
  const long double lhs = r * r / 2 * q0 * q0 + std::pow(r, 4) / 4 * q1 * q1 + std::pow(r, 6) / 6 * q2 * q2;
  return r * r / 2 + 17.0L / 24 * std::pow(r, 6) - lhs;
}

// Dense sampling followed by golden-section refinement around the best sample.
long double b4_min_oracle(long double r) {
  const int n = 200000;
  int best = 0;
  long double v = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const long double m = b4_direct(r, static_cast<long double>(i) / n);
    if (m < v) {
      v = m;
      best = i;
    }
  }
  long double lo = std::max(0, best - 1) / static_cast<long double>(n);
  long double hi = std::min(n, best + 1) / static_cast<long double>(n);
  const long double g = (std::sqrt(5.0L) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const long double c = hi - g * (hi - lo);
    const long double d = lo + g * (hi - lo);
    if (b4_direct(r, c) < b4_direct(r, d)) hi = d; else lo = c;
  }
  return std::min(v, b4_direct(r, (lo + hi) / 2));
}

}  // namespace

TEST_CASE("tail enclosures") {
  const Rational r(2, 5);
  const auto t3 = tail_bound(r, 3);
  CHECK(encloses(t3, tail_oracle(r, 3)));
  CHECK(t3.box.width() <= 1e-7);
  CHECK(std::fabs(t3.box.mid() - 0.0029614) < 1e-7);
  const auto t4 = tail_bound(r, 4);
  CHECK(encloses(t4, tail_oracle(r, 4)));
  CHECK(std::fabs(t4.box.mid() - 0.0005910) < 5e-8);
  for (int K = 3; K < 12; ++K) CHECK(tail_bound(r, K + 1).box.hi() < tail_bound(r, K).box.hi());
  for (int cutoff : {3, 10, 20, 100}) {
    const auto t = tail_bound(r, 3, cutoff);
    CHECK(encloses(t, tail_oracle(r, 3)));
  }
  CHECK(tail_bound(r, 3, 3).box.width() > tail_bound(r, 3, 20).box.width());
  for (long prec : {64L, 128L, 200L}) {
    const auto t = tail_bound(r, 3, 60, prec);
    CHECK(encloses(t, tail_oracle(r, 3)));
    CHECK(t.box.width() <= 1e-15);
  }
  CHECK_THROWS_AS(tail_bound(Rational(1), 3), DomainError);
  CHECK_THROWS_AS(tail_bound(Rational(3, 2), 3), DomainError);
  CHECK_THROWS_AS(tail_bound(Rational(0), 3), DomainError);
  CHECK_THROWS_AS(tail_bound(r, 2), DomainError);
  CHECK_THROWS_AS(tail_bound(r, 5, 4), DomainError);
  CHECK_THROWS_AS(tail_bound(r, 3, 60, 20), DomainError);
}

TEST_CASE("Parseval bound on q3") {
  const auto q = parseval_q3_bound(Rational(29, 50));
  CHECK(encloses(q, parseval_oracle(Dec(58) / 100)));
  CHECK(q.box.hi() <= 22.16);
  CHECK(q.box.lo() >= 22.15);
  CHECK(q.box.width() <= 1e-6);
  CHECK(encloses(parseval_q3_bound(Rational(29, 50), 160), parseval_oracle(Dec(58) / 100)));
  CHECK(parseval_q3_bound(Rational(1, 1000)).box.lo() > 1e8);
  for (int i = 1; i < 100; ++i) {
    const double s = i / 100.0;
    if (1 / std::pow(1 - s, 2) >= 4 * s * s) CHECK(parseval_q3_bound(Rational(i, 100)).box.hi() >= 0.0);
  }
  CHECK_THROWS_AS(parseval_q3_bound(Rational(0)), DomainError);
  CHECK_THROWS_AS(parseval_q3_bound(Rational(1)), DomainError);
}

TEST_CASE("Schwarz bound on q2") {
  CHECK(schwarz_q2_bound(Interval(0.0)).contains(4.0));
  CHECK(schwarz_q2_bound(Interval(1.0)).contains(2.0));
  CHECK(schwarz_q2_bound(Interval(0.6)).contains(3.6));
  CHECK(schwarz_q2_bound(Interval(0.6)).width() < 1e-14);
  CHECK_THROWS_AS(schwarz_q2_bound(Interval(-0.1, 0.5)), DomainError);
  CHECK_THROWS_AS(schwarz_q2_bound(Interval(0.5, 1.1)), DomainError);
}

TEST_CASE("special coefficients obey the coefficient bounds") {
  const double s2 = 0.58;
  for (int i = 0; i < 1000; ++i) {
    const double a = i / 1000.0;
    const auto q = bloch::special_coefficients(a, 30);
    const double q0 = std::abs(q[0]);
    CHECK(std::abs(q[2]) <= 2 + 2 * std::sqrt(std::max(0.0, 1 - q0 * q0)) + 1e-9);
    double parseval = 0.0;
    for (int k = 0; k < 30; ++k) parseval += std::norm(q[k]) * std::pow(s2, k);
    CHECK(parseval <= 1 / ((1 - s2) * (1 - s2)) + 1e-9);
  }
}

TEST_CASE("b1 scan") {
  for (const Rational& r : {Rational(2, 5), Rational(1, 10)}) {
    const auto s = scan_special_b1(r);
    CHECK(s.verified);
    CHECK(s.margin.box.lo() >= 0.0);
    CHECK(s.margin.box.hi() < 1e-10);
    CHECK(std::fabs(s.argmin.mid() - 1 / std::sqrt(3.0)) < 1e-4);
    // Floating dense scan: never below the enclosure, never meaningfully negative.
    double lowest = INFINITY;
    for (int i = 0; i <= 100000; ++i) lowest = std::min(lowest, b1_direct(r.to_double(), i / 100000.0));
    CHECK(lowest >= s.margin.box.lo() - 1e-15);
    CHECK(lowest > -1e-15);
  }
  // At a = 0: q0 = 0, q1^2 = 27/4.
  CHECK(bloch::special_q0(0.0) == 0.0);
  CHECK(bloch::special_q1(0.0) * bloch::special_q1(0.0) == doctest::Approx(6.75));
  for (double r : {0.1, 0.2, 0.3, 0.4}) CHECK(std::pow(r, 4) / 4 * 6.75 < r * r / 2);
  // Exact equality at a = 1/sqrt(3).
  CHECK(std::fabs(b1_direct(0.4, 1 / std::sqrt(3.0))) < 1e-16);
}

TEST_CASE("b4 scan") {
  const Rational r(2, 5);
  const long double a0 = b4_direct(0.4L, 0.0L);
  CHECK(static_cast<double>(0.4L * 0.4L / 2 + 17.0L / 24 * std::pow(0.4L, 6) - a0) == doctest::Approx(0.054123).epsilon(1e-5));
  CHECK(static_cast<double>(a0) == doctest::Approx(0.028778).epsilon(1e-4));

  const auto s3 = scan_special_b4(r, {1000});
  const auto s4 = scan_special_b4(r, {10000});
  CHECK(s3.verified);
  CHECK(s4.verified);
  CHECK(s3.margin.box.lo() > 0.0);
  CHECK(std::fabs(s3.margin.box.lo() - s4.margin.box.lo()) <= 1e-6);
  CHECK(std::fabs(s3.margin.box.hi() - s4.margin.box.hi()) <= 1e-6);
  const double oracle = static_cast<double>(b4_min_oracle(0.4L));
  CHECK(s3.margin.box.lo() <= oracle + 1e-15);
  CHECK(oracle <= s3.margin.box.hi() + 1e-12);
  CHECK(std::fabs(s3.margin.box.mid() - oracle) < 1e-10);

  ScanOptions hp;
  hp.precision = 128;
  const auto s5 = scan_special_b4(r, hp);
  CHECK(s5.verified);
  CHECK(std::fabs(s5.margin.box.mid() - oracle) < 1e-10);

  // The margin shrinks at smaller r; the scan still agrees with the oracle there.
  const auto small = scan_special_b4(Rational(1, 5));
  CHECK(small.verified);
  CHECK(std::fabs(small.margin.box.mid() - static_cast<double>(b4_min_oracle(0.2L))) < 1e-10);
}

TEST_CASE("scan preconditions") {
  CHECK_THROWS_AS(scan_special_b1(Rational(1, 2)), DomainError);
  CHECK_THROWS_AS(scan_special_b4(Rational(0)), DomainError);
  CHECK_THROWS_AS(scan_special_b4(Rational(2, 5), {1}), DomainError);
  ScanOptions shallow;
  shallow.grid = 2;
  shallow.max_depth = 0;
  CHECK_THROWS_AS(scan_special_b4(Rational(2, 5), shallow), InconclusiveError);
}

TEST_CASE("certificate") {
  const Rational r(2, 5);
  const auto c = certify_sigma(r);
  CHECK(c.status == Status::verified);
  CHECK(c.failing_component.empty());
  CHECK(encloses(c.branch1, branch1_oracle(r)));
  CHECK(encloses(c.branch2, branch2_oracle(r)));
  CHECK(c.branch1.box.hi() <= 0.8998);
  CHECK(c.branch1.box.width() <= 1e-6);
  CHECK(std::fabs(c.branch1.box.mid() - 0.899767) < 2e-6);
  CHECK(std::fabs(c.branch2.box.mid() - 0.895731) < 1e-6);
  CHECK(c.final_bound.box == core::max(c.branch1.box, c.branch2.box));
  CHECK(c.final_bound.box.hi() < 0.9);
  CHECK(c.scan_b1_margin.box.lo() >= 0.0);
  CHECK(c.scan_b4_margin.box.lo() > 0.0);

  const auto j = c.to_json();
  CHECK(j.at("version") == 1);
  CHECK(j.at("r") == "2/5");
  CHECK(j.at("status") == "verified");
  CHECK(j.at("claim") == "Σ²_B < 0.9");
  CHECK(j.at("assumptions").size() == 1);
  CHECK(j.at("branch1")[0].is_string());
  CHECK(Certificate::from_json(nlohmann::json::parse(j.dump())).to_json() == j);
  auto bad = j;
  bad["version"] = 99;
  CHECK_THROWS_AS(Certificate::from_json(bad), DomainError);
}

TEST_CASE("certificate at higher precision") {
  const Rational r(2, 5);
  CertifyOptions opt;
  opt.precision = 200;
  const auto c = certify_sigma(r, opt);
  CHECK(c.status == Status::verified);
  CHECK(encloses(c.branch1, branch1_oracle(r)));
  CHECK(encloses(c.branch2, branch2_oracle(r)));
  CHECK(encloses(c.tail_K3, tail_oracle(r, 3)));
  CHECK(Dec(c.branch1.hi) - Dec(c.branch1.lo) < Dec("1e-40"));
  CHECK(Certificate::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("branch bounds shrink as r grows") {
  // The prefactor 2(1 - r^2)/r^2 times r^2/2 dominates, so both bounds fall on [0.3, 0.4].
  double prev1 = INFINITY;
  double prev2 = INFINITY;
  for (const Rational& r : {Rational(3, 10), Rational(7, 20), Rational(2, 5)}) {
    const auto c = certify_sigma(r);
    CHECK(encloses(c.branch1, branch1_oracle(r)));
    CHECK(encloses(c.branch2, branch2_oracle(r)));
    CHECK(c.branch1.box.hi() < prev1);
    CHECK(c.branch2.box.hi() < prev2);
    prev1 = c.branch1.box.lo();
    prev2 = c.branch2.box.lo();
  }
  // Smaller radii do not reach 0.8998: the certificate fails and names the branch.
  const auto weak = certify_sigma(Rational(3, 10));
  CHECK(weak.status == Status::failed);
  CHECK(weak.failing_component == "branch1");
  CHECK(weak.to_json().at("status") == "failed");
  CHECK(Certificate::from_json(weak.to_json()).status == Status::failed);

  CHECK_THROWS_AS(certify_sigma(Rational(1, 2)), DomainError);
  CertifyOptions low;
  low.precision = 30;
  CHECK_THROWS_AS(certify_sigma(Rational(2, 5), low), DomainError);
}

TEST_CASE("certificate is independent of the thread count") {
  std::string ref;
  for (int threads : {1, 4, 16}) {
    CertifyOptions opt;
    opt.threads = threads;
    const std::string s = certify_sigma(Rational(2, 5), opt).to_json().dump();
    if (ref.empty()) ref = s;
    CHECK(s == ref);
  }
}
