#include "blochlab/certify/certify.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "blochlab/core/errors.hpp"
#include "blochlab/core/interval_traits.hpp"
#include "blochlab/core/parallel.hpp"

namespace blochlab::certify {
namespace {

using core::IntervalTraits;
using core::MpInterval;

template <class I>
struct Num {
  long precision;
  I rat(const Rational& q) const { return IntervalTraits<I>::rational(q, precision); }
  I rat(std::int64_t p, std::int64_t q = 1) const { return rat(Rational(p, q)); }
  static Interval outer(const I& x) { return IntervalTraits<I>::to_interval(x); }
};

Enclosure enclose(const Interval& x) { return Enclosure::from_interval(x); }

Enclosure enclose(const MpInterval& x) {
  const int digits = static_cast<int>(std::ceil(static_cast<double>(x.precision()) * 0.30103)) + 2;
  Enclosure e = Enclosure::from_strings(x.lo_string(digits), x.hi_string(digits));
  return e;
}

double parse_endpoint(const std::string& s, bool upper) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) throw DomainError("bad decimal endpoint: " + s);
  if (core::format_endpoint(v) == s) return v;
  return std::nextafter(v, upper ? INFINITY : -INFINITY);
}

// Value and derivative enclosures (forward mode). For |x| the derivative
// slot holds the generalized gradient, which keeps the mean value form valid.
template <class I>
struct Dual {
  I v;
  I d;
};

template <class I>
Dual<I> operator+(const Dual<I>& a, const Dual<I>& b) { return {a.v + b.v, a.d + b.d}; }
template <class I>
Dual<I> operator-(const Dual<I>& a, const Dual<I>& b) { return {a.v - b.v, a.d - b.d}; }
template <class I>
Dual<I> operator*(const Dual<I>& a, const Dual<I>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class I>
Dual<I> operator*(const I& c, const Dual<I>& a) { return {c * a.v, c * a.d}; }
template <class I>
Dual<I> operator+(const I& c, const Dual<I>& a) { return {c + a.v, a.d}; }
template <class I>
Dual<I> operator-(const I& c, const Dual<I>& a) { return {c - a.v, -a.d}; }
template <class I>
Dual<I> sqr(const Dual<I>& a, const Num<I>& N) { return {sqr(a.v), N.rat(2) * a.v * a.d}; }
template <class I>
Dual<I> sqrt(const Dual<I>& a, const Num<I>& N) {
  const I s = sqrt(a.v);
  return {s, a.d / (N.rat(2) * s)};
}
template <class I>
Dual<I> abs(const Dual<I>& a, const Num<I>& N) {
  const Interval o = Num<I>::outer(a.v);
  const I sign = o.lo() > 0.0 ? N.rat(1) : o.hi() < 0.0 ? N.rat(-1) : hull(N.rat(-1), N.rat(1));
  return {abs(a.v), sign * a.d};
}

template <class I>
struct Margins {
  Num<I> N;
  I r2, r4, r6;
  I sqrt3;

  Margins(const Rational& r, long precision) : N{precision} {
    r2 = sqr(N.rat(r));
    r4 = sqr(r2);
    r6 = r4 * r2;
    sqrt3 = sqrt(N.rat(3));
  }

  // Uses 1 - q0^2 = (3/4)(3t - 1)^2 (4/3 - t) and q1^2 = (27/4)(1 - t)^2 (1 - 3t)^2, t = a^2.
  Dual<I> b1(const Dual<I>& a) const {
    const Dual<I> t = sqr(a, N);
    const Dual<I> u = N.rat(1) - N.rat(3) * t;
    const Dual<I> w = N.rat(1) - t;
    const Dual<I> h = (N.rat(1) - N.rat(3, 4) * t) - (N.rat(27, 8) * r2) * sqr(w, N);
    return (r2 * N.rat(1, 2)) * (sqr(u, N) * h);
  }

  Dual<I> b4(const Dual<I>& a) const {
    const Dual<I> t = sqr(a, N);
    const Dual<I> u = N.rat(1) - N.rat(3) * t;
    const Dual<I> w = N.rat(1) - t;
    const Dual<I> rest = N.rat(4, 3) - t;
    const Dual<I> one_minus_q0sq = N.rat(3, 4) * (sqr(u, N) * rest);
    const Dual<I> q1sq = N.rat(27, 4) * (sqr(w, N) * sqr(u, N));
    const Dual<I> s = (sqrt3 * N.rat(1, 2)) * (abs(u, N) * sqrt(rest, N));
    const Dual<I> lhs_q2 = (r6 * N.rat(1, 6)) * sqr(N.rat(2) + N.rat(2) * s, N);
    const Dual<I> head = (r2 * N.rat(1, 2)) * one_minus_q0sq - (r4 * N.rat(1, 4)) * q1sq;
    return (N.rat(17, 24) * r6 + head) - lhs_q2;
  }
};

struct CellEval {
  Interval margin;
  double upper = 0.0;  // rigorous upper bound of the margin at the cell midpoint
};

template <class I, class F>
ScanResult scan(const F& f, const ScanOptions& opt, bool strict, long precision) {
  if (opt.grid < 2 || opt.grid > (1 << 22)) throw DomainError("scan grid must lie in [2, 2^22]");
  if (opt.max_depth < 0 || opt.max_depth > 40) throw DomainError("scan depth must lie in [0, 40]");
  const Num<I> N{precision};
  struct Cell {
    std::int64_t i;
    int d;
  };
  auto den = [&](int d) { return static_cast<std::int64_t>(opt.grid) << d; };

  std::vector<Cell> cells;
  for (std::int64_t i = 0; i < opt.grid; ++i) cells.push_back({i, 0});

  ScanResult out;
  double best = INFINITY;
  Interval best_cell(0.0, 1.0);
  double floor_lo = INFINITY;
  while (!cells.empty()) {
    std::vector<CellEval> evals(cells.size());
    core::parallel_for(
        cells.size(),
        [&](std::size_t n) {
          const Cell& c = cells[n];
          const I lo = N.rat(c.i, den(c.d));
          const I hi = N.rat(c.i + 1, den(c.d));
          const I mid = N.rat(2 * c.i + 1, den(c.d + 1));
          const I box = hull(lo, hi);
          const Dual<I> whole = f(Dual<I>{box, N.rat(1)});
          const Dual<I> center = f(Dual<I>{mid, N.rat(0)});
          const I mean_value = center.v + whole.d * (box - mid);
          evals[n] = {Num<I>::outer(intersect(whole.v, mean_value)), Num<I>::outer(center.v).hi()};
        },
        opt.threads);
    out.cells += static_cast<long>(cells.size());

    for (std::size_t n = 0; n < cells.size(); ++n) {
      if (evals[n].upper < best) {
        best = evals[n].upper;
        const Cell& c = cells[n];
        best_cell = Interval(Num<I>::outer(N.rat(c.i, den(c.d))).lo(), Num<I>::outer(N.rat(c.i + 1, den(c.d))).hi());
      }
    }
    if (best < 0.0) {
      // A point with negative margin: the inequality fails.
      double lo = floor_lo;
      for (const auto& e : evals) lo = std::min(lo, e.margin.lo());
      out.margin = Enclosure::from_interval(Interval(lo, best));
      out.argmin = best_cell;
      out.verified = false;
      return out;
    }

    std::vector<Cell> next;
    for (std::size_t n = 0; n < cells.size(); ++n) {
      const Cell& c = cells[n];
      const Interval& m = evals[n].margin;
      const bool resolved = strict ? m.lo() > 0.0 : m.lo() >= 0.0;
      const bool tight = m.lo() >= best - opt.min_width;
      if (resolved && (tight || c.d == opt.max_depth)) {
        floor_lo = std::min(floor_lo, m.lo());
        continue;
      }
      if (c.d == opt.max_depth) {
        throw InconclusiveError("scan cell [" + core::format_endpoint(best_cell.lo()) + ", " +
                                core::format_endpoint(best_cell.hi()) + "] undecided at the depth limit");
      }
      next.push_back({2 * c.i, c.d + 1});
      next.push_back({2 * c.i + 1, c.d + 1});
      out.depth = std::max(out.depth, c.d + 1);
    }
    cells = std::move(next);
  }
  out.margin = Enclosure::from_interval(Interval(floor_lo, best));
  out.argmin = best_cell;
  out.verified = true;
  return out;
}

void check_scan_r(const Rational& r) {
  if (!(Rational(0) < r) || Rational(2, 5) < r) throw DomainError("scans need 0 < r <= 2/5");
}

template <class I>
ScanResult scan_b1_as(const Rational& r, const ScanOptions& opt) {
  const Margins<I> M(r, opt.precision);
  return scan<I>([&M](const Dual<I>& a) { return M.b1(a); }, opt, false, opt.precision);
}

template <class I>
ScanResult scan_b4_as(const Rational& r, const ScanOptions& opt) {
  const Margins<I> M(r, opt.precision);
  return scan<I>([&M](const Dual<I>& a) { return M.b4(a); }, opt, true, opt.precision);
}

void check_precision(long precision) {
  if (precision < core::kNativePrecision || precision > 4096) throw DomainError("precision must lie in [53, 4096] bits");
}

template <class I>
I tail_as(const Rational& r, int K, int cutoff, long precision) {
  const Num<I> N{precision};
  const I x = sqr(N.rat(r));
  I sum = N.rat(0);
  for (int k = K; k < cutoff; ++k) {
    const I growth = pow(N.rat(k + 2, k), k);
    sum += pow(x, k + 1) * N.rat(1, 2 * k + 2) * sqr(N.rat(k + 2, 2)) * growth;
  }
  // ((k+2)/2)^2 / (2k+2) = ((k+1) + 2 + 1/(k+1)) / 8 <= (m + 2 + 1/M) / 8 with m = k+1 >= M.
  const int M = cutoff + 1;
  const I one_minus_x = N.rat(1) - x;
  const I xm = pow(x, M);
  const I geometric = xm / one_minus_x;
  const I weighted = xm * (N.rat(M) - N.rat(M - 1) * x) / sqr(one_minus_x);
  const I e2 = sqr(IntervalTraits<I>::e(precision));
  const I remainder = e2 * N.rat(1, 8) * (weighted + (N.rat(2) + N.rat(1, M)) * geometric);
  return sum + hull(N.rat(0), remainder);
}

template <class I>
I parseval_as(const Rational& s2, long precision) {
  const Num<I> N{precision};
  const I s = N.rat(s2);
  return (N.rat(1) / sqr(N.rat(1) - s) - N.rat(4) * sqr(s)) / pow(s, 3);
}

template <class I>
Certificate certify_as(const Rational& r, const CertifyOptions& opt) {
  const Num<I> N{opt.precision};
  Certificate c;
  c.r = r;
  c.precision = opt.precision;
  c.grid = opt.grid;
  c.tail_cutoff = opt.cutoff;
  c.claim = "Σ²_B < 0.9";

  const I r2 = sqr(N.rat(r));
  const I r6 = r2 * r2 * r2;
  const I r8 = r6 * r2;
  const I factor = N.rat(2) * (N.rat(1) - r2) / r2;
  const I t3 = tail_as<I>(r, 3, opt.cutoff, opt.precision);
  const I t4 = tail_as<I>(r, 4, opt.cutoff, opt.precision);
  const I b1 = factor * (r2 * N.rat(1, 2) + N.rat(2, 3) * r6 + t3);
  const I b2 = factor * (r2 * N.rat(1, 2) + N.rat(17, 24) * r6 + N.rat(277, 100) * r8 + t4);
  const I fin = max(b1, b2);
  const I q3 = parseval_as<I>(Rational(29, 50), opt.precision);
  c.tail_K3 = enclose(t3);
  c.tail_K4 = enclose(t4);
  c.branch1 = enclose(b1);
  c.branch2 = enclose(b2);
  c.final_bound = enclose(fin);
  c.q3_sq_bound = enclose(q3);

  ScanOptions so;
  so.grid = opt.grid;
  so.precision = opt.precision;
  so.threads = opt.threads;
  std::string failing;
  auto run_scan = [&](const char* name, auto&& fn, Enclosure& margin, nlohmann::json& detail) {
    try {
      const ScanResult s = fn();
      margin = s.margin;
      detail = s.to_json();
      if (!s.verified && failing.empty()) failing = name;
    } catch (const InconclusiveError& e) {
      margin = Enclosure::from_interval(Interval(-INFINITY, INFINITY));
      detail = {{"error", e.what()}};
      if (failing.empty()) failing = name;
    }
  };
  auto below = [&](const I& x, const Rational& bound) { return N.outer(x).hi() <= N.outer(N.rat(bound)).lo(); };
  auto strictly_below = [&](const I& x, const Rational& bound) {
    return N.outer(x).hi() < N.outer(N.rat(bound)).lo();
  };

  if (!below(q3, Rational(554, 25))) failing = "q3_sq";
  run_scan("scan_b1", [&] { return scan_b1_as<I>(r, so); }, c.scan_b1_margin, c.scan_b1);
  run_scan("scan_b4", [&] { return scan_b4_as<I>(r, so); }, c.scan_b4_margin, c.scan_b4);
  if (failing.empty() && !below(b1, Rational(4499, 5000))) failing = "branch1";
  if (failing.empty() && !below(b2, Rational(4499, 5000))) failing = "branch2";
  if (failing.empty() && !strictly_below(fin, Rational(9, 10))) failing = "final";
  c.failing_component = failing;
  c.status = failing.empty() ? Status::verified : Status::failed;
  return c;
}

}  // namespace

Enclosure Enclosure::from_interval(const Interval& x) {
  return {x, core::format_endpoint(x.lo()), core::format_endpoint(x.hi())};
}

Enclosure Enclosure::from_strings(std::string lo, std::string hi) {
  Enclosure e;
  const double l = parse_endpoint(lo, false);
  const double h = parse_endpoint(hi, true);
  if (!(l <= h)) throw DomainError("enclosure endpoints out of order");
  e.box = Interval(l, h);
  e.lo = std::move(lo);
  e.hi = std::move(hi);
  return e;
}

Enclosure Enclosure::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw DomainError("enclosure must be [\"lo\", \"hi\"]");
  }
  return from_strings(j[0].get<std::string>(), j[1].get<std::string>());
}

Enclosure tail_bound(const Rational& r, int K, int cutoff, long precision) {
  if (!(Rational(0) < r)) throw DomainError("tail needs r > 0");
  if (!(r < Rational(1))) throw DomainError("tail diverges for r >= 1");
  if (K < 3) throw DomainError("tail needs K >= 3");
  if (cutoff < K) throw DomainError("tail cutoff must be >= K");
  check_precision(precision);
  if (precision == core::kNativePrecision) return enclose(tail_as<Interval>(r, K, cutoff, precision));
  return enclose(tail_as<MpInterval>(r, K, cutoff, precision));
}

Enclosure parseval_q3_bound(const Rational& s2, long precision) {
  if (!(Rational(0) < s2 && s2 < Rational(1))) throw DomainError("Parseval bound needs 0 < s2 < 1");
  check_precision(precision);
  if (precision == core::kNativePrecision) return enclose(parseval_as<Interval>(s2, precision));
  return enclose(parseval_as<MpInterval>(s2, precision));
}

Interval schwarz_q2_bound(const Interval& q0_abs) {
  if (q0_abs.lo() < 0.0 || q0_abs.hi() > 1.0) throw DomainError("|q0| must lie in [0, 1]");
  const Interval inside = core::intersect(Interval(1.0) - core::sqr(q0_abs), Interval(0.0, 1.0));
  return Interval(2.0) + Interval(2.0) * core::sqrt(inside);
}

ScanResult scan_special_b1(const Rational& r, const ScanOptions& opt) {
  check_scan_r(r);
  check_precision(opt.precision);
  if (opt.precision == core::kNativePrecision) return scan_b1_as<Interval>(r, opt);
  return scan_b1_as<MpInterval>(r, opt);
}

ScanResult scan_special_b4(const Rational& r, const ScanOptions& opt) {
  check_scan_r(r);
  check_precision(opt.precision);
  if (opt.precision == core::kNativePrecision) return scan_b4_as<Interval>(r, opt);
  return scan_b4_as<MpInterval>(r, opt);
}

nlohmann::json ScanResult::to_json() const {
  return {{"margin", margin.to_json()},
          {"argmin", {core::format_endpoint(argmin.lo()), core::format_endpoint(argmin.hi())}},
          {"verified", verified},
          {"cells", cells},
          {"depth", depth}};
}

const char* to_string(Status s) { return s == Status::verified ? "verified" : "failed"; }

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["r"] = r.to_string();
  j["precision"] = precision;
  j["grid"] = grid;
  j["branch1"] = branch1.to_json();
  j["branch2"] = branch2.to_json();
  j["tails"] = {{"K3", tail_K3.to_json()}, {"K4", tail_K4.to_json()}, {"cutoff", tail_cutoff}};
  j["q3_sq"] = q3_sq_bound.to_json();
  j["scans"] = {{"b1_margin", scan_b1_margin.to_json()},
                {"b4_margin", scan_b4_margin.to_json()},
                {"b1", scan_b1},
                {"b4", scan_b4}};
  j["final"] = final_bound.to_json();
  j["claim"] = claim;
  j["status"] = to_string(status);
  j["failing_component"] = failing_component.empty() ? nlohmann::json(nullptr) : nlohmann::json(failing_component);
  j["assumptions"] = nlohmann::json::array({"Bonk reduction principle"});
  return j;
}

Certificate Certificate::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kVersion) throw DomainError("unsupported certificate version");
    Certificate c;
    c.r = Rational::parse(j.at("r").get<std::string>());
    c.precision = j.at("precision").get<long>();
    c.grid = j.at("grid").get<int>();
    c.branch1 = Enclosure::from_json(j.at("branch1"));
    c.branch2 = Enclosure::from_json(j.at("branch2"));
    c.tail_K3 = Enclosure::from_json(j.at("tails").at("K3"));
    c.tail_K4 = Enclosure::from_json(j.at("tails").at("K4"));
    c.tail_cutoff = j.at("tails").at("cutoff").get<int>();
    c.q3_sq_bound = Enclosure::from_json(j.at("q3_sq"));
    const auto& s = j.at("scans");
    c.scan_b1_margin = Enclosure::from_json(s.at("b1_margin"));
    c.scan_b4_margin = Enclosure::from_json(s.at("b4_margin"));
    c.scan_b1 = s.at("b1");
    c.scan_b4 = s.at("b4");
    c.final_bound = Enclosure::from_json(j.at("final"));
    c.claim = j.at("claim").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    if (status != "verified" && status != "failed") throw DomainError("unknown certificate status");
    c.status = status == "verified" ? Status::verified : Status::failed;
    const auto& f = j.at("failing_component");
    c.failing_component = f.is_null() ? std::string() : f.get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed certificate: ") + e.what());
  }
}

Certificate certify_sigma(const Rational& r, const CertifyOptions& opt) {
  check_scan_r(r);
  check_precision(opt.precision);
  if (opt.cutoff < 4) throw DomainError("tail cutoff must be >= 4");
  if (opt.precision == core::kNativePrecision) return certify_as<Interval>(r, opt);
  return certify_as<MpInterval>(r, opt);
}

}  // namespace blochlab::certify
