#include <algorithm>
#include <cmath>

#include "blochlab/bloch/functions.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/core/quadrature.hpp"
#include "blochlab/transforms/transforms.hpp"

namespace blochlab::transforms {

using nlohmann::json;

namespace {

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }
Complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

double lower_distance(Complex w, Complex c) { return core::distance_half_plane(std::conj(w), std::conj(c)); }

}  // namespace

double NAdicBox::width() const { return std::pow(static_cast<double>(n), -k); }

bool NAdicBox::contains(Complex w) const {
  return w.real() >= left() && w.real() < right() && w.imag() >= bottom() && w.imag() < top();
}

double NAdicBox::weighted_area() const { return width() * std::log(static_cast<double>(n)); }

double NAdicBox::weighted_area_quadrature() const {
  core::AdaptiveOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-15;
  const auto dy = core::integrate_adaptive([](double y) { return 1.0 / y; }, bottom(), top(), opt);
  return (right() - left()) * dy.value;
}

NAdicBox NAdicBox::locate(int n, Complex w) {
  if (n < 2) throw DomainError("grid base must be >= 2");
  if (!(w.imag() > 0.0) || !std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw DomainError("grid boxes tile the open upper half-plane");
  }
  const double y = w.imag();
  NAdicBox box{n, 0, static_cast<int>(std::ceil(-std::log(y) / std::log(static_cast<double>(n)))) - 1};
  while (y >= box.top()) --box.k;
  while (y < box.bottom()) ++box.k;
  box.j = static_cast<std::int64_t>(std::floor(w.real() / box.width()));
  while (w.real() < box.left()) --box.j;
  while (w.real() >= box.right()) ++box.j;
  return box;
}

NAdicBox NAdicBox::from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DomainError("box id must be an (n, j, k) triple");
  NAdicBox box{j.at(0).get<int>(), j.at(1).get<std::int64_t>(), j.at(2).get<int>()};
  if (box.n < 2) throw DomainError("grid base must be >= 2");
  return box;
}

double distance_to_boundary(const NAdicBox& box, Complex w) {
  const double x = w.real();
  const double y = w.imag();
  const double c = box.bottom();
  const double d = box.top();
  double h = std::min(std::log(y / c), std::log(d / y));
  for (double side : {box.left(), box.right()}) {
    const double t = std::fabs(x - side);
    double dist;
    if (std::hypot(t, y) <= d) {
      dist = std::asinh(t / y);
    } else {
      // Closest point of the side is its top corner.
      dist = std::acosh(1.0 + (t * t + (y - d) * (y - d)) / (2.0 * y * d));
    }
    h = std::min(h, dist);
  }
  return std::max(h, 0.0);
}

const char* to_string(Support::Kind kind) {
  switch (kind) {
    case Support::Kind::disk:
      return "disk";
    case Support::Kind::lower_half_plane:
      return "lower_half_plane";
    case Support::Kind::boxes:
      return "boxes";
    case Support::Kind::periodic:
      return "periodic";
  }
  return "?";
}

BeltramiCoefficient::BeltramiCoefficient(Fn mu, Support support, double bound, json descriptor)
    : mu_(std::move(mu)), support_(std::move(support)), bound_(bound), descriptor_(std::move(descriptor)) {
  if (!mu_) throw DomainError("Beltrami coefficient needs an evaluator");
  if (!(bound >= 0.0)) throw DomainError("Beltrami bound must be >= 0");
}

bool BeltramiCoefficient::in_support(Complex w) const {
  switch (support_.kind) {
    case Support::Kind::disk:
      return std::norm(w) < 1.0;
    case Support::Kind::lower_half_plane:
    case Support::Kind::periodic:
      return w.imag() < 0.0;
    case Support::Kind::boxes:
      return std::any_of(support_.rects.begin(), support_.rects.end(), [w](const Rect& r) { return r.contains(w); });
  }
  return false;
}

Complex BeltramiCoefficient::operator()(Complex w) const { return in_support(w) ? mu_(w) : Complex(0.0); }

BeltramiCoefficient constant(Complex c, Support::Kind kind) {
  if (kind != Support::Kind::disk && kind != Support::Kind::lower_half_plane) {
    throw DomainError("constant coefficients live on the disk or the lower half-plane");
  }
  Support s;
  s.kind = kind;
  return BeltramiCoefficient([c](Complex) { return c; }, s, std::abs(c),
                             {{"kind", "const"}, {"value", complex_json(c)}, {"support", to_string(kind)}});
}

BeltramiCoefficient boxed(Complex c, std::vector<Rect> rects) {
  json jr = json::array();
  for (const Rect& r : rects) {
    if (!(r.x0 < r.x1 && r.y0 < r.y1 && r.y1 <= 0.0)) throw DomainError("boxes must be proper rectangles in Im w <= 0");
    jr.push_back({r.x0, r.x1, r.y0, r.y1});
  }
  Support s;
  s.kind = Support::Kind::boxes;
  s.rects = std::move(rects);
  return BeltramiCoefficient([c](Complex) { return c; }, s, std::abs(c),
                             {{"kind", "boxed"}, {"value", complex_json(c)}, {"rects", jr}});
}

BeltramiCoefficient from_function(BeltramiCoefficient::Fn fn, Support support, double bound, json descriptor) {
  if (!descriptor.is_object()) descriptor = json::object();
  if (!descriptor.contains("kind")) descriptor["kind"] = "function";
  return BeltramiCoefficient(std::move(fn), std::move(support), bound, std::move(descriptor));
}

BeltramiCoefficient masked(const BeltramiCoefficient& inside, const BeltramiCoefficient& outside, Complex center,
                           double R) {
  if (!(center.imag() < 0.0)) throw DomainError("mask center must lie in the lower half-plane");
  if (!(R > 0.0)) throw DomainError("mask radius must be positive");
  Support s;
  s.kind = Support::Kind::lower_half_plane;
  s.circles = inside.support().circles;
  s.circles.insert(s.circles.end(), outside.support().circles.begin(), outside.support().circles.end());
  const double cy = -center.imag();
  s.circles.push_back({Complex(center.real(), -cy * std::cosh(R)), cy * std::sinh(R)});
  auto fn = [inside, outside, center, R](Complex w) {
    return lower_distance(w, center) < R ? inside(w) : outside(w);
  };
  return BeltramiCoefficient(fn, s, std::max(inside.bound(), outside.bound()),
                             {{"kind", "masked"}, {"center", complex_json(center)}, {"R", R},
                              {"inside", inside.descriptor()}, {"outside", outside.descriptor()}});
}

BeltramiCoefficient mu_from_bloch(const BlochFunction& b) {
  const json desc{{"kind", "from_bloch"}, {"function", b.label()}};
  Support s;
  if (b.domain() == core::Domain::disk) {
    s.kind = Support::Kind::disk;
    auto fn = [b](Complex w) {
      if (w == Complex(0.0)) return Complex(0.0);
      return (1.0 - std::norm(w)) * b.derivative(w) / std::conj(w);
    };
    return BeltramiCoefficient(fn, s, std::numeric_limits<double>::infinity(), desc);
  }
  s.kind = Support::Kind::lower_half_plane;
  auto fn = [b](Complex w) {
    return Complex(0.0, 2.0) * std::conj(b.derivative(std::conj(w))) * std::fabs(w.imag());
  };
  const double bound = b.declared_norm() ? *b.declared_norm() : std::numeric_limits<double>::infinity();
  return BeltramiCoefficient(fn, s, bound, desc);
}

BeltramiCoefficient periodize(const BeltramiCoefficient& mu, const NAdicBox& source, int n) {
  if (n < 2) throw DomainError("grid base must be >= 2");
  if (source.n != n) throw DomainError("source box does not belong to the base-" + std::to_string(n) + " grid");
  Support s;
  s.kind = Support::Kind::periodic;
  s.grid = n;
  auto fn = [mu, source, n](Complex w) {
    const NAdicBox target = NAdicBox::locate(n, std::conj(w));
    const double a = target.width() / source.width();
    const double shift = target.left() - a * source.left();
    return mu(Complex((w.real() - shift) / a, w.imag() / a));
  };
  return BeltramiCoefficient(fn, s, mu.bound(),
                             {{"kind", "periodic"}, {"n", n}, {"source", source.to_json()}, {"base", mu.descriptor()}});
}

BeltramiCoefficient damp_boundary(const BeltramiCoefficient& mu_per, double S) {
  if (mu_per.support().kind != Support::Kind::periodic) throw DomainError("damp_boundary expects a periodic coefficient");
  if (!(S > 0.0)) throw DomainError("collar width S must be positive");
  const int n = mu_per.support().grid;
  auto fn = [mu_per, S, n](Complex w) {
    const Complex u = std::conj(w);
    const double h = distance_to_boundary(NAdicBox::locate(n, u), u);
    const Complex m = mu_per(w);
    return h < S ? (h / S) * m : m;
  };
  return BeltramiCoefficient(fn, mu_per.support(), mu_per.bound(),
                             {{"kind", "damped"}, {"S", S}, {"base", mu_per.descriptor()}});
}

json to_json(const BeltramiCoefficient& mu) {
  json out = mu.descriptor();
  out["bound"] = std::isfinite(mu.bound()) ? json(mu.bound()) : json("unbounded");
  return out;
}

BeltramiCoefficient beltrami_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") {
    const std::string support = j.value("support", "lower_half_plane");
    if (support != "disk" && support != "lower_half_plane") throw DomainError("unknown support '" + support + "'");
    return constant(complex_from(j.at("value")),
                    support == "disk" ? Support::Kind::disk : Support::Kind::lower_half_plane);
  }
  if (kind == "boxed") {
    std::vector<Rect> rects;
    for (const auto& r : j.at("rects")) rects.push_back({r.at(0), r.at(1), r.at(2), r.at(3)});
    return boxed(complex_from(j.at("value")), std::move(rects));
  }
  if (kind == "periodic") {
    return periodize(beltrami_from_json(j.at("base")), NAdicBox::from_json(j.at("source")), j.at("n").get<int>());
  }
  if (kind == "damped") return damp_boundary(beltrami_from_json(j.at("base")), j.at("S").get<double>());
  if (kind == "masked") {
    return masked(beltrami_from_json(j.at("inside")), beltrami_from_json(j.at("outside")),
                  complex_from(j.at("center")), j.at("R").get<double>());
  }
  if (kind == "from_bloch") return mu_from_bloch(bloch::parse_function_spec(j.at("function").get<std::string>()));
  throw DomainError("cannot rebuild Beltrami coefficient of kind '" + kind + "'");
}

}  // namespace blochlab::transforms
