#include "blochlab/martingale/martingale.hpp"

#include <cmath>
#include <span>

#include "blochlab/core/errors.hpp"
#include "blochlab/core/parallel.hpp"
#include "blochlab/core/quadrature.hpp"
#include "blochlab/transforms/transforms.hpp"

namespace blochlab::martingale {
namespace {

double width(int n, int level) { return std::pow(static_cast<double>(n), -level); }

std::int64_t count(int n, int level) {
  std::int64_t c = 1;
  for (int i = 0; i < level; ++i) c *= n;
  return c;
}

struct Average {
  Complex value;
  double error;
};

Average interval_average(const BlochFunction& b, double a, double w, double h, double rel_tol) {
  core::AdaptiveOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-15 * w;
  opt.max_intervals = 20000;
  auto f = [&](double x) { return b(Complex(x, h)); };
  const auto r = core::integrate_adaptive(f, a, a + w, opt);
  if (!r.converged) throw ConvergenceError("interval average did not converge", 0.0, r.error / w);
  return {r.value / w, r.error / w};
}

void check_build(const BlochFunction& b, int n, int depth, double h0) {
  if (b.domain() != core::Domain::half_plane) throw DomainError("martingale needs a half-plane function");
  if (n < 2) throw DomainError("martingale base must be >= 2");
  if (depth < 1) throw DomainError("martingale depth must be >= 1");
  if (!(h0 > 0.0 && h0 < width(n, depth))) throw DomainError("need 0 < h0 < n^-depth");
  if (count(n, depth) > (std::int64_t{1} << 24)) throw DomainError("martingale tree too large");
}

}  // namespace

MartingaleTree::MartingaleTree(int n, int depth, double h0, std::vector<std::vector<MartingaleNode>> levels)
    : n_(n), depth_(depth), h0_(h0), levels_(std::move(levels)) {
  if (static_cast<int>(levels_.size()) != depth + 1) throw DomainError("martingale tree is incomplete");
  for (int k = 0; k <= depth; ++k) {
    if (static_cast<std::int64_t>(levels_[k].size()) != count(n, k)) throw DomainError("martingale level size mismatch");
  }
}

const MartingaleNode& MartingaleTree::node(IntervalIndex I) const {
  if (I.level < 0 || I.level > depth_ || I.j < 0 || I.j >= static_cast<std::int64_t>(levels_[I.level].size())) {
    throw DomainError("interval index outside the tree");
  }
  return levels_[I.level][static_cast<std::size_t>(I.j)];
}

std::size_t MartingaleTree::flagged_count() const {
  std::size_t c = 0;
  for (const auto& level : levels_) {
    for (const auto& node : level) c += node.flagged ? 1 : 0;
  }
  return c;
}

nlohmann::json MartingaleTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (int k = 0; k <= depth_; ++k) {
    for (std::size_t j = 0; j < levels_[k].size(); ++j) {
      const auto& v = levels_[k][j];
      nodes.push_back({k, j, v.value.real(), v.value.imag(), v.tol});
    }
  }
  nlohmann::json flagged = nlohmann::json::array();
  for (int k = 0; k <= depth_; ++k) {
    for (std::size_t j = 0; j < levels_[k].size(); ++j) {
      if (levels_[k][j].flagged) flagged.push_back({k, j});
    }
  }
  return {{"n", n_}, {"depth", depth_}, {"h0", h0_}, {"nodes", nodes}, {"flagged", flagged}};
}

MartingaleTree MartingaleTree::from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int depth = j.at("depth").get<int>();
    if (n < 2 || depth < 1 || count(n, depth) > (std::int64_t{1} << 24)) throw DomainError("bad martingale header");
    std::vector<std::vector<MartingaleNode>> levels(depth + 1);
    for (int k = 0; k <= depth; ++k) levels[k].resize(static_cast<std::size_t>(count(n, k)));
    for (const auto& e : j.at("nodes")) {
      const int k = e.at(0).get<int>();
      const auto idx = e.at(1).get<std::int64_t>();
      if (k < 0 || k > depth || idx < 0 || idx >= static_cast<std::int64_t>(levels[k].size())) {
        throw DomainError("martingale node index out of range");
      }
      levels[k][static_cast<std::size_t>(idx)] = {{e.at(2).get<double>(), e.at(3).get<double>()}, e.at(4).get<double>(),
                                                  false};
    }
    if (j.contains("flagged")) {
      for (const auto& e : j.at("flagged")) {
        levels.at(e.at(0).get<int>()).at(e.at(1).get<std::size_t>()).flagged = true;
      }
    }
    return MartingaleTree(n, depth, j.at("h0").get<double>(), std::move(levels));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed martingale JSON: ") + e.what());
  } catch (const std::out_of_range&) {
    throw DomainError("martingale flag index out of range");
  }
}

MartingaleTree build_martingale(const BlochFunction& b, int n, int depth, double h0, const MartingaleOptions& opt) {
  check_build(b, n, depth, h0);
  std::vector<std::vector<MartingaleNode>> levels(depth + 1);
  for (int k = 0; k <= depth; ++k) {
    const auto c = static_cast<std::size_t>(count(n, k));
    const double w = width(n, k);
    levels[k].resize(c);
    auto& out = levels[k];
    core::parallel_for(
        c,
        [&](std::size_t j) {
          const double a = static_cast<double>(j) * w;
          const Average full = interval_average(b, a, w, h0, opt.quad_rel_tol);
          const Average half = interval_average(b, a, w, 0.5 * h0, opt.quad_rel_tol);
          const double drift = std::abs(full.value - half.value);
          out[j] = {full.value, full.error + drift, drift > opt.check_tol};
        },
        opt.threads);
  }
  return MartingaleTree(n, depth, h0, std::move(levels));
}

double local_variance(const MartingaleTree& tree, IntervalIndex I) {
  if (I.level >= tree.depth()) throw DomainError("local variance needs an interval with children");
  const Complex parent = tree.value(I);
  std::vector<double> terms(static_cast<std::size_t>(tree.n()));
  for (int c = 0; c < tree.n(); ++c) {
    terms[c] = std::norm(tree.value({I.level + 1, I.j * tree.n() + c}) - parent);
  }
  return core::pairwise_sum(std::span<const double>(terms)) / tree.n();
}

VarianceExtremes variance_extremes(const MartingaleTree& tree, int level) {
  if (level < 0 || level >= tree.depth()) throw DomainError("variance extremes need 0 <= level < depth");
  const double logn = std::log(static_cast<double>(tree.n()));
  VarianceExtremes out{INFINITY, 0.0};
  for (std::int64_t j = 0; j < count(tree.n(), level); ++j) {
    const double v = local_variance(tree, {level, j}) / logn;
    out.m = std::min(out.m, v);
    out.M = std::max(out.M, v);
  }
  return out;
}

double compare_box_variance(const BlochFunction& b, int n, IntervalIndex I, double h0, double tol) {
  if (I.level < 0 || I.j < 0 || I.j >= count(n, I.level)) throw DomainError("interval index outside [0, 1]");
  check_build(b, n, I.level + 1, h0);
  const double w = width(n, I.level);
  const double a = static_cast<double>(I.j) * w;
  const Complex parent = interval_average(b, a, w, h0, 1e-13).value;
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    terms[c] = std::norm(interval_average(b, a + c * w / n, w / n, h0, 1e-13).value - parent);
  }
  const double var = core::pairwise_sum(std::span<const double>(terms)) / n;
  const double box = transforms::box_average(b, transforms::NAdicBox{n, I.j, I.level}, tol);
  return std::fabs(var / std::log(static_cast<double>(n)) - box);
}

}  // namespace blochlab::martingale
