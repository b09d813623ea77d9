#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "blochlab/core/bloch_function.hpp"

namespace blochlab::martingale {

using core::BlochFunction;
using core::Complex;

/// n-adic interval [j n^-level, (j + 1) n^-level] of [0, 1].
struct IntervalIndex {
  int level = 0;
  std::int64_t j = 0;
  bool operator==(const IntervalIndex&) const = default;
};

struct MartingaleNode {
  Complex value;
  double tol = 0.0;      // quadrature error plus |B(h0) - B(h0/2)|
  bool flagged = false;  // the two heights disagree beyond the build tolerance
};

struct MartingaleOptions {
  double quad_rel_tol = 1e-13;
  double check_tol = 1e-6;  // allowed |B(h0) - B(h0/2)| per node
  int threads = 0;
};

/// Interval averages B_I = (1/|I|) int_I b(x + i h0) dx of a half-plane
/// function, every node at the same height h0, so B_I is the mean of its
/// children up to quadrature error.
class MartingaleTree {
 public:
  MartingaleTree(int n, int depth, double h0, std::vector<std::vector<MartingaleNode>> levels);

  int n() const { return n_; }
  int depth() const { return depth_; }
  double h0() const { return h0_; }
  const MartingaleNode& node(IntervalIndex I) const;
  Complex value(IntervalIndex I) const { return node(I).value; }
  std::size_t flagged_count() const;

  nlohmann::json to_json() const;
  static MartingaleTree from_json(const nlohmann::json& j);

 private:
  int n_;
  int depth_;
  double h0_;
  std::vector<std::vector<MartingaleNode>> levels_;
};

/// Nodes at levels 0..depth; needs n >= 2, depth >= 1, 0 < h0 < n^-depth.
MartingaleTree build_martingale(const BlochFunction& b, int n, int depth, double h0,
                                const MartingaleOptions& opt = {});

/// (1/n) sum_j |B_{I_j} - B_I|^2 over the children of I.
double local_variance(const MartingaleTree& tree, IntervalIndex I);

struct VarianceExtremes {
  double m = 0.0;
  double M = 0.0;
};
/// min and max of local_variance / log n over the intervals of one level.
VarianceExtremes variance_extremes(const MartingaleTree& tree, int level);

/// |var_I B / log n - box average of |2b'/rho|^2 over the box above I|.
double compare_box_variance(const BlochFunction& b, int n, IntervalIndex I, double h0, double tol = 1e-9);

}  // namespace blochlab::martingale
