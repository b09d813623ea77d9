#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blochlab/core/interval.hpp"
#include "blochlab/core/rational.hpp"

namespace blochlab::certify {

using core::Interval;
using core::Rational;

/// An enclosure with its decimal endpoints. `box` is a double interval that
/// contains the decimal endpoints, so it is sound even when the strings carry
/// more digits than a double.
struct Enclosure {
  Interval box;
  std::string lo;
  std::string hi;

  static Enclosure from_interval(const Interval& x);
  static Enclosure from_strings(std::string lo, std::string hi);
  nlohmann::json to_json() const { return nlohmann::json::array({lo, hi}); }
  static Enclosure from_json(const nlohmann::json& j);
};

/// Sum over k >= K of x^(k+1) / (2k+2) ((k+2)/2)^2 ((k+2)/k)^k with x = r^2:
/// exact terms below `cutoff`, then the remainder with (1 + 2/k)^k <= e^2
/// summed in closed form. Precision in bits; 53 uses double intervals.
Enclosure tail_bound(const Rational& r, int K, int cutoff = 60, long precision = 53);

/// (1/(1-s2)^2 - 4 s2^2) / s2^3: the bound on |q3|^2 when |q2| >= 2.
Enclosure parseval_q3_bound(const Rational& s2, long precision = 53);

/// 2 + 2 sqrt(1 - q0^2) for q0 in [0, 1].
Interval schwarz_q2_bound(const Interval& q0_abs);

struct ScanOptions {
  int grid = 1000;       // initial cells on [0, 1)
  long precision = 53;
  int max_depth = 40;    // bisection levels below the initial grid
  double min_width = 1e-12;  // target width of the minimum enclosure
  int threads = 0;
};

struct ScanResult {
  Enclosure margin;      // encloses the minimum margin over a in [0, 1)
  Interval argmin;       // cell holding the smallest sampled margin
  bool verified = false;  // margin >= 0 (b1) or > 0 (b4) on every cell
  long cells = 0;        // cell evaluations
  int depth = 0;         // deepest bisection level used
  nlohmann::json to_json() const;
};

/// min over a of r^2/2 - r^2/2 q0^2 - r^4/4 q1^2 for the special functions.
/// Equality holds at a = 1/sqrt(3), so the check is margin >= 0.
/// Throws InconclusiveError when a cell stays undecided at max depth.
ScanResult scan_special_b1(const Rational& r, const ScanOptions& opt = {});
/// min over a of r^2/2 + 17/24 r^6 - (r^2/2 q0^2 + r^4/4 q1^2 + r^6/6 (2 + 2 sqrt(1 - q0^2))^2); must be > 0.
ScanResult scan_special_b4(const Rational& r, const ScanOptions& opt = {});

enum class Status { verified, failed };
const char* to_string(Status s);

struct Certificate {
  static constexpr int kVersion = 1;
  Rational r{2, 5};
  Enclosure branch1;
  Enclosure branch2;
  Enclosure tail_K3;
  Enclosure tail_K4;
  int tail_cutoff = 60;
  Enclosure q3_sq_bound;
  nlohmann::json scan_b1;
  nlohmann::json scan_b4;
  Enclosure scan_b1_margin;
  Enclosure scan_b4_margin;
  Enclosure final_bound;
  std::string claim;
  Status status = Status::failed;
  std::string failing_component;  // empty when verified
  long precision = 53;
  int grid = 1000;

  nlohmann::json to_json() const;
  static Certificate from_json(const nlohmann::json& j);
};

struct CertifyOptions {
  long precision = 53;
  int grid = 1000;
  int cutoff = 60;
  int threads = 0;
};

/// Both branch bounds for Sigma_B^2, the sub-verifications they rely on, and
/// the verdict final = max(branch1, branch2) <= 0.8998 < 0.9.
Certificate certify_sigma(const Rational& r = Rational(2, 5), const CertifyOptions& opt = {});

}  // namespace blochlab::certify
