#include "blochlab/core/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {
namespace detail {

// QUADPACK's qk15 constants.
namespace {
constexpr double kXgk[7] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace

const double* Gk15::abscissae() { return kXgk; }
const double* Gk15::kronrod_weights() { return kWgk; }
const double* Gk15::gauss_weights() { return kWg; }

}  // namespace detail

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs n >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<GaussRule>();
    const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative zeros, ascending
    auto weight = [n](double x) {
      const double dp = boost::math::legendre_p_prime<double>(n, x);
      return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
      if (*it == 0.0) continue;
      rule->nodes.push_back(-*it);
      rule->weights.push_back(weight(*it));
    }
    if (n % 2 == 1) {
      rule->nodes.push_back(0.0);
      rule->weights.push_back(weight(0.0));
    }
    for (double z : zeros) {
      if (z == 0.0) continue;
      rule->nodes.push_back(z);
      rule->weights.push_back(weight(z));
    }
    slot = std::move(rule);
  }
  return *slot;
}

}  // namespace blochlab::core
