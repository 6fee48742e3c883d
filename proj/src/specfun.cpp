#include "kdsim/specfun.hpp"

#include <algorithm>
#include <cmath>

#include "kdsim/model.hpp"

namespace kdsim {

namespace {

constexpr double kRescaleAbove = 1e200;
constexpr double kTinyArgument = 1e-8;

// Below kTinyArgument two series terms are exact to double precision.
std::vector<double> tiny_argument_row(int order_max, double x) {
  std::vector<double> out(static_cast<std::size_t>(order_max) + 1, 0.0);
  const double half = 0.5 * x;
  double lead = 1.0;  // (x/2)^n / n!
  for (int n = 0; n <= order_max; ++n) {
    if (n > 0) lead *= half / n;
    if (lead == 0.0) break;
    out[static_cast<std::size_t>(n)] = lead * (1.0 - half * half / (n + 1));
  }
  return out;
}

// Miller's algorithm for x > 0: recur J_{k-1} = (2k/x) J_k - J_{k+1} downward
// from a start index far above order_max, then normalize with
// J_0 + 2 * sum_{k>=1} J_{2k} = 1. Past the turning point n ~ x the
// recessive solution decays like exp(-c (n - x)^{3/2} / sqrt(x)), hence the
// cube-root term.
std::vector<double> miller_row(int order_max, double x) {
  const int margin = static_cast<int>(std::ceil(std::max(x, 20.0) + 12.0 * std::cbrt(x))) + 30;
  int start = order_max + margin;
  if (start % 2 != 0) ++start;

  std::vector<double> out(static_cast<std::size_t>(order_max) + 1, 0.0);
  double next = 0.0;     // J_{k+1}
  double current = 1e-300;  // J_k, arbitrary seed at k = start
  double norm = 0.0;
  const double two_over_x = 2.0 / x;

  for (int k = start; k >= 1; --k) {
    const double prev = k * two_over_x * current - next;
    next = current;
    current = prev;  // now J_{k-1}
    const int idx = k - 1;
    if (idx <= order_max) out[static_cast<std::size_t>(idx)] = current;
    if (idx > 0 && idx % 2 == 0) norm += 2.0 * current;
    if (std::abs(current) > kRescaleAbove) {
      const double s = 1.0 / kRescaleAbove;
      current *= s;
      next *= s;
      norm *= s;
      for (int j = idx; j <= order_max; ++j) out[static_cast<std::size_t>(j)] *= s;
    }
  }
  norm += current;  // J_0
  for (double& v : out) v /= norm;
  return out;
}

std::vector<double> positive_row(int order_max, double ax) {
  if (ax == 0.0) {
    std::vector<double> out(static_cast<std::size_t>(order_max) + 1, 0.0);
    out[0] = 1.0;
    return out;
  }
  if (ax < kTinyArgument) return tiny_argument_row(order_max, ax);
  return miller_row(order_max, ax);
}

}  // namespace

BesselRow bessel_row(int order_max, double x) {
  if (order_max < 0) throw DomainError("bessel_row: order_max must be >= 0");
  if (!std::isfinite(x)) throw DomainError("bessel_row: argument must be finite");

  BesselRow row{order_max, x, positive_row(order_max, std::abs(x))};
  if (x < 0.0) {
    for (int n = 1; n <= order_max; n += 2) row.values[static_cast<std::size_t>(n)] *= -1.0;
  }
  return row;
}

double bessel_j(int n, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j: argument must be finite");
  const int an = n < 0 ? -n : n;
  const double value = positive_row(an, std::abs(x))[static_cast<std::size_t>(an)];
  const bool odd = (an % 2) != 0;
  const bool flip = odd && ((n < 0) != (x < 0.0));
  return flip ? -value : value;
}

}  // namespace kdsim
