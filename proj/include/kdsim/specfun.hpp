#pragma once

#include <vector>

namespace kdsim {

/// J_0(x) .. J_{order_max}(x).
struct BesselRow {
  int order_max = 0;
  double argument = 0.0;
  std::vector<double> values;

  double operator[](int n) const { return values[static_cast<std::size_t>(n)]; }
};

/// Integer-order Bessel function of the first kind. Negative orders and
/// arguments use J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
double bessel_j(int n, double x);

/// Whole row from a single backward (Miller) recurrence.
BesselRow bessel_row(int order_max, double x);

}  // namespace kdsim
