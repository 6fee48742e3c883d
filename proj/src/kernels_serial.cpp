#include <cmath>
#include <numbers>

#include "kdsim/kernels.hpp"

namespace kdsim::kernels::serial {

void apply_phase(std::span<cplx> psi, std::span<const double> phase, double scale) {
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double a = scale * phase[j];
    psi[j] *= cplx(std::cos(a), -std::sin(a));
  }
}

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= factor[j];
}

double norm_squared(std::span<const cplx> psi) {
  const std::size_t n = psi.size();
  double partial[kReductionBlocks] = {};
  for (std::size_t b = 0; b < kReductionBlocks; ++b) {
    const std::size_t lo = n * b / kReductionBlocks;
    const std::size_t hi = n * (b + 1) / kReductionBlocks;
    for (std::size_t j = lo; j < hi; ++j) partial[b] += std::norm(psi[j]);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::vector<cplx> dft_at(std::span<const cplx> samples, std::span<const int> frequencies) {
  const std::size_t n = samples.size();
  const long long nn = static_cast<long long>(n);
  std::vector<cplx> out(frequencies.size());
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // reduce m*j mod N first so the angle stays exact for large products
      long long r = (static_cast<long long>(frequencies[i]) * static_cast<long long>(j)) % nn;
      if (r < 0) r += nn;
      const double a = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
      acc += samples[j] * cplx(std::cos(a), -std::sin(a));
    }
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<double> evaluate(std::span<const double> xs, const std::function<double(double)>& f) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return out;
}

}  // namespace kdsim::kernels::serial
