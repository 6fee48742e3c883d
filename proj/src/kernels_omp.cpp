#include <omp.h>

#include <cmath>
#include <numbers>

#include "kdsim/kernels.hpp"

namespace kdsim::kernels::omp {

namespace {
using index_t = std::ptrdiff_t;
}

void apply_phase(std::span<cplx> psi, std::span<const double> phase, double scale) {
  const index_t n = static_cast<index_t>(psi.size());
#pragma omp parallel for schedule(static)
  for (index_t j = 0; j < n; ++j) {
    const double a = scale * phase[j];
    psi[j] *= cplx(std::cos(a), -std::sin(a));
  }
}

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  const index_t n = static_cast<index_t>(psi.size());
#pragma omp parallel for schedule(static)
  for (index_t j = 0; j < n; ++j) psi[j] *= factor[j];
}

double norm_squared(std::span<const cplx> psi) {
  const std::size_t n = psi.size();
  double partial[kReductionBlocks] = {};
#pragma omp parallel for schedule(static)
  for (index_t b = 0; b < static_cast<index_t>(kReductionBlocks); ++b) {
    const std::size_t lo = n * static_cast<std::size_t>(b) / kReductionBlocks;
    const std::size_t hi = n * static_cast<std::size_t>(b + 1) / kReductionBlocks;
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += std::norm(psi[j]);
    partial[b] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::vector<cplx> dft_at(std::span<const cplx> samples, std::span<const int> frequencies) {
  const std::size_t n = samples.size();
  const long long nn = static_cast<long long>(n);
  std::vector<cplx> out(frequencies.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (index_t i = 0; i < static_cast<index_t>(frequencies.size()); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
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
#pragma omp parallel for schedule(dynamic, 4)
  for (index_t i = 0; i < static_cast<index_t>(xs.size()); ++i) out[i] = f(xs[i]);
  return out;
}

}  // namespace kdsim::kernels::omp
