#pragma once

// Data-parallel inner loops. `serial` is the reference implementation kept
// for testing and benchmarking; `omp` is what the library calls. Both
// namespaces expose identical signatures and must agree to rounding.

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace kdsim::kernels {

using cplx = std::complex<double>;

namespace serial {

/// psi[j] *= exp(-i * scale * phase[j])
void apply_phase(std::span<cplx> psi, std::span<const double> phase, double scale);

/// psi[j] *= factor[j]
void multiply(std::span<cplx> psi, std::span<const cplx> factor);

/// sum_j |psi[j]|^2, accumulated over fixed blocks so the result does not
/// depend on the thread count.
double norm_squared(std::span<const cplx> psi);

/// (1/N) sum_j samples[j] * exp(-i * 2 pi * m_j * j / N) for each requested
/// integer frequency m (direct sum, no FFT).
std::vector<cplx> dft_at(std::span<const cplx> samples, std::span<const int> frequencies);

/// f(x_i) for every x_i.
std::vector<double> evaluate(std::span<const double> xs, const std::function<double(double)>& f);

}  // namespace serial

namespace omp {

void apply_phase(std::span<cplx> psi, std::span<const double> phase, double scale);
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
double norm_squared(std::span<const cplx> psi);
std::vector<cplx> dft_at(std::span<const cplx> samples, std::span<const int> frequencies);
std::vector<double> evaluate(std::span<const double> xs, const std::function<double(double)>& f);

}  // namespace omp

/// Number of fixed accumulation blocks used by norm_squared.
inline constexpr std::size_t kReductionBlocks = 64;

}  // namespace kdsim::kernels
