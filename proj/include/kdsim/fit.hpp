#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kdsim/model.hpp"

namespace kdsim {

struct ObservedRecord {
  int order = 0;
  double value = 0.0;
  double sigma = 1.0;
};

/// Measured (or synthetic) order probabilities at one grating phase alpha.
struct ObservedPattern {
  double alpha = 0.0;
  std::vector<ObservedRecord> records;

  void validate() const;
};

/// Sum over records of (value - J_p(alpha r)^2)^2 / sigma^2.
double chi_square(const ObservedPattern& obs, double r_eff);

struct ScanPoint {
  double r_eff = 0.0;
  double chi2 = 0.0;
};

struct FitOptions {
  double r_min = 0.0;
  double r_max = 2.0;
  double delta_chi2 = 1.0;
  int scan_points = 401;
  double tolerance = 1e-9;  // golden-section bracket width
};

struct FitResult {
  double r_eff_hat = 0.0;
  double chi2_min = 0.0;
  int dof = 0;
  double delta_chi2 = 1.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<ScanPoint> scan;
  std::vector<double> local_minima;  // refined positions, global one included
  bool unbounded = false;            // minimum or CI edge sits on a scan bound
  bool multimodal = false;
  bool misfit = false;               // chi2_min/dof beyond 3 standard deviations
  std::vector<std::string> notes;
};

inline constexpr int kMinScanPoints = 200;

FitResult fit_effective_amplitude(const ObservedPattern& obs, const FitOptions& options = {});

/// Shared r_eff minimizing the summed chi-square over all datasets.
FitResult joint_fit(const std::vector<ObservedPattern>& datasets, const FitOptions& options = {});

/// Deterministic golden-section minimization of f over [a, b].
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tolerance);

/// Samples of the band r_lo <= sqrt((1 - 2q)^2 + 4d^2) <= r_hi inside
/// 0 <= d < 1, 0 <= q < 1, as two arcs (inner radius then outer radius).
struct MomentRegion {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<std::pair<double, double>> inner;  // (d_tilde, q_tilde)
  std::vector<std::pair<double, double>> outer;
  bool empty = false;
  std::vector<std::string> notes;

  bool contains(double d_tilde, double q_tilde) const;
};

/// Relative slack applied when re-checking emitted samples against the band.
inline constexpr double kBandSlack = 1e-12;

MomentRegion moment_region(const FitResult& fit, int n_samples);

// Synthetic data.

struct GaussianNoise {
  double relative_sigma = 0.01;  // sigma_p = max(relative_sigma * P_p, floor)
  double sigma_floor = 1e-4;
};

/// Noise-free when noise.relative_sigma == 0 (sigmas still floor-limited).
ObservedPattern synthesize_gaussian(double alpha, double r_eff, const std::vector<int>& orders,
                                    const GaussianNoise& noise, std::uint64_t seed);

/// One multinomial draw of `shots` detections; counts landing outside the
/// requested orders are dropped.
ObservedPattern synthesize_counts(double alpha, double r_eff, const std::vector<int>& orders,
                                  std::int64_t shots, std::uint64_t seed);

}  // namespace kdsim
