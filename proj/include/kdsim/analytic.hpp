#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "kdsim/model.hpp"

namespace kdsim {

enum class PatternGenerator { pointlike, distribution, closed_form, grating_oracle, tdse };

std::string_view to_string(PatternGenerator g);

/// Probabilities P_p for diffraction orders p in [-cutoff, cutoff]. Order p
/// carries momentum k_0 + 2p (units of k_L).
struct DiffractionPattern {
  int cutoff = 0;
  std::vector<double> probabilities;  // index p + cutoff
  double alpha = 0.0;
  MomentSet moments;
  PatternGenerator generator = PatternGenerator::pointlike;
  double tail_mass = 0.0;  // max(0, 1 - sum P_p)
  bool cutoff_warning = false;
  std::vector<std::string> notes;

  double at(int p) const;  // zero outside [-cutoff, cutoff]
  bool has(int p) const { return p >= -cutoff && p <= cutoff; }
  double total() const;
};

inline constexpr int kCutoffMargin = 30;
inline constexpr double kTailWarning = 1e-8;

/// ceil(|argument|) + 30.
int default_cutoff(double argument);

DiffractionPattern pointlike_pattern(double alpha, int cutoff);
DiffractionPattern pointlike_pattern(double alpha);

/// Whose phase convention to use for the transmitted amplitudes.
/// `positive` is exp(+i U t / hbar); `physical` is exp(-i U t / hbar).
enum class PhaseConvention { positive, physical };

/// Coefficients c_p of the double Bessel sum for dipole + quadrupole moments,
/// indexed p + cutoff.
std::vector<std::complex<double>> distribution_amplitudes(double alpha, const MomentSet& moments,
                                                          int cutoff,
                                                          PhaseConvention convention);

/// Raises DomainError when moments carry orders above 2.
DiffractionPattern distribution_pattern(double alpha, const MomentSet& moments, int cutoff);
DiffractionPattern distribution_pattern(double alpha, const MomentSet& moments);

double effective_amplitude(const MomentSet& moments);

DiffractionPattern closed_form_pattern(double alpha, const MomentSet& moments, int cutoff);
DiffractionPattern closed_form_pattern(double alpha, const MomentSet& moments);

/// Discrete Fourier analysis of the unimodular transmission factor sampled
/// on grid_size points over one period. grid_size must be a power of two
/// and at least 4*cutoff + 16.
DiffractionPattern grating_oracle(const PotentialSpec& spec, double alpha, int grid_size,
                                  int cutoff);

struct PatternDistance {
  double max_abs = 0.0;
  double total_variation = 0.0;
};

/// Compared over the orders both patterns carry.
PatternDistance pattern_distance(const DiffractionPattern& a, const DiffractionPattern& b);

}  // namespace kdsim
