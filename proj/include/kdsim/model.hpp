#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdsim {

/// Raised for inputs outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical invariant (norm, aliasing) is violated at runtime.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fundamental constants, CODATA 2018 exact/recommended values by default.
struct ElectronConstants {
  double charge_C = 1.602176634e-19;
  double mass_kg = 9.1093837015e-31;
  double hbar_Js = 1.054571817e-34;
  double speed_of_light_m_per_s = 299792458.0;

  void validate() const;
  friend bool operator==(const ElectronConstants&, const ElectronConstants&) = default;
};

struct LaserSetup {
  double wavelength_m = 0.0;
  double field_amplitude_V_per_m = 0.0;

  double wavenumber() const;  // 2*pi/lambda [1/m]
  double angular_frequency(const ElectronConstants& consts) const;  // 2*pi*c/lambda [rad/s]
  void validate() const;
};

/// Interaction reduced to scaled quantities: lengths in 1/k_L, energies in
/// the recoil energy, time as tau = eps*t/hbar.
struct DimensionlessSetup {
  double u0 = 0.0;     // e*V0 / eps
  double tau = 0.0;    // eps*t / hbar
  double alpha = 0.0;  // u0*tau/2, the grating phase
  double recoil_energy_J = 0.0;
  double v0_V = 0.0;
  std::optional<double> wavelength_m;  // known only when built from SI input
};

DimensionlessSetup derive_scales(const LaserSetup& laser, double interaction_time_s,
                                 const ElectronConstants& consts = {});

/// Scaled multipole moments q_m = Q_m k_L^m / e, stored for m = 1..M.
struct MomentSet {
  std::vector<double> q_tilde;

  static MomentSet dipole_quadrupole(double d_tilde, double q_tilde);

  std::size_t max_order() const { return q_tilde.size(); }
  /// q_m for m >= 1; zero beyond max_order.
  double order(std::size_t m) const;
  double dipole() const { return order(1); }
  double quadrupole() const { return order(2); }
  bool all_zero() const;

  friend bool operator==(const MomentSet&, const MomentSet&) = default;
};

MomentSet moments_from_si(double dipole_Cm, double quadrupole_Cm2, double wavenumber,
                          double charge_C = ElectronConstants{}.charge_C);

/// U_P(x) / (e V0 / 2) = offset + a_c cos(2x) + a_s sin(2x), x in units of 1/k_L.
struct PotentialSpec {
  double offset = 1.0;
  double a_c = 1.0;
  double a_s = 0.0;

  /// Amplitude of the modulated part, sqrt(a_c^2 + a_s^2).
  double amplitude() const;
};

PotentialSpec build_potential(const MomentSet& moments);
double evaluate_potential(const PotentialSpec& spec, double x_scaled);

struct RegimeReport {
  double raman_nath_ratio = 0.0;
  bool raman_nath_ok = false;
  std::vector<double> moment_ratios;  // {1, |q_1|, |q_2|, ...}
  bool ordering_ok = true;  // each nonzero ratio below every earlier nonzero one
  std::optional<double> explorable_length_m;
  std::vector<std::string> notes;
};

inline constexpr double kRamanNathOk = 100.0;
inline constexpr double kRamanNathMarginal = 10.0;

RegimeReport check_regime(const DimensionlessSetup& setup, const MomentSet& moments);

}  // namespace kdsim
