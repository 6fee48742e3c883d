#include "kdsim/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kdsim {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream msg;
    msg << name << " must be finite and >= 0 (got " << v << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

void ElectronConstants::validate() const {
  for (auto [v, name] : {std::pair{charge_C, "charge_C"}, std::pair{mass_kg, "mass_kg"},
                         std::pair{hbar_Js, "hbar_Js"},
                         std::pair{speed_of_light_m_per_s, "speed_of_light_m_per_s"}}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError(std::string(name) + " must be finite and > 0");
    }
  }
}

double LaserSetup::wavenumber() const { return 2.0 * std::numbers::pi / wavelength_m; }

double LaserSetup::angular_frequency(const ElectronConstants& consts) const {
  return 2.0 * std::numbers::pi * consts.speed_of_light_m_per_s / wavelength_m;
}

void LaserSetup::validate() const {
  if (!std::isfinite(wavelength_m) || wavelength_m <= 0.0) {
    throw DomainError("wavelength_m must be finite and > 0");
  }
  require_finite_nonneg(field_amplitude_V_per_m, "field_amplitude_V_per_m");
}

DimensionlessSetup derive_scales(const LaserSetup& laser, double interaction_time_s,
                                 const ElectronConstants& consts) {
  laser.validate();
  consts.validate();
  require_finite_nonneg(interaction_time_s, "interaction_time_s");

  const double e = consts.charge_C;
  const double m = consts.mass_kg;
  const double hbar = consts.hbar_Js;
  const double k = laser.wavenumber();
  const double omega = laser.angular_frequency(consts);
  const double field = laser.field_amplitude_V_per_m;

  DimensionlessSetup s;
  s.v0_V = e * field * field / (4.0 * m * omega * omega);
  s.recoil_energy_J = hbar * hbar * k * k / (2.0 * m);
  s.u0 = e * s.v0_V / s.recoil_energy_J;
  s.tau = s.recoil_energy_J * interaction_time_s / hbar;
  s.alpha = 0.5 * s.u0 * s.tau;
  s.wavelength_m = laser.wavelength_m;

  for (double v : {s.v0_V, s.recoil_energy_J, s.u0, s.tau, s.alpha}) {
    if (!std::isfinite(v)) throw DomainError("derived scale is not finite");
  }
  return s;
}

MomentSet MomentSet::dipole_quadrupole(double d_tilde, double q_tilde) {
  return MomentSet{{d_tilde, q_tilde}};
}

double MomentSet::order(std::size_t m) const {
  if (m == 0) return 1.0;
  return m <= q_tilde.size() ? q_tilde[m - 1] : 0.0;
}

bool MomentSet::all_zero() const {
  for (double q : q_tilde) {
    if (q != 0.0) return false;
  }
  return true;
}

MomentSet moments_from_si(double dipole_Cm, double quadrupole_Cm2, double wavenumber,
                          double charge_C) {
  if (!std::isfinite(wavenumber) || wavenumber <= 0.0) {
    throw DomainError("wavenumber must be finite and > 0");
  }
  if (!std::isfinite(dipole_Cm) || !std::isfinite(quadrupole_Cm2) || !std::isfinite(charge_C) ||
      charge_C <= 0.0) {
    throw DomainError("moments_from_si: non-finite input");
  }
  return MomentSet::dipole_quadrupole(dipole_Cm * wavenumber / charge_C,
                                      quadrupole_Cm2 * wavenumber * wavenumber / charge_C);
}

double PotentialSpec::amplitude() const { return std::hypot(a_c, a_s); }

// U(x) = sum_m q_m/m! d^m/dx^m [1 + cos 2x] with q_0 = 1, and
// d^m/dx^m cos(2x) = 2^m cos(2x + m*pi/2).
PotentialSpec build_potential(const MomentSet& moments) {
  PotentialSpec spec{1.0, 1.0, 0.0};
  double factor = 1.0;  // 2^m / m!
  for (std::size_t m = 1; m <= moments.max_order(); ++m) {
    factor *= 2.0 / static_cast<double>(m);
    const double term = moments.order(m) * factor;
    switch (m % 4) {
      case 0: spec.a_c += term; break;
      case 1: spec.a_s -= term; break;
      case 2: spec.a_c -= term; break;
      case 3: spec.a_s += term; break;
    }
  }
  return spec;
}

double evaluate_potential(const PotentialSpec& spec, double x_scaled) {
  return spec.offset + spec.a_c * std::cos(2.0 * x_scaled) + spec.a_s * std::sin(2.0 * x_scaled);
}

RegimeReport check_regime(const DimensionlessSetup& setup, const MomentSet& moments) {
  RegimeReport r;
  r.raman_nath_ratio = setup.u0;
  r.raman_nath_ok = setup.u0 >= kRamanNathOk;
  if (!r.raman_nath_ok) {
    std::ostringstream msg;
    if (setup.u0 >= kRamanNathMarginal) {
      msg << "marginal Raman-Nath regime: u0 = " << setup.u0 << " in [" << kRamanNathMarginal
          << ", " << kRamanNathOk << ")";
    } else {
      msg << "outside Raman-Nath regime: u0 = " << setup.u0 << " < " << kRamanNathMarginal;
    }
    r.notes.push_back(msg.str());
  }

  // Relative intensities 1, |q_1|, |q_2|, ... must be strictly decreasing.
  // A vanishing higher moment is subordinate to every lower one.
  r.moment_ratios.push_back(1.0);
  for (double q : moments.q_tilde) r.moment_ratios.push_back(std::abs(q));
  for (std::size_t m = 1; m < r.moment_ratios.size(); ++m) {
    const double qm = r.moment_ratios[m];
    if (!std::isfinite(qm)) {
      r.ordering_ok = false;
      continue;
    }
    if (qm == 0.0) continue;
    for (std::size_t n = 0; n < m; ++n) {
      if (r.moment_ratios[n] == 0.0) continue;
      if (!(qm < r.moment_ratios[n])) {
        r.ordering_ok = false;
        std::ostringstream msg;
        msg << "multipole ordering violated: |q_" << m << "| = " << qm << " >= |q_" << n
            << "| = " << r.moment_ratios[n];
        r.notes.push_back(msg.str());
        break;
      }
    }
  }

  r.explorable_length_m = setup.wavelength_m;
  return r;
}

}  // namespace kdsim
