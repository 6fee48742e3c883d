#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kdsim/analytic.hpp"
#include "kdsim/model.hpp"

namespace kdsim {

/// Periodic grid over n_periods periods of the potential (period pi in
/// units of 1/k_L). Wavenumbers are multiples of 2/n_periods.
struct Grid1D {
  int n_points = 1024;
  int n_periods = 8;

  void validate() const;
  double box_length() const;
  double spacing() const;
  double position(int j) const;
  /// Signed FFT mode of storage index j, in [-n/2, n/2).
  int mode(int j) const;
  double wavenumber_of_mode(int m) const { return 2.0 * m / n_periods; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

struct WaveState {
  Grid1D grid;
  std::vector<std::complex<double>> amplitudes;
  int base_mode = 0;  // k_0 = 2 * base_mode / n_periods
  double norm = 1.0;  // sum |psi|^2 dx at construction or last propagation

  double base_wavenumber() const { return grid.wavenumber_of_mode(base_mode); }
  double measure_norm() const;
};

/// Integer mode for a wavenumber; throws if it is not a multiple of 2/n_periods.
int mode_for_wavenumber(const Grid1D& grid, double k0);

WaveState init_plane_wave(const Grid1D& grid, int base_mode);

/// |psi|^2 has standard deviation sigma around `center` (minimum-image distance).
WaveState init_gaussian(const Grid1D& grid, double center, double sigma, double k0);

enum class Envelope { rectangular, sin2_ramp };

struct PropagationConfig {
  double d_tau = 0.0;
  int n_steps = 0;
  bool include_kinetic = true;
  Envelope envelope = Envelope::rectangular;
  double ramp_fraction = 0.1;  // sin2_ramp: rise and fall each take this fraction
  int snapshot_every = 0;      // 0 disables snapshots

  double tau_total() const { return d_tau * n_steps; }
};

inline constexpr double kDefaultPhasePerStep = 0.05;
inline constexpr double kMaxPhasePerStep = 0.1;
inline constexpr double kNormDriftLimit = 1e-9;

/// Steps sized so the potential phase per step stays at or below max_phase.
PropagationConfig make_propagation_config(const DimensionlessSetup& setup,
                                          const PotentialSpec& spec,
                                          double max_phase = kDefaultPhasePerStep);

/// Envelope factor in [0, 1] at time t of a pulse lasting `total`.
double envelope_value(const PropagationConfig& config, double t, double total);

struct PropagationDiagnostics {
  double phase_per_step = 0.0;
  double max_step_norm_drift = 0.0;
  double final_norm_drift = 0.0;
  std::vector<std::string> warnings;
};

using SnapshotSink = std::function<void(int step, const WaveState&)>;

/// Strang splitting exp(-iV dt/2) F^-1 exp(-i k^2 dt) F exp(-iV dt/2) in
/// recoil units, V = envelope(t) * u0 * (a_c cos 2x + a_s sin 2x) / 2. The
/// constant offset only adds a global phase and is omitted.
WaveState propagate(const WaveState& state, const PotentialSpec& spec,
                    const DimensionlessSetup& setup, const PropagationConfig& config,
                    PropagationDiagnostics* diagnostics = nullptr,
                    const SnapshotSink& snapshot = {});

/// Momentum spectrum binned into orders at k_0 + 2p with half-open bins of
/// width 2. Without an explicit cutoff every grid mode is binned.
DiffractionPattern order_probabilities(const WaveState& state,
                                       std::optional<int> cutoff = std::nullopt);

/// |c_m|^2 per grid mode in storage order, normalized to sum 1 for a unit-norm state.
std::vector<double> momentum_spectrum(const WaveState& state);

}  // namespace kdsim
