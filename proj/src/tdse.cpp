#include "kdsim/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "kdsim/kernels.hpp"

namespace kdsim {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(cplx* p) const { fftw_free(p); }
};

/// In-place unnormalized transforms over an fftw_malloc'd buffer.
class FftBuffer {
 public:
  explicit FftBuffer(int n)
      : n_(n), data_(static_cast<cplx*>(fftw_malloc(sizeof(cplx) * static_cast<std::size_t>(n)))) {
    if (!data_) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    auto* raw = reinterpret_cast<fftw_complex*>(data_.get());
    forward_ = fftw_plan_dft_1d(n, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::span<cplx> data() { return {data_.get(), static_cast<std::size_t>(n_)}; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  int n_;
  std::unique_ptr<cplx, FftwFree> data_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> potential_profile(const Grid1D& grid, const PotentialSpec& spec, double u0) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_points));
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.position(j);
    v[static_cast<std::size_t>(j)] =
        0.5 * u0 * (spec.a_c * std::cos(2.0 * x) + spec.a_s * std::sin(2.0 * x));
  }
  return v;
}

void validate_config(const PropagationConfig& c, const DimensionlessSetup& setup) {
  if (!std::isfinite(c.d_tau) || c.d_tau < 0.0) throw DomainError("d_tau must be finite and >= 0");
  if (c.n_steps < 0) throw DomainError("n_steps must be >= 0");
  if (c.snapshot_every < 0) throw DomainError("snapshot_every must be >= 0");
  if (c.envelope == Envelope::sin2_ramp && !(c.ramp_fraction > 0.0 && c.ramp_fraction <= 0.5)) {
    throw DomainError("ramp_fraction must lie in (0, 0.5]");
  }
  const double total = c.tau_total();
  if (std::abs(total - setup.tau) > 1e-9 * std::max(1.0, setup.tau)) {
    std::ostringstream msg;
    msg << "n_steps * d_tau = " << total << " does not match tau = " << setup.tau;
    throw DomainError(msg.str());
  }
}

}  // namespace

void Grid1D::validate() const {
  if (n_periods < 1) throw DomainError("n_periods must be >= 1");
  if (!is_power_of_two(n_points)) throw DomainError("n_points must be a power of two");
  if (n_points < 64 * n_periods) {
    std::ostringstream msg;
    msg << "n_points must be >= 64 * n_periods = " << 64 * n_periods;
    throw DomainError(msg.str());
  }
}

double Grid1D::box_length() const { return n_periods * std::numbers::pi; }
double Grid1D::spacing() const { return box_length() / n_points; }
double Grid1D::position(int j) const { return j * spacing(); }
int Grid1D::mode(int j) const { return j < n_points / 2 ? j : j - n_points; }

double WaveState::measure_norm() const {
  return kernels::omp::norm_squared(amplitudes) * grid.spacing();
}

int mode_for_wavenumber(const Grid1D& grid, double k0) {
  const double m = k0 * grid.n_periods / 2.0;
  const double rounded = std::round(m);
  if (!std::isfinite(m) || std::abs(m - rounded) > 1e-9 * std::max(1.0, std::abs(m))) {
    std::ostringstream msg;
    msg << "wavenumber " << k0 << " is not a multiple of 2/n_periods = " << 2.0 / grid.n_periods;
    throw DomainError(msg.str());
  }
  return static_cast<int>(rounded);
}

WaveState init_plane_wave(const Grid1D& grid, int base_mode) {
  grid.validate();
  if (base_mode < -grid.n_points / 2 || base_mode >= grid.n_points / 2) {
    throw DomainError("plane-wave mode outside the grid's Nyquist range");
  }
  WaveState s{grid, std::vector<cplx>(static_cast<std::size_t>(grid.n_points)), base_mode, 1.0};
  const double amp = 1.0 / std::sqrt(grid.box_length());
  const double k0 = grid.wavenumber_of_mode(base_mode);
  for (int j = 0; j < grid.n_points; ++j) {
    s.amplitudes[static_cast<std::size_t>(j)] = std::polar(amp, k0 * grid.position(j));
  }
  s.norm = s.measure_norm();
  return s;
}

WaveState init_gaussian(const Grid1D& grid, double center, double sigma, double k0) {
  grid.validate();
  const double length = grid.box_length();
  if (!std::isfinite(sigma) || sigma <= 3.0 * grid.spacing() || sigma > length / 6.0) {
    std::ostringstream msg;
    msg << "sigma must lie in (" << 3.0 * grid.spacing() << ", " << length / 6.0 << "]";
    throw DomainError(msg.str());
  }
  if (!std::isfinite(center)) throw DomainError("center must be finite");
  const int base = mode_for_wavenumber(grid, k0);
  if (base < -grid.n_points / 2 || base >= grid.n_points / 2) {
    throw DomainError("carrier wavenumber outside the grid's Nyquist range");
  }
  const double kc = grid.wavenumber_of_mode(base);

  WaveState s{grid, std::vector<cplx>(static_cast<std::size_t>(grid.n_points)), base, 1.0};
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.position(j);
    double d = std::remainder(x - center, length);  // minimum image
    const double env = std::exp(-d * d / (4.0 * sigma * sigma));
    s.amplitudes[static_cast<std::size_t>(j)] = std::polar(env, kc * x);
  }
  const double scale = 1.0 / std::sqrt(s.measure_norm());
  for (auto& a : s.amplitudes) a *= scale;
  s.norm = s.measure_norm();
  return s;
}

PropagationConfig make_propagation_config(const DimensionlessSetup& setup,
                                          const PotentialSpec& spec, double max_phase) {
  if (!(max_phase > 0.0)) throw DomainError("max_phase must be > 0");
  PropagationConfig c;
  if (setup.tau <= 0.0) return c;
  const double vmax = 0.5 * setup.u0 * spec.amplitude();
  c.n_steps = std::max(1, static_cast<int>(std::ceil(setup.tau * vmax / max_phase)));
  c.d_tau = setup.tau / c.n_steps;
  return c;
}

double envelope_value(const PropagationConfig& config, double t, double total) {
  if (config.envelope == Envelope::rectangular || total <= 0.0) return 1.0;
  const double ramp = config.ramp_fraction * total;
  const double s = std::min(t, total - t);
  if (s >= ramp) return 1.0;
  if (s <= 0.0) return 0.0;
  const double v = std::sin(0.5 * std::numbers::pi * s / ramp);
  return v * v;
}

WaveState propagate(const WaveState& state, const PotentialSpec& spec,
                    const DimensionlessSetup& setup, const PropagationConfig& config,
                    PropagationDiagnostics* diagnostics, const SnapshotSink& snapshot) {
  state.grid.validate();
  validate_config(config, setup);
  if (state.amplitudes.size() != static_cast<std::size_t>(state.grid.n_points)) {
    throw DomainError("state size does not match its grid");
  }

  PropagationDiagnostics diag;
  const Grid1D& grid = state.grid;
  const double total = config.tau_total();
  const double initial_norm = state.measure_norm();
  const std::vector<double> profile = potential_profile(grid, spec, setup.u0);

  diag.phase_per_step = config.d_tau * 0.5 * setup.u0 * spec.amplitude();
  if (diag.phase_per_step > kMaxPhasePerStep) {
    std::ostringstream msg;
    msg << "potential phase per step " << diag.phase_per_step << " rad exceeds "
        << kMaxPhasePerStep;
    diag.warnings.push_back(msg.str());
  }

  const bool want_snapshots = snapshot && config.snapshot_every > 0;
  WaveState out = state;

  if (!config.include_kinetic) {
    // Potential alone commutes with itself: apply the accumulated phase once.
    double integral = 0.0;
    for (int s = 0; s < config.n_steps; ++s) {
      integral += envelope_value(config, (s + 0.5) * config.d_tau, total) * config.d_tau;
      if (want_snapshots && (s + 1) % config.snapshot_every == 0) {
        WaveState snap = state;
        kernels::omp::apply_phase(snap.amplitudes, profile, integral);
        snapshot(s + 1, snap);
      }
    }
    kernels::omp::apply_phase(out.amplitudes, profile, integral);
  } else {
    const auto n = static_cast<std::size_t>(grid.n_points);
    std::vector<cplx> kinetic(n);
    for (int j = 0; j < grid.n_points; ++j) {
      const double k = grid.wavenumber_of_mode(grid.mode(j));
      const double a = k * k * config.d_tau;
      kinetic[static_cast<std::size_t>(j)] = cplx(std::cos(a), -std::sin(a)) / static_cast<double>(n);
    }

    FftBuffer fft(grid.n_points);
    auto psi = fft.data();
    std::copy(state.amplitudes.begin(), state.amplitudes.end(), psi.begin());
    double previous_norm = initial_norm;

    for (int s = 0; s < config.n_steps; ++s) {
      const double half = 0.5 * config.d_tau * envelope_value(config, (s + 0.5) * config.d_tau, total);
      kernels::omp::apply_phase(psi, profile, half);
      fft.forward();
      kernels::omp::multiply(psi, kinetic);  // includes the 1/N of the inverse
      fft.backward();
      kernels::omp::apply_phase(psi, profile, half);

      const double norm = kernels::omp::norm_squared(psi) * grid.spacing();
      diag.max_step_norm_drift = std::max(diag.max_step_norm_drift, std::abs(norm - previous_norm));
      previous_norm = norm;

      if (want_snapshots && (s + 1) % config.snapshot_every == 0) {
        std::copy(psi.begin(), psi.end(), out.amplitudes.begin());
        snapshot(s + 1, out);
      }
    }
    std::copy(psi.begin(), psi.end(), out.amplitudes.begin());
  }

  out.norm = out.measure_norm();
  diag.final_norm_drift = std::abs(out.norm - initial_norm);
  if (diagnostics) *diagnostics = diag;
  if (diag.final_norm_drift > kNormDriftLimit) {
    std::ostringstream msg;
    msg << "norm drift " << diag.final_norm_drift << " exceeds " << kNormDriftLimit;
    throw NumericalFailure(msg.str());
  }
  return out;
}

std::vector<double> momentum_spectrum(const WaveState& state) {
  const Grid1D& grid = state.grid;
  grid.validate();
  FftBuffer fft(grid.n_points);
  auto buf = fft.data();
  std::copy(state.amplitudes.begin(), state.amplitudes.end(), buf.begin());
  fft.forward();
  const double n = grid.n_points;
  const double scale = grid.box_length() / (n * n);
  std::vector<double> spectrum(buf.size());
  for (std::size_t j = 0; j < buf.size(); ++j) spectrum[j] = std::norm(buf[j]) * scale;
  return spectrum;
}

DiffractionPattern order_probabilities(const WaveState& state, std::optional<int> cutoff) {
  const Grid1D& grid = state.grid;
  const std::vector<double> spectrum = momentum_spectrum(state);
  const double width = grid.n_periods;

  auto order_of = [&](int j) {
    const int rel = grid.mode(j) - state.base_mode;
    return static_cast<int>(std::floor((rel + 0.5 * width) / width));
  };

  int reach = 0;
  for (int j = 0; j < grid.n_points; ++j) reach = std::max(reach, std::abs(order_of(j)));
  const int p_max = cutoff.value_or(reach);
  if (p_max < 0) throw DomainError("order cutoff must be >= 0");

  DiffractionPattern p;
  p.cutoff = p_max;
  p.generator = PatternGenerator::tdse;
  p.probabilities.assign(2 * static_cast<std::size_t>(p_max) + 1, 0.0);

  double spread = 0.0;  // sum P_j (k_j - k_center)^2
  double binned = 0.0;
  for (int j = 0; j < grid.n_points; ++j) {
    const int order = order_of(j);
    const double w = spectrum[static_cast<std::size_t>(j)];
    const double offset = (grid.mode(j) - state.base_mode - order * width) * 2.0 / width;
    spread += w * offset * offset;
    if (std::abs(order) <= p_max) {
      p.probabilities[static_cast<std::size_t>(order + p_max)] += w;
      binned += w;
    }
  }
  p.tail_mass = std::max(0.0, 1.0 - binned);
  p.cutoff_warning = p.tail_mass > kTailWarning;

  const double rms = std::sqrt(spread / std::max(binned, 1e-300));
  if (rms > 0.0) {
    std::ostringstream msg;
    msg << "bin width condition: rms intra-bin momentum offset " << rms
        << " vs bin half-width 1 (" << (rms < 0.5 ? "resolved" : "unresolved") << ")";
    p.notes.push_back(msg.str());
  }
  return p;
}

}  // namespace kdsim
