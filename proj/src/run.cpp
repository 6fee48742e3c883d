#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kdsim/result.hpp"
#include "kdsim/specfun.hpp"

namespace kdsim {

namespace {

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

DiffractionPattern run_analytic(const RunConfig& c, double alpha, const MomentSet& moments) {
  const double r_eff = effective_amplitude(moments);
  const int cutoff = c.solver.order_cutoff.value_or(default_cutoff(alpha * r_eff));
  std::string method = c.solver.method;
  if (method == "auto") {
    if (moments.max_order() > 2) {
      method = "closed_form";
    } else if (moments.all_zero()) {
      method = "pointlike";
    } else {
      method = "distribution";
    }
  }
  if (method == "pointlike") return pointlike_pattern(alpha, cutoff);
  if (method == "distribution") return distribution_pattern(alpha, moments, cutoff);
  if (method == "closed_form") return closed_form_pattern(alpha, moments, cutoff);
  const int grid = std::max(256, next_power_of_two(4 * cutoff + 16));
  DiffractionPattern p = grating_oracle(build_potential(moments), alpha, grid, cutoff);
  p.moments = moments;
  return p;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << bytes;
}

DiffractionPattern run_tdse(const RunConfig& c, const DimensionlessSetup& setup,
                            const MomentSet& moments) {
  const SolverBlock& s = c.solver;
  const Grid1D grid{s.n_points, s.n_periods};
  grid.validate();
  const PotentialSpec spec = build_potential(moments);

  WaveState initial;
  if (s.initial_state == "gaussian") {
    initial = init_gaussian(grid, s.center.value_or(0.5 * grid.box_length()), s.sigma, s.k0);
  } else {
    initial = init_plane_wave(grid, mode_for_wavenumber(grid, s.k0));
  }

  PropagationConfig pc;
  if (s.d_tau && setup.tau > 0.0) {
    pc.n_steps = std::max(1, static_cast<int>(std::llround(setup.tau / *s.d_tau)));
    pc.d_tau = setup.tau / pc.n_steps;
  } else {
    pc = make_propagation_config(setup, spec, s.max_phase_per_step);
  }
  pc.include_kinetic = s.include_kinetic;
  pc.envelope = s.envelope == "sin2_ramp" ? Envelope::sin2_ramp : Envelope::rectangular;
  pc.ramp_fraction = s.ramp_fraction;
  pc.snapshot_every = s.snapshot_prefix.empty() ? 0 : s.snapshot_every;

  SnapshotSink sink;
  if (pc.snapshot_every > 0) {
    sink = [&s](int step, const WaveState& state) {
      write_file(s.snapshot_prefix + "_density_" + std::to_string(step) + ".csv", density_csv(state));
      write_file(s.snapshot_prefix + "_spectrum_" + std::to_string(step) + ".csv", spectrum_csv(state));
    };
  }

  PropagationDiagnostics diag;
  const WaveState final_state = propagate(initial, spec, setup, pc, &diag, sink);

  const int cutoff = s.order_cutoff.value_or(default_cutoff(setup.alpha * spec.amplitude()));
  DiffractionPattern p = order_probabilities(final_state, cutoff);
  p.alpha = setup.alpha;
  p.moments = moments;
  for (const auto& w : diag.warnings) p.notes.push_back(w);
  std::ostringstream msg;
  msg << "steps " << pc.n_steps << ", d_tau " << format_double(pc.d_tau) << ", norm drift "
      << format_double(diag.final_norm_drift);
  p.notes.push_back(msg.str());
  return p;
}

FitPayload run_fit(const RunConfig& c, double alpha) {
  const FitBlock& f = *c.fit;
  std::vector<ObservedPattern> datasets;
  if (f.synthetic) {
    const SyntheticSpec& y = *f.synthetic;
    const std::vector<double> alphas = y.alphas.empty() ? std::vector<double>{alpha} : y.alphas;
    const std::uint64_t base = c.seed.value_or(0);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const std::uint64_t seed = base + i;
      if (y.noise == "counts") {
        datasets.push_back(synthesize_counts(alphas[i], y.r_eff, y.orders, y.shots, seed));
      } else {
        const GaussianNoise noise{y.noise == "none" ? 0.0 : y.relative_sigma, 1e-4};
        datasets.push_back(synthesize_gaussian(alphas[i], y.r_eff, y.orders, noise, seed));
      }
    }
  } else {
    for (const auto& d : f.data) {
      const double a = d.alpha.value_or(alpha);
      if (!std::isfinite(a)) throw ConfigError("fit.data: alpha unknown for '" + d.path + "'");
      datasets.push_back(read_observed_csv(d.path, a));
    }
  }
  const FitOptions options{f.r_min, f.r_max, f.delta_chi2, f.scan_points, 1e-9};
  FitPayload out;
  out.fit = datasets.size() == 1 ? fit_effective_amplitude(datasets.front(), options)
                                 : joint_fit(datasets, options);
  out.region = moment_region(out.fit, f.region_samples);
  return out;
}

ScanTable run_scan(const ScanBlock& s, double alpha) {
  ScanTable t;
  t.alpha = alpha;
  auto at = [](double lo, double hi, int steps, int i) {
    return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  };
  for (int i = 0; i < s.d_steps; ++i) {
    for (int j = 0; j < s.q_steps; ++j) {
      ScanRow row;
      row.d_tilde = at(s.d_min, s.d_max, s.d_steps, i);
      row.q_tilde = at(s.q_min, s.q_max, s.q_steps, j);
      row.r_eff = effective_amplitude(MomentSet::dipole_quadrupole(row.d_tilde, row.q_tilde));
      const double j0 = bessel_j(0, alpha * row.r_eff);
      row.p0 = j0 * j0;
      t.rows.push_back(row);
    }
  }
  return t;
}

}  // namespace

ObservedPattern read_observed_csv(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw ConfigError("fit.data: cannot open '" + path + "'");
  ObservedPattern obs;
  obs.alpha = alpha;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line.erase(std::remove(line.begin(), line.end(), '\r'), line.end());
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line[first]))) {
      std::string header = line.substr(first);
      header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
      if (header != "order,probability,sigma") {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected header order,probability,sigma");
      }
      continue;
    }
    std::istringstream row(line);
    ObservedRecord r;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> r.order >> c1 >> r.value >> c2 >> r.sigma) || c1 != ',' || c2 != ',') {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    obs.records.push_back(r);
  }
  obs.validate();
  return obs;
}

ResultEnvelope run(const RunConfig& config) {
  ResultEnvelope env;
  env.setup = resolve_setup(config);
  env.moments = config.moments.to_moment_set();
  env.regime = check_regime(env.setup.setup, env.moments);
  if (!env.setup.u0_known) {
    env.regime.notes.push_back("u0 not given: Raman-Nath validity not assessed, phase-grating limit assumed");
  }
  const double alpha = env.setup.setup.alpha;

  switch (config.mode) {
    case Mode::analytic:
      env.payload = run_analytic(config, alpha, env.moments);
      break;
    case Mode::tdse:
      env.payload = run_tdse(config, env.setup.setup, env.moments);
      break;
    case Mode::fit:
      env.payload = run_fit(config, alpha);
      break;
    case Mode::scan:
      env.payload = run_scan(*config.scan, alpha);
      break;
    case Mode::validate:
      break;
  }
  return env;
}

}  // namespace kdsim
