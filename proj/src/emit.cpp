#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "kdsim/result.hpp"

namespace kdsim {

namespace {

using json = nlohmann::json;

json regime_json(const RegimeReport& r) {
  json j = {{"raman_nath_ratio", r.raman_nath_ratio},
            {"raman_nath_ok", r.raman_nath_ok},
            {"moment_ratios", r.moment_ratios},
            {"ordering_ok", r.ordering_ok},
            {"notes", r.notes}};
  j["explorable_length_m"] = r.explorable_length_m ? json(*r.explorable_length_m) : json(nullptr);
  return j;
}

json setup_json(const ResultEnvelope& env) {
  const DimensionlessSetup& s = env.setup.setup;
  json j = {{"u0", s.u0},
            {"tau", s.tau},
            {"alpha", s.alpha},
            {"recoil_energy_J", s.recoil_energy_J},
            {"v0_V", s.v0_V},
            {"u0_known", env.setup.u0_known},
            {"moments", env.moments.q_tilde},
            {"r_eff", effective_amplitude(env.moments)}};
  j["wavelength_m"] = s.wavelength_m ? json(*s.wavelength_m) : json(nullptr);
  return j;
}

json pattern_json(const DiffractionPattern& p) {
  json orders = json::array();
  for (int k = -p.cutoff; k <= p.cutoff; ++k) orders.push_back(k);
  return {{"type", "pattern"},
          {"generator", std::string(to_string(p.generator))},
          {"alpha", p.alpha},
          {"moments", p.moments.q_tilde},
          {"cutoff", p.cutoff},
          {"orders", orders},
          {"probabilities", p.probabilities},
          {"tail_mass", p.tail_mass},
          {"cutoff_warning", p.cutoff_warning},
          {"notes", p.notes}};
}

json points_json(const std::vector<std::pair<double, double>>& pts) {
  json a = json::array();
  for (const auto& [d, q] : pts) a.push_back({d, q});
  return a;
}

json fit_json(const FitPayload& f) {
  json scan = json::array();
  for (const auto& s : f.fit.scan) scan.push_back({s.r_eff, s.chi2});
  const MomentRegion& r = f.region;
  return {{"type", "fit"},
          {"r_eff_hat", f.fit.r_eff_hat},
          {"chi2_min", f.fit.chi2_min},
          {"dof", f.fit.dof},
          {"delta_chi2", f.fit.delta_chi2},
          {"ci", {f.fit.r_lo, f.fit.r_hi}},
          {"local_minima", f.fit.local_minima},
          {"unbounded", f.fit.unbounded},
          {"multimodal", f.fit.multimodal},
          {"misfit", f.fit.misfit},
          {"notes", f.fit.notes},
          {"scan", scan},
          {"region",
           {{"r_lo", r.r_lo},
            {"r_hi", r.r_hi},
            {"empty", r.empty},
            {"inner", points_json(r.inner)},
            {"outer", points_json(r.outer)},
            {"notes", r.notes}}}};
}

json scan_json(const ScanTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"d_tilde", r.d_tilde}, {"q_tilde", r.q_tilde}, {"r_eff", r.r_eff}, {"p0", r.p0}});
  }
  return {{"type", "scan"}, {"alpha", t.alpha}, {"rows", rows}};
}

std::string emit_csv(const ResultEnvelope& env) {
  std::ostringstream out;
  if (const auto* p = std::get_if<DiffractionPattern>(&env.payload)) {
    out << "order,probability\n";
    for (int k = -p->cutoff; k <= p->cutoff; ++k) out << k << ',' << format_double(p->at(k)) << '\n';
  } else if (const auto* f = std::get_if<FitPayload>(&env.payload)) {
    out << "r_eff,chi2\n";
    for (const auto& s : f->fit.scan) out << format_double(s.r_eff) << ',' << format_double(s.chi2) << '\n';
  } else if (const auto* t = std::get_if<ScanTable>(&env.payload)) {
    out << "d_tilde,q_tilde,r_eff,p0\n";
    for (const auto& r : t->rows) {
      out << format_double(r.d_tilde) << ',' << format_double(r.q_tilde) << ','
          << format_double(r.r_eff) << ',' << format_double(r.p0) << '\n';
    }
  } else {
    throw FormatMismatch("csv output needs a pattern, fit or scan payload; use json for validate");
  }
  return out.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string emit(const ResultEnvelope& env, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv:
      return emit_csv(env);
    case OutputFormat::json: {
      json j = {{"version", env.version}, {"setup", setup_json(env)}, {"regime", regime_json(env.regime)}};
      if (const auto* p = std::get_if<DiffractionPattern>(&env.payload)) {
        j["payload"] = pattern_json(*p);
      } else if (const auto* f = std::get_if<FitPayload>(&env.payload)) {
        j["payload"] = fit_json(*f);
      } else if (const auto* t = std::get_if<ScanTable>(&env.payload)) {
        j["payload"] = scan_json(*t);
      } else {
        j["payload"] = {{"type", "regime"}};
      }
      return j.dump(2) + "\n";
    }
    case OutputFormat::svg:
      if (const auto* p = std::get_if<DiffractionPattern>(&env.payload)) return pattern_svg(*p);
      throw FormatMismatch("svg output needs a pattern payload");
  }
  throw FormatMismatch("unknown output format");
}

std::string emit_region_csv(const MomentRegion& region) {
  std::ostringstream out;
  out << "d_tilde,q_tilde\n";
  for (const auto* arc : {&region.inner, &region.outer}) {
    for (const auto& [d, q] : *arc) out << format_double(d) << ',' << format_double(q) << '\n';
  }
  return out.str();
}

std::string density_csv(const WaveState& state) {
  std::ostringstream out;
  out << "x,density\n";
  for (int j = 0; j < state.grid.n_points; ++j) {
    out << format_double(state.grid.position(j)) << ','
        << format_double(std::norm(state.amplitudes[static_cast<std::size_t>(j)])) << '\n';
  }
  return out.str();
}

std::string spectrum_csv(const WaveState& state) {
  const std::vector<double> spectrum = momentum_spectrum(state);
  const int n = state.grid.n_points;
  std::ostringstream out;
  out << "k,probability\n";
  // ascending wavenumber
  for (int i = 0; i < n; ++i) {
    const int j = (i + n / 2) % n;
    out << format_double(state.grid.wavenumber_of_mode(state.grid.mode(j))) << ','
        << format_double(spectrum[static_cast<std::size_t>(j)]) << '\n';
  }
  return out.str();
}

std::string pattern_svg(const DiffractionPattern& p) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double left = 60.0;
  constexpr double right = 20.0;
  constexpr double top = 30.0;
  constexpr double bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const int n = 2 * p.cutoff + 1;
  const double slot = plot_w / n;
  double peak = 0.0;
  for (double v : p.probabilities) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "  <title>Diffraction pattern (" << to_string(p.generator) << ", alpha = "
      << format_double(p.alpha) << ")</title>\n";
  out << "  <g fill=\"steelblue\">\n";
  for (int k = -p.cutoff; k <= p.cutoff; ++k) {
    const double v = p.at(k);
    const double h = plot_h * v / peak;
    const double x = left + (k + p.cutoff) * slot + 0.1 * slot;
    out << "    <rect x=\"" << format_double(x) << "\" y=\"" << format_double(top + plot_h - h)
        << "\" width=\"" << format_double(0.8 * slot) << "\" height=\"" << format_double(h)
        << "\"><title>p = " << k << ": " << format_double(v) << "</title></rect>\n";
  }
  out << "  </g>\n";
  out << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n"
      << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  const int label_every = std::max(1, n / 16);
  for (int k = -p.cutoff; k <= p.cutoff; ++k) {
    if ((k + p.cutoff) % label_every != 0 && k != 0) continue;
    out << "  <text x=\"" << format_double(left + (k + p.cutoff + 0.5) * slot) << "\" y=\""
        << top + plot_h + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  out << "  <text x=\"" << left << "\" y=\"" << top - 8 << "\" font-size=\"11\">"
      << format_double(peak) << "</text>\n"
      << "  <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">diffraction order p</text>\n"
      << "  <text x=\"16\" y=\"" << top + plot_h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">probability P_p</text>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace kdsim
