#include "kdsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kdsim {

namespace {

using json = nlohmann::json;

const std::map<std::string, std::vector<std::string>>& block_leaves() {
  static const std::map<std::string, std::vector<std::string>> leaves{
      {"physical", {"wavelength_m", "field_V_per_m", "time_s"}},
      {"dimensionless", {"u0", "tau", "alpha"}},
      {"moments", {"d_tilde", "q_tilde", "higher"}},
      {"solver",
       {"method", "order_cutoff", "n_points", "n_periods", "d_tau", "max_phase_per_step",
        "include_kinetic", "envelope", "ramp_fraction", "initial_state", "k0", "center", "sigma",
        "snapshot_every", "snapshot_prefix"}},
      {"fit", {"data", "synthetic", "r_min", "r_max", "delta_chi2", "scan_points", "region_samples"}},
      {"scan", {"d_min", "d_max", "d_steps", "q_min", "q_max", "q_steps"}},
      {"output", {"path", "format"}},
      {"constants", {"charge_C", "mass_kg", "hbar_Js", "speed_of_light_m_per_s"}},
  };
  return leaves;
}

const std::set<std::string> kTopLevel{"mode", "seed"};

std::string block_of(const std::string& leaf) {
  for (const auto& [block, leaves] : block_leaves()) {
    for (const auto& l : leaves) {
      if (l == leaf) return block;
    }
  }
  return {};
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

/// Typed, strict reader over one JSON object; unknown keys are rejected on finish().
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(name(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(name(key), "must be finite");
    return d;
  }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  void number(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }

  long long integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(name(key), "expected an integer");
    return v.get<long long>();
  }
  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const long long v = integer(key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(name(key), "out of range");
    }
    out = static_cast<int>(v);
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_boolean()) fail(name(key), "expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) fail(name(key), "expected a string");
    out = v.get<std::string>();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) fail(name(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& bound) {
  if (!ok) fail(field, "out of range (" + bound + ")");
}

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

json normalize(json doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  json out = json::object();
  for (auto& [key, value] : doc.items()) {
    if (kTopLevel.count(key) || block_leaves().count(key)) {
      if (out.contains(key)) {
        // block already created by a flattened leaf: merge
        if (!value.is_object()) fail(key, "expected an object");
        for (auto& [k, v] : value.items()) {
          if (out[key].contains(k)) fail(key + "." + k, "given both flat and inside its block");
          out[key][k] = v;
        }
      } else {
        out[key] = value;
      }
      continue;
    }
    const std::string block = block_of(key);
    if (block.empty()) fail(key, "unknown key");
    if (out.contains(block) && out[block].is_object() && out[block].contains(key)) {
      fail(block + "." + key, "given both flat and inside its block");
    }
    out[block][key] = value;
  }
  return out;
}

std::vector<DatasetSpec> parse_datasets(const json& v) {
  std::vector<DatasetSpec> out;
  auto one = [&](const json& item, const std::string& path) {
    DatasetSpec d;
    if (item.is_string()) {
      d.path = item.get<std::string>();
    } else {
      Reader r(item, path);
      if (!r.has("path")) fail(path + ".path", "missing");
      r.string("path", d.path);
      d.alpha = r.opt_number("alpha");
      r.finish();
      if (d.alpha) require(*d.alpha >= 0.0, path + ".alpha", ">= 0");
    }
    if (d.path.empty()) fail(path, "empty data path");
    out.push_back(std::move(d));
  };
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) one(v[i], "fit.data[" + std::to_string(i) + "]");
  } else {
    one(v, "fit.data");
  }
  return out;
}

SyntheticSpec parse_synthetic(const json& v) {
  SyntheticSpec s;
  Reader r(v, "fit.synthetic");
  r.number("r_eff", s.r_eff);
  if (r.has("orders")) {
    const json& o = r.at("orders");
    if (!o.is_array()) fail("fit.synthetic.orders", "expected an array of integers");
    s.orders.clear();
    for (const auto& x : o) {
      if (!x.is_number_integer()) fail("fit.synthetic.orders", "expected integers");
      s.orders.push_back(x.get<int>());
    }
  }
  if (r.has("alphas")) {
    const json& a = r.at("alphas");
    if (!a.is_array()) fail("fit.synthetic.alphas", "expected an array of numbers");
    for (const auto& x : a) {
      if (!x.is_number()) fail("fit.synthetic.alphas", "expected numbers");
      s.alphas.push_back(x.get<double>());
      require(s.alphas.back() >= 0.0, "fit.synthetic.alphas", ">= 0");
    }
  }
  r.string("noise", s.noise);
  r.number("relative_sigma", s.relative_sigma);
  if (r.has("shots")) s.shots = r.integer("shots");
  r.finish();
  require(s.r_eff >= 0.0, "fit.synthetic.r_eff", ">= 0");
  require(s.orders.size() >= 3, "fit.synthetic.orders", "at least 3 orders");
  require(s.noise == "none" || s.noise == "gaussian" || s.noise == "counts", "fit.synthetic.noise",
          "none|gaussian|counts");
  require(s.relative_sigma >= 0.0, "fit.synthetic.relative_sigma", ">= 0");
  require(s.shots > 0, "fit.synthetic.shots", "> 0");
  return s;
}

json to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  if (c.seed) j["seed"] = *c.seed;
  if (c.physical) {
    j["physical"] = {{"wavelength_m", c.physical->wavelength_m},
                     {"field_V_per_m", c.physical->field_V_per_m},
                     {"time_s", c.physical->time_s}};
  }
  if (c.dimensionless) {
    json d = json::object();
    if (c.dimensionless->u0) d["u0"] = *c.dimensionless->u0;
    if (c.dimensionless->tau) d["tau"] = *c.dimensionless->tau;
    if (c.dimensionless->alpha) d["alpha"] = *c.dimensionless->alpha;
    j["dimensionless"] = d;
  }
  j["moments"] = {{"d_tilde", c.moments.d_tilde}, {"q_tilde", c.moments.q_tilde},
                  {"higher", c.moments.higher}};
  const SolverBlock& s = c.solver;
  json sj = {{"method", s.method},
             {"n_points", s.n_points},
             {"n_periods", s.n_periods},
             {"max_phase_per_step", s.max_phase_per_step},
             {"include_kinetic", s.include_kinetic},
             {"envelope", s.envelope},
             {"ramp_fraction", s.ramp_fraction},
             {"initial_state", s.initial_state},
             {"k0", s.k0},
             {"sigma", s.sigma},
             {"snapshot_every", s.snapshot_every},
             {"snapshot_prefix", s.snapshot_prefix}};
  if (s.order_cutoff) sj["order_cutoff"] = *s.order_cutoff;
  if (s.d_tau) sj["d_tau"] = *s.d_tau;
  if (s.center) sj["center"] = *s.center;
  j["solver"] = sj;
  if (c.fit) {
    const FitBlock& f = *c.fit;
    json data = json::array();
    for (const auto& d : f.data) {
      json dj = {{"path", d.path}};
      if (d.alpha) dj["alpha"] = *d.alpha;
      data.push_back(dj);
    }
    json fj = {{"data", data},
               {"r_min", f.r_min},
               {"r_max", f.r_max},
               {"delta_chi2", f.delta_chi2},
               {"scan_points", f.scan_points},
               {"region_samples", f.region_samples}};
    if (f.synthetic) {
      const SyntheticSpec& y = *f.synthetic;
      fj["synthetic"] = {{"r_eff", y.r_eff},   {"orders", y.orders},
                         {"alphas", y.alphas}, {"noise", y.noise},
                         {"relative_sigma", y.relative_sigma}, {"shots", y.shots}};
    }
    j["fit"] = fj;
  }
  if (c.scan) {
    const ScanBlock& s2 = *c.scan;
    j["scan"] = {{"d_min", s2.d_min}, {"d_max", s2.d_max}, {"d_steps", s2.d_steps},
                 {"q_min", s2.q_min}, {"q_max", s2.q_max}, {"q_steps", s2.q_steps}};
  }
  j["output"] = {{"path", c.output.path}, {"format", to_string(c.output.format)}};
  j["constants"] = {{"charge_C", c.constants.charge_C},
                    {"mass_kg", c.constants.mass_kg},
                    {"hbar_Js", c.constants.hbar_Js},
                    {"speed_of_light_m_per_s", c.constants.speed_of_light_m_per_s}};
  return j;
}

void read_constants(Reader& r, ElectronConstants& c) {
  r.number("charge_C", c.charge_C);
  r.number("mass_kg", c.mass_kg);
  r.number("hbar_Js", c.hbar_Js);
  r.number("speed_of_light_m_per_s", c.speed_of_light_m_per_s);
  r.finish();
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("constants: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::tdse: return "tdse";
    case Mode::fit: return "fit";
    case Mode::validate: return "validate";
    case Mode::scan: return "scan";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "unknown";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::analytic, Mode::tdse, Mode::fit, Mode::validate, Mode::scan}) {
    if (to_string(m) == s) return m;
  }
  fail("mode", "expected analytic|tdse|fit|validate|scan, got '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  for (OutputFormat f : {OutputFormat::csv, OutputFormat::json, OutputFormat::svg}) {
    if (to_string(f) == s) return f;
  }
  fail("output.format", "expected csv|json|svg, got '" + std::string(s) + "'");
}

MomentSet MomentsBlock::to_moment_set() const {
  MomentSet m;
  m.q_tilde = {d_tilde, q_tilde};
  m.q_tilde.insert(m.q_tilde.end(), higher.begin(), higher.end());
  while (m.q_tilde.size() > 2 && m.q_tilde.back() == 0.0) m.q_tilde.pop_back();
  return m;
}

ResolvedSetup resolve_setup(const RunConfig& c) {
  ResolvedSetup r;
  if (c.physical) {
    try {
      r.setup = derive_scales({c.physical->wavelength_m, c.physical->field_V_per_m},
                              c.physical->time_s, c.constants);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("physical: ") + e.what());
    }
    r.u0_known = true;
    return r;
  }
  if (!c.dimensionless) throw ConfigError("physical|dimensionless: one block is required");
  const auto& d = *c.dimensionless;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  DimensionlessSetup& s = r.setup;
  s.recoil_energy_J = nan;
  s.v0_V = nan;
  if (d.u0 && d.tau) {
    s.u0 = *d.u0;
    s.tau = *d.tau;
    s.alpha = 0.5 * s.u0 * s.tau;
    if (d.alpha && std::abs(*d.alpha - s.alpha) > 1e-12 * std::max(1.0, s.alpha)) {
      fail("dimensionless.alpha", "inconsistent with u0*tau/2");
    }
  } else if (d.u0 && d.alpha) {
    require(*d.u0 > 0.0, "dimensionless.u0", "> 0 when tau is derived from alpha");
    s.u0 = *d.u0;
    s.alpha = *d.alpha;
    s.tau = 2.0 * s.alpha / s.u0;
  } else if (d.tau && d.alpha) {
    require(*d.tau > 0.0, "dimensionless.tau", "> 0 when u0 is derived from alpha");
    s.tau = *d.tau;
    s.alpha = *d.alpha;
    s.u0 = 2.0 * s.alpha / s.tau;
  } else if (d.alpha) {
    s.alpha = *d.alpha;
    s.u0 = nan;
    s.tau = nan;
    return r;
  } else {
    fail("dimensionless", "give u0 and tau, or alpha (optionally with u0 or tau)");
  }
  r.u0_known = true;
  return r;
}

RunConfig parse_config(std::string_view text, const ElectronConstants& defaults) {
  json raw;
  try {
    raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  const json doc = normalize(raw);
  RunConfig c;
  c.constants = defaults;

  Reader top(doc, "");
  if (!top.has("mode")) fail("mode", "missing");
  {
    const json& m = top.at("mode");
    if (!m.is_string()) fail("mode", "expected a string");
    c.mode = parse_mode(m.get<std::string>());
  }
  if (top.has("seed")) {
    const json& s = top.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
      fail("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }

  if (top.has("physical")) {
    Reader r(top.at("physical"), "physical");
    PhysicalBlock p;
    for (const char* k : {"wavelength_m", "field_V_per_m", "time_s"}) {
      if (!r.has(k)) fail(std::string("physical.") + k, "missing");
    }
    p.wavelength_m = r.number("wavelength_m");
    p.field_V_per_m = r.number("field_V_per_m");
    p.time_s = r.number("time_s");
    r.finish();
    require(p.wavelength_m > 0.0, "physical.wavelength_m", "> 0");
    require(p.field_V_per_m >= 0.0, "physical.field_V_per_m", ">= 0");
    require(p.time_s >= 0.0, "physical.time_s", ">= 0");
    c.physical = p;
  }
  if (top.has("dimensionless")) {
    Reader r(top.at("dimensionless"), "dimensionless");
    DimensionlessBlock d;
    d.u0 = r.opt_number("u0");
    d.tau = r.opt_number("tau");
    d.alpha = r.opt_number("alpha");
    r.finish();
    if (d.u0) require(*d.u0 >= 0.0, "dimensionless.u0", ">= 0");
    if (d.tau) require(*d.tau >= 0.0, "dimensionless.tau", ">= 0");
    if (d.alpha) require(*d.alpha >= 0.0, "dimensionless.alpha", ">= 0");
    c.dimensionless = d;
  }
  if (c.physical && c.dimensionless) {
    fail("physical|dimensionless", "exactly one block may be given, found both");
  }
  if (!c.physical && !c.dimensionless) {
    fail("physical|dimensionless", "exactly one block is required, found neither");
  }

  if (top.has("moments")) {
    Reader r(top.at("moments"), "moments");
    r.number("d_tilde", c.moments.d_tilde);
    r.number("q_tilde", c.moments.q_tilde);
    if (r.has("higher")) {
      const json& h = r.at("higher");
      if (!h.is_array()) fail("moments.higher", "expected an array of numbers");
      for (const auto& x : h) {
        if (!x.is_number()) fail("moments.higher", "expected numbers");
        c.moments.higher.push_back(x.get<double>());
      }
    }
    r.finish();
  }

  if (top.has("solver")) {
    Reader r(top.at("solver"), "solver");
    SolverBlock& s = c.solver;
    r.string("method", s.method);
    if (r.has("order_cutoff")) {
      int v = 0;
      r.integer("order_cutoff", v);
      s.order_cutoff = v;
    }
    r.integer("n_points", s.n_points);
    r.integer("n_periods", s.n_periods);
    s.d_tau = r.opt_number("d_tau");
    r.number("max_phase_per_step", s.max_phase_per_step);
    r.boolean("include_kinetic", s.include_kinetic);
    r.string("envelope", s.envelope);
    r.number("ramp_fraction", s.ramp_fraction);
    r.string("initial_state", s.initial_state);
    r.number("k0", s.k0);
    s.center = r.opt_number("center");
    r.number("sigma", s.sigma);
    r.integer("snapshot_every", s.snapshot_every);
    r.string("snapshot_prefix", s.snapshot_prefix);
    r.finish();
  }
  {
    const SolverBlock& s = c.solver;
    require(s.method == "auto" || s.method == "pointlike" || s.method == "distribution" ||
                s.method == "closed_form" || s.method == "grating_oracle",
            "solver.method", "auto|pointlike|distribution|closed_form|grating_oracle");
    if (s.order_cutoff) require(*s.order_cutoff >= 0, "solver.order_cutoff", ">= 0");
    require(s.n_periods >= 1, "solver.n_periods", ">= 1");
    require(is_power_of_two(s.n_points) && s.n_points >= 64 * s.n_periods, "solver.n_points",
            "power of two >= 64 * n_periods");
    if (s.d_tau) require(*s.d_tau > 0.0, "solver.d_tau", "> 0");
    require(s.max_phase_per_step > 0.0, "solver.max_phase_per_step", "> 0");
    require(s.envelope == "rectangular" || s.envelope == "sin2_ramp", "solver.envelope",
            "rectangular|sin2_ramp");
    require(s.ramp_fraction > 0.0 && s.ramp_fraction <= 0.5, "solver.ramp_fraction", "(0, 0.5]");
    require(s.initial_state == "plane_wave" || s.initial_state == "gaussian",
            "solver.initial_state", "plane_wave|gaussian");
    require(s.sigma >= 0.0, "solver.sigma", ">= 0");
    require(s.snapshot_every >= 0, "solver.snapshot_every", ">= 0");
  }

  if (top.has("fit")) {
    Reader r(top.at("fit"), "fit");
    FitBlock f;
    if (r.has("data")) f.data = parse_datasets(r.at("data"));
    if (r.has("synthetic")) f.synthetic = parse_synthetic(r.at("synthetic"));
    r.number("r_min", f.r_min);
    r.number("r_max", f.r_max);
    r.number("delta_chi2", f.delta_chi2);
    r.integer("scan_points", f.scan_points);
    r.integer("region_samples", f.region_samples);
    r.finish();
    require(f.r_min >= 0.0, "fit.r_min", ">= 0");
    require(f.r_max > f.r_min, "fit.r_max", "> r_min");
    require(f.delta_chi2 > 0.0, "fit.delta_chi2", "> 0");
    require(f.scan_points >= 200, "fit.scan_points", ">= 200");
    require(f.region_samples >= 2, "fit.region_samples", ">= 2");
    if (!f.data.empty() && f.synthetic) fail("fit.data|fit.synthetic", "give one, not both");
    c.fit = f;
  }

  if (top.has("scan")) {
    Reader r(top.at("scan"), "scan");
    ScanBlock s;
    r.number("d_min", s.d_min);
    r.number("d_max", s.d_max);
    r.integer("d_steps", s.d_steps);
    r.number("q_min", s.q_min);
    r.number("q_max", s.q_max);
    r.integer("q_steps", s.q_steps);
    r.finish();
    require(s.d_steps >= 1, "scan.d_steps", ">= 1");
    require(s.q_steps >= 1, "scan.q_steps", ">= 1");
    require(s.d_max >= s.d_min, "scan.d_max", ">= d_min");
    require(s.q_max >= s.q_min, "scan.q_max", ">= q_min");
    c.scan = s;
  }

  if (top.has("output")) {
    Reader r(top.at("output"), "output");
    r.string("path", c.output.path);
    if (r.has("format")) {
      const json& f = r.at("format");
      if (!f.is_string()) fail("output.format", "expected a string");
      c.output.format = parse_format(f.get<std::string>());
    }
    r.finish();
  }

  if (top.has("constants")) {
    Reader r(top.at("constants"), "constants");
    read_constants(r, c.constants);
  }
  top.finish();

  // Mode-specific requirements.
  const ResolvedSetup resolved = resolve_setup(c);
  switch (c.mode) {
    case Mode::tdse:
      if (!resolved.u0_known) fail("dimensionless.u0", "required for tdse mode (give u0 or tau)");
      if (c.solver.initial_state == "gaussian" && !(c.solver.sigma > 0.0)) {
        fail("solver.sigma", "required (> 0) for a gaussian initial state");
      }
      break;
    case Mode::fit:
      if (!c.fit) fail("fit", "block required for fit mode");
      if (c.fit->data.empty() && !c.fit->synthetic) fail("fit.data", "give data files or a synthetic block");
      if (c.fit->synthetic && c.fit->synthetic->noise != "none" && !c.seed) {
        fail("seed", "required when synthetic noisy data are generated");
      }
      break;
    case Mode::scan:
      if (!c.scan) fail("scan", "block required for scan mode");
      break;
    case Mode::analytic:
    case Mode::validate:
      break;
  }
  return c;
}

std::string echo_config(const RunConfig& config) { return to_json(config).dump(2); }

std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides) {
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: malformed document: ") + e.what());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) fail(o, "override must look like key=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    std::string block;
    std::string leaf = key;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      block = key.substr(0, dot);
      leaf = key.substr(dot + 1);
    } else if (!kTopLevel.count(key)) {
      block = block_of(key);
      if (block.empty()) fail(key, "unknown key");
    }
    if (block.empty()) {
      doc[leaf] = value;
      continue;
    }
    if (doc.contains(leaf) && !block_leaves().count(leaf)) doc.erase(leaf);  // flattened copy
    doc[block][leaf] = value;
  }
  return doc.dump();
}

ElectronConstants load_constants_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("constants file '" + path + "': cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("constants file '" + path + "': " + e.what());
  }
  ElectronConstants c;
  Reader r(doc, "constants");
  read_constants(r, c);
  return c;
}

}  // namespace kdsim
