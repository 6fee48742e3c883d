#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kdsim/model.hpp"

namespace kdsim {

inline constexpr std::string_view kVersion = "0.1.0";

/// Malformed, conflicting or out-of-range configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { analytic, tdse, fit, validate, scan };
enum class OutputFormat { csv, json, svg };

std::string_view to_string(Mode m);
std::string_view to_string(OutputFormat f);
Mode parse_mode(std::string_view s);
OutputFormat parse_format(std::string_view s);

struct PhysicalBlock {
  double wavelength_m = 0.0;
  double field_V_per_m = 0.0;
  double time_s = 0.0;
  friend bool operator==(const PhysicalBlock&, const PhysicalBlock&) = default;
};

/// Any two of u0, tau, alpha determine the third; alpha alone is enough
/// for the phase-grating (analytic, fit, scan) modes.
struct DimensionlessBlock {
  std::optional<double> u0;
  std::optional<double> tau;
  std::optional<double> alpha;
  friend bool operator==(const DimensionlessBlock&, const DimensionlessBlock&) = default;
};

struct MomentsBlock {
  double d_tilde = 0.0;
  double q_tilde = 0.0;
  std::vector<double> higher;  // q_3, q_4, ...
  friend bool operator==(const MomentsBlock&, const MomentsBlock&) = default;

  MomentSet to_moment_set() const;
};

struct SolverBlock {
  // analytic
  std::string method = "auto";  // auto|pointlike|distribution|closed_form|grating_oracle
  std::optional<int> order_cutoff;
  // tdse
  int n_points = 1024;
  int n_periods = 8;
  std::optional<double> d_tau;
  double max_phase_per_step = 0.05;
  bool include_kinetic = true;
  std::string envelope = "rectangular";  // rectangular|sin2_ramp
  double ramp_fraction = 0.1;
  std::string initial_state = "plane_wave";  // plane_wave|gaussian
  double k0 = 0.0;
  std::optional<double> center;
  double sigma = 0.0;
  int snapshot_every = 0;
  std::string snapshot_prefix;
  friend bool operator==(const SolverBlock&, const SolverBlock&) = default;
};

struct DatasetSpec {
  std::string path;
  std::optional<double> alpha;
  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct SyntheticSpec {
  double r_eff = 1.0;
  std::vector<int> orders{0, 1, 2, 3, 4};
  std::vector<double> alphas;  // defaults to the setup alpha
  std::string noise = "gaussian";  // none|gaussian|counts
  double relative_sigma = 0.01;
  std::int64_t shots = 100000;
  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct FitBlock {
  std::vector<DatasetSpec> data;
  std::optional<SyntheticSpec> synthetic;
  double r_min = 0.0;
  double r_max = 2.0;
  double delta_chi2 = 1.0;
  int scan_points = 401;
  int region_samples = 721;
  friend bool operator==(const FitBlock&, const FitBlock&) = default;
};

struct ScanBlock {
  double d_min = 0.0;
  double d_max = 0.5;
  int d_steps = 11;
  double q_min = 0.0;
  double q_max = 0.5;
  int q_steps = 11;
  friend bool operator==(const ScanBlock&, const ScanBlock&) = default;
};

struct OutputBlock {
  std::string path;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  friend bool operator==(const OutputBlock&, const OutputBlock&) = default;
};

struct RunConfig {
  Mode mode = Mode::analytic;
  std::optional<PhysicalBlock> physical;
  std::optional<DimensionlessBlock> dimensionless;
  MomentsBlock moments;
  SolverBlock solver;
  std::optional<FitBlock> fit;
  std::optional<ScanBlock> scan;
  OutputBlock output;
  std::optional<std::uint64_t> seed;
  ElectronConstants constants;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Dimensionless parameters a config resolves to. u0 is NaN when only
/// alpha was given.
struct ResolvedSetup {
  DimensionlessSetup setup;
  bool u0_known = false;
};

ResolvedSetup resolve_setup(const RunConfig& config);

/// Parses and validates a JSON document. Leaf keys may appear inside their
/// block or flattened at top level.
RunConfig parse_config(std::string_view text, const ElectronConstants& defaults = {});

/// Canonical nested document; parse_config(echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

/// Applies `key=value` (key is a leaf name or block.leaf; value is JSON,
/// falling back to a bare string) to a raw document before parsing.
std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides);

/// Constants from a JSON file with keys charge_C, mass_kg, hbar_Js, speed_of_light_m_per_s.
ElectronConstants load_constants_file(const std::string& path);

inline constexpr const char* kConstantsEnvVar = "KDSIM_CONSTANTS";

}  // namespace kdsim
