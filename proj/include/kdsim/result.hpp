#pragma once

#include <string>
#include <variant>
#include <vector>

#include "kdsim/analytic.hpp"
#include "kdsim/config.hpp"
#include "kdsim/fit.hpp"
#include "kdsim/model.hpp"
#include "kdsim/tdse.hpp"

namespace kdsim {

struct FitPayload {
  FitResult fit;
  MomentRegion region;
};

struct ScanRow {
  double d_tilde = 0.0;
  double q_tilde = 0.0;
  double r_eff = 0.0;
  double p0 = 0.0;
};

struct ScanTable {
  double alpha = 0.0;
  std::vector<ScanRow> rows;
};

using Payload = std::variant<std::monostate, DiffractionPattern, FitPayload, ScanTable>;

/// Everything a run produces; the regime report always travels with the payload.
struct ResultEnvelope {
  std::string version{kVersion};
  ResolvedSetup setup;
  MomentSet moments;
  RegimeReport regime;
  Payload payload;
};

/// Dispatches on config.mode. Data files are read relative to the working directory.
/// Snapshot CSVs (tdse, snapshot_every > 0) are written under solver.snapshot_prefix.
ResultEnvelope run(const RunConfig& config);

/// Reads `order,probability,sigma` rows; '#' starts a comment line.
ObservedPattern read_observed_csv(const std::string& path, double alpha);

/// Serialized bytes. Throws FormatMismatch when the payload has no
/// representation in the requested format.
std::string emit(const ResultEnvelope& envelope, OutputFormat format);

class FormatMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `d_tilde,q_tilde` rows: inner arc then outer arc.
std::string emit_region_csv(const MomentRegion& region);

/// `x,density` and `k,probability` snapshots of a wave state.
std::string density_csv(const WaveState& state);
std::string spectrum_csv(const WaveState& state);

/// Static bar chart of P_p against p.
std::string pattern_svg(const DiffractionPattern& pattern);

/// %.17g, so every double survives a text round trip.
std::string format_double(double v);

}  // namespace kdsim
