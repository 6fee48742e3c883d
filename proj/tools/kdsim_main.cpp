// kdsim: Kapitza-Dirac diffraction patterns, TDSE propagation and moment fits.
//
//   kdsim <analytic|tdse|fit|validate|scan> [--config PATH] [--out PATH]
//         [--format csv|json|svg] [--seed N] [--set key=value]...

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdsim/config.hpp"
#include "kdsim/result.hpp"

namespace {

int error_record(const std::string& kind, const std::string& message, int status) {
  const nlohmann::json rec = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << rec.dump() << '\n';
  return status;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kdsim::ConfigError("--config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("--out: cannot write '" + path + "'");
  out << bytes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kapitza-Dirac diffraction of extended charges"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string region_out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool echo = false;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv|json|svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--seed", seed, "noise seed for synthetic data");
  app.add_option("--set", overrides, "override a config leaf: key=value (repeatable)");
  app.add_option("--region-out", region_out, "fit mode: write the moment-band contour CSV here");
  app.add_flag("--echo-config", echo, "print the resolved configuration and exit");

  const std::pair<const char*, const char*> commands[] = {
      {"analytic", "closed-form Raman-Nath pattern"},
      {"tdse", "split-operator Schroedinger propagation"},
      {"fit", "fit the effective grating amplitude and moment band"},
      {"validate", "regime report only"},
      {"scan", "r_eff and P_0 over a (d, q) grid"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_record("UsageError", e.what(), 2);
  }

  try {
    const std::string mode = app.get_subcommands().front()->get_name();
    std::vector<std::string> sets = {"mode=\"" + mode + "\""};
    if (!out_path.empty()) sets.push_back("output.path=" + nlohmann::json(out_path).dump());
    if (!format.empty()) sets.push_back("output.format=\"" + format + "\"");
    if (seed) sets.push_back("seed=" + std::to_string(*seed));
    sets.insert(sets.end(), overrides.begin(), overrides.end());

    std::string text = config_path.empty() ? std::string{} : read_text(config_path);
    if (!config_path.empty()) {
      const auto doc = nlohmann::json::parse(text, nullptr, false);
      if (doc.is_object() && doc.contains("mode") && doc["mode"] != mode) {
        throw kdsim::ConfigError("mode: config says " + doc["mode"].dump() + " but subcommand is '" +
                                 mode + "'");
      }
    }
    text = kdsim::apply_overrides(text, sets);

    kdsim::ElectronConstants constants;
    if (const char* env = std::getenv(kdsim::kConstantsEnvVar); env && *env) {
      constants = kdsim::load_constants_file(env);
    }
    const kdsim::RunConfig config = kdsim::parse_config(text, constants);
    if (echo) {
      std::cout << kdsim::echo_config(config) << '\n';
      return 0;
    }

    const kdsim::ResultEnvelope envelope = kdsim::run(config);
    const std::string bytes = kdsim::emit(envelope, config.output.format);
    if (!region_out.empty()) {
      const auto* fit = std::get_if<kdsim::FitPayload>(&envelope.payload);
      if (!fit) throw kdsim::FormatMismatch("--region-out applies to fit mode only");
      write_text(region_out, kdsim::emit_region_csv(fit->region));
    }
    write_text(config.output.path, bytes);
  } catch (const kdsim::ConfigError& e) {
    return error_record("ConfigError", e.what(), 1);
  } catch (const kdsim::DomainError& e) {
    return error_record("DomainError", e.what(), 1);
  } catch (const kdsim::NumericalFailure& e) {
    return error_record("NumericalFailure", e.what(), 1);
  } catch (const kdsim::FormatMismatch& e) {
    return error_record("FormatMismatch", e.what(), 1);
  } catch (const std::exception& e) {
    return error_record("Error", e.what(), 1);
  }
  return 0;
}
