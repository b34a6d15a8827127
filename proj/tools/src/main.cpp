#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chiralcat/cli/config.hpp"
#include "chiralcat/cli/io.hpp"
#include "chiralcat/cli/run.hpp"
#include "chiralcat/errors.hpp"

using namespace chiralcat;
using namespace chiralcat::cli;

namespace {

std::string opt_ratio(const std::optional<double>& r) {
  return r ? format_double(*r) : std::string("n/a");
}

int print_dispersive(const ExperimentConfig& c) {
  const DispersiveReport r = dispersive_check(c.system);
  std::cout << "zeta_cw/(4 delta_sag)  = " << opt_ratio(r.sagnac_ratio_cw) << "\n"
            << "zeta_ccw/(4 delta_sag) = " << opt_ratio(r.sagnac_ratio_ccw) << "\n"
            << "mixing_cw              = " << format_double(r.mixing_ratio_cw) << "\n"
            << "mixing_ccw             = " << format_double(r.mixing_ratio_ccw) << "\n"
            << "threshold              = " << format_double(r.threshold) << "\n"
            << "dispersive check: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return r.pass ? kSuccess : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiral cat state simulator"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run a preset or a config file");
  std::string preset_name, config_path, out_dir;
  unsigned jobs = 1;
  bool seed_free = false;
  auto* preset_opt = simulate->add_option("--preset", preset_name, "fig2 .. fig8");
  auto* config_opt = simulate->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  simulate->add_option("--out", out_dir, "Output directory (default: run.output)");
  simulate->add_option("--jobs", jobs, "Concurrent sweep entries")->check(CLI::PositiveNumber);
  simulate->add_flag("--seed-free", seed_free, "Record that no random seed is involved");

  auto* sag = app.add_subcommand("sagnac", "Sagnac-Fizeau shift of a spinning resonator");
  PhysicalParams phys;
  double j_rad_s = 0.0;
  sag->add_option("--n-r", phys.refractive_index)->required();
  sag->add_option("--radius-m", phys.radius_m)->required();
  sag->add_option("--lambda-m", phys.wavelength_m)->required();
  sag->add_option("--omega-rad-s", phys.omega_rad_s)->required();
  sag->add_option("--dn-dlambda", phys.dn_dlambda, "Dispersion dn/dlambda in 1/m");
  sag->add_option("--j-rad-s", j_rad_s, "Coupling J in rad/s, to express the shift in units of J");

  auto* val = app.add_subcommand("validate", "Parse a config and run the dispersive check");
  std::string validate_path, validate_preset;
  auto* vcfg = val->add_option("--config", validate_path)->check(CLI::ExistingFile);
  val->add_option("--preset", validate_preset)->excludes(vcfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*simulate) {
      if (preset_name.empty() == config_path.empty()) {
        std::cerr << "simulate needs exactly one of --preset or --config\n";
        return kConfigError;
      }
      const ExperimentConfig cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
      return run(cfg, {out_dir, jobs, seed_free}, std::cerr);
    }
    if (*sag) {
      const double shift = sagnac_shift(phys);
      std::cout << "delta_sag_rad_s = " << format_double(shift) << "\n";
      if (j_rad_s > 0.0) std::cout << "delta_sag_over_j = " << format_double(shift / j_rad_s) << "\n";
      return kSuccess;
    }
    if (*val) {
      if (validate_path.empty() == validate_preset.empty()) {
        std::cerr << "validate needs exactly one of --config or --preset\n";
        return kConfigError;
      }
      const ExperimentConfig cfg =
          validate_path.empty() ? preset(validate_preset) : load_config(validate_path);
      return print_dispersive(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
  return kFailure;
}
