#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chiralcat/model.hpp"
#include "chiralcat/open_dynamics.hpp"
#include "chiralcat/wigner.hpp"

namespace chiralcat::cli {

/// Anything wrong with the configuration itself. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownPreset : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class RunKind { ClosedCurves, OpenCurves, WignerMap, AnalyticCurves, Sagnac, Sweep };

std::string_view to_string(RunKind k);

struct TimeGrid {
  double start = 0.0;
  double end = 80.0;
  int samples = 401;
  /// Adds t_s to the grid so the cat-time value is sampled exactly.
  bool include_cat_time = true;

  std::vector<double> points(std::optional<double> cat_time) const;
};

struct RunSpec {
  RunKind kind = RunKind::ClosedCurves;
  TimeGrid times;
  GridSpec grid;
  std::vector<WignerSourceKind> sources{WignerSourceKind::Analytic};
  std::vector<Branch> branches{Branch::Plus, Branch::Minus};
  std::vector<Mode> modes{Mode::CW, Mode::CCW};
  std::optional<double> wigner_time;  // empty: t_s
  std::string output = "out";
  IntegratorOptions integrator;
  double tail_threshold = 1e-4;
  unsigned threads = 0;  // Wigner grid workers, 0 = hardware
};

struct SweepSpec {
  std::string parameter;  // a numeric key such as system.kappa
  std::vector<double> values;
  RunKind kind = RunKind::OpenCurves;
};

struct ExperimentConfig {
  SystemParams system;
  PhysicalParams physical;
  double coupling_rad_s = 0.0;  // J in rad/s, 0 when not supplied
  RunSpec run;
  SweepSpec sweep;

  void validate() const;
  /// Canonical key/value listing, in key-table order.
  std::vector<std::pair<std::string, std::string>> echo() const;
  /// Configuration of one sweep entry; kind becomes sweep.kind.
  ExperimentConfig sweep_entry(std::size_t i) const;
  std::string sweep_label(std::size_t i) const;
};

/// Parses "section.key = value" lines. '#' starts a comment. Unknown,
/// duplicate, or malformed keys throw ConfigError; so does a failed validate().
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_text(const ExperimentConfig& c);

ExperimentConfig preset(std::string_view name);
const std::vector<std::string_view>& preset_names();

}  // namespace chiralcat::cli
