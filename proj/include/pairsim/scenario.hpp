#pragma once

// Experiment descriptions read from configuration text and the runners that
// turn them into output files. Runners return file contents in memory; the
// caller decides where they go.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairsim/analyze.hpp"
#include "pairsim/config.hpp"
#include "pairsim/detect.hpp"
#include "pairsim/pathcalc.hpp"
#include "pairsim/source.hpp"

namespace pairsim::scenario {

inline constexpr const char* version = "1.0.0";

enum class Kind { cw_coincidence, pulsed_coincidence, franson, timebin, qpm_design };

const char* kind_name(Kind kind) noexcept;

struct QpmDesign {
  std::string model = "lithium_niobate";
  std::vector<double> model_params;
  double temperature = 100.0;     ///< [deg C]
  double pump = 657e-9;           ///< [m]
  double signal = 1314e-9;        ///< [m]
  double length = 3.2e-2;         ///< [m]
  std::optional<double> period;   ///< fixed grating instead of the solved one [m]
  double grid_start = 1200e-9;
  double grid_stop = 1440e-9;
  std::size_t grid_points = 2401;
};

struct Scenario {
  Kind kind = Kind::cw_coincidence;
  std::optional<std::uint64_t> seed;

  source::SourceConfig source;
  source::Routing routing = source::Routing::beamsplitter;
  std::array<double, 2> transmission{1.0, 1.0};
  std::array<detect::DetectorSpec, 2> detectors{};

  double tac_range = 60e-9;
  double tac_bin = 0.1e-9;
  double stop_delay = 5e-9;
  detect::CoincidenceWindow window{5e-9, 2e-9};

  double duration = 1.0;          ///< CW [s]
  std::int64_t pulses = 10000000; ///< pulsed

  pathcalc::InterferometerSpec alice;
  pathcalc::InterferometerSpec bob;
  std::optional<pathcalc::InterferometerSpec> pump_interferometer;
  int port_a = 0;
  int port_b = 0;
  double v_dephase = 1.0;

  std::vector<double> phases;     ///< Alice's phase grid [rad]
  double accidental_ratio = 0.0;  ///< franson: accidental/signal ratio to inject, 0 = none
  detect::CoincidenceWindow reference_a;  ///< timebin: start time after the pump tick
  detect::CoincidenceWindow reference_b;  ///< timebin: stop time after the pump tick

  bool write_events = false;
  QpmDesign qpm;

  std::string digest;  ///< FNV-1a of the canonical configuration text

  static Scenario from_config(const Config& config);

  /// Detection probability per arm: transmission times quantum efficiency.
  double detection(int arm) const;
  pathcalc::Setup setup(double alice_phase) const;
};

Scenario parse(const std::string& text, const std::string& origin = "<config>");
Scenario load(const std::string& path);

/// Output file name -> content.
using Files = std::map<std::string, std::string>;

/// Runs a scenario. A seed override replaces the configured seed.
Files run(const Scenario& scenario, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Writes every file into `directory`, creating it if needed.
void write_files(const Files& files, const std::string& directory);

struct AnalyzeOptions {
  double spacing = 12.5e-9;  ///< expected peak spacing for histograms [s]
  analyze::PairSplitting splitting = analyze::PairSplitting::deterministic;
  bool pileup_correction = true;
  /// Converter starts behind a histogram; 0 = unknown. analyze_file reads it
  /// from the `.meta` sidecar when present.
  std::uint64_t starts = 0;
  // Scan accidentals; all four must be positive to enable the correction.
  double singles_1 = 0.0;  ///< [Hz]
  double singles_2 = 0.0;  ///< [Hz]
  double window = 0.0;     ///< [s]
  double duration = 0.0;   ///< counting time per point [s]
};

/// Reads a histogram or scan CSV (told apart by the header) and returns the
/// report text.
std::string analyze_text(const std::string& content, const std::string& name,
                         const AnalyzeOptions& options);
std::string analyze_file(const std::string& path, const AnalyzeOptions& options);

/// Poling period and spectrum: files `qpm_report.txt` and `spectrum.csv`.
Files qpm_design(const QpmDesign& design);
QpmDesign qpm_from_config(const Config& config);

}  // namespace pairsim::scenario
