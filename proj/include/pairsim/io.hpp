#pragma once

// File formats shared by the runner, the analyzer and the C interface.
//
//   histogram   CSV `bin_start_ns,counts` with a `key = value` sidecar
//   scan        CSV `phase_rad,counts`
//   report      `key = value` lines in a fixed order
//
// All writers are byte-deterministic: fixed number formatting, no clocks.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pairsim/analyze.hpp"
#include "pairsim/detect.hpp"

namespace pairsim::io {

/// Shortest-ish round-trippable text for a double ("%.10g").
std::string format_number(double value);

void write_histogram_csv(std::ostream& out, const detect::Histogram& histogram);
/// Throws Error(parse) naming `name` and the line. Bins must be evenly spaced;
/// a single-row file takes `fallback_bin_width`.
detect::Histogram read_histogram_csv(std::istream& in, const std::string& name,
                                     double fallback_bin_width = 0.1e-9);

struct HistogramMeta {
  double t0 = 0.0;          ///< origin of bin 0 [s]
  double bin_width = 0.0;   ///< [s]
  double duration = 0.0;    ///< acquisition time [s]
  double stop_delay = 0.0;  ///< [s]
  std::uint64_t starts = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

std::string histogram_meta_text(const HistogramMeta& meta);
HistogramMeta parse_histogram_meta(const std::string& text, const std::string& name);

void write_scan_csv(std::ostream& out, std::span<const analyze::ScanPoint> scan);
std::vector<analyze::ScanPoint> read_scan_csv(std::istream& in, const std::string& name);

/// Ordered `key = value` report.
class Report {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, std::int64_t value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  std::string text() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string read_file(const std::string& path);
/// Throws Error(io) when the file cannot be written.
void write_file(const std::string& path, const std::string& content);

}  // namespace pairsim::io
