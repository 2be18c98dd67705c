#include "pairsim/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pairsim/config.hpp"
#include "pairsim/error.hpp"

namespace pairsim::io {

namespace {

[[noreturn]] void parse_error(const std::string& name, int line, const std::string& message) {
  throw Error(Errc::parse, name + ":" + std::to_string(line) + ": " + message);
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Two numeric columns; returns false on a blank line.
bool split_row(const std::string& row, const std::string& name, int line, double& a, double& b) {
  if (row.find_first_not_of(" \t") == std::string::npos) return false;
  const auto comma = row.find(',');
  if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
    parse_error(name, line, "expected two comma-separated columns");
  auto number = [&](const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (text.empty() || errno != 0 || *end != '\0' || !std::isfinite(v))
      parse_error(name, line, "'" + text + "' is not a number");
    return v;
  };
  a = number(row.substr(0, comma));
  b = number(row.substr(comma + 1));
  return true;
}

void expect_header(std::istream& in, const std::string& name, const std::string& header) {
  std::string first;
  if (!std::getline(in, first)) parse_error(name, 1, "empty file, expected header '" + header + "'");
  if (strip_cr(first) != header) parse_error(name, 1, "expected header '" + header + "'");
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_histogram_csv(std::ostream& out, const detect::Histogram& histogram) {
  out << "bin_start_ns,counts\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i)
    out << format_number(histogram.bin_start(i) / 1e-9) << ',' << histogram.counts[i] << '\n';
}

detect::Histogram read_histogram_csv(std::istream& in, const std::string& name,
                                     double fallback_bin_width) {
  expect_header(in, name, "bin_start_ns,counts");
  std::vector<double> starts;
  detect::Histogram h;
  std::string row;
  int line = 1;
  while (std::getline(in, row)) {
    ++line;
    double t = 0.0, c = 0.0;
    if (!split_row(strip_cr(row), name, line, t, c)) continue;
    if (c < 0.0 || c != std::floor(c)) parse_error(name, line, "counts must be a non-negative integer");
    if (starts.size() >= 2) {
      const double w = starts[1] - starts[0];
      const double expected = starts.front() + w * static_cast<double>(starts.size());
      if (std::abs(t - expected) > 1e-6 * std::abs(w) + 1e-9)
        parse_error(name, line, "bins are not evenly spaced");
    } else if (starts.size() == 1 && !(t > starts[0])) {
      parse_error(name, line, "bin starts must increase");
    }
    starts.push_back(t);
    h.counts.push_back(static_cast<std::uint64_t>(c));
  }
  h.origin = starts.empty() ? 0.0 : starts.front() * 1e-9;
  h.bin_width = starts.size() >= 2 ? (starts[1] - starts[0]) * 1e-9 : fallback_bin_width;
  return h;
}

std::string histogram_meta_text(const HistogramMeta& meta) {
  Report r;
  r.add("t0_ns", meta.t0 / 1e-9);
  r.add("bin_width_ns", meta.bin_width / 1e-9);
  r.add("duration_s", meta.duration);
  r.add("stop_delay_ns", meta.stop_delay / 1e-9);
  r.add("starts", meta.starts);
  r.add("seed", meta.seed);
  r.add("config_digest", meta.config_digest);
  return r.text();
}

HistogramMeta parse_histogram_meta(const std::string& text, const std::string& name) {
  const auto cfg = Config::parse(text, name);
  HistogramMeta m;
  m.t0 = cfg.get_double("t0_ns", 0.0) * 1e-9;
  m.bin_width = cfg.get_double("bin_width_ns", 0.0) * 1e-9;
  m.duration = cfg.get_double("duration_s", 0.0);
  m.stop_delay = cfg.get_double("stop_delay_ns", 0.0) * 1e-9;
  m.starts = static_cast<std::uint64_t>(cfg.get_int("starts", 0));
  m.seed = cfg.has("seed") ? cfg.require_uint("seed") : 0;
  m.config_digest = cfg.get_string("config_digest", "");
  return m;
}

void write_scan_csv(std::ostream& out, std::span<const analyze::ScanPoint> scan) {
  out << "phase_rad,counts\n";
  for (const auto& p : scan) out << format_number(p.phase) << ',' << format_number(p.counts) << '\n';
}

std::vector<analyze::ScanPoint> read_scan_csv(std::istream& in, const std::string& name) {
  expect_header(in, name, "phase_rad,counts");
  std::vector<analyze::ScanPoint> scan;
  std::string row;
  int line = 1;
  while (std::getline(in, row)) {
    ++line;
    double phase = 0.0, counts = 0.0;
    if (!split_row(strip_cr(row), name, line, phase, counts)) continue;
    if (counts < 0.0) parse_error(name, line, "counts must be non-negative");
    scan.push_back({phase, counts});
  }
  return scan;
}

void Report::add(const std::string& key, double value) { entries_.emplace_back(key, format_number(value)); }
void Report::add(const std::string& key, std::int64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}
void Report::add(const std::string& key, std::uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}
void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

std::string Report::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw Error(Errc::io, "failed writing '" + path + "'");
}

}  // namespace pairsim::io
