#pragma once

// Flat `key = value` configuration text with dotted section prefixes.
//
//   # comment
//   kind = franson
//   source.pump_power_uw = 1.0
//
// Values are taken verbatim after trimming; a trailing `# ...` comment is
// stripped. Every key must be consumed by the reader, so typos surface as
// errors naming the key.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pairsim {

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::optional<double> find_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t require_uint(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Throws Error(config) naming the first key never read.
  void reject_unused() const;

  /// `key = value` lines in key order.
  std::string canonical_text() const;

  const std::string& origin() const noexcept { return origin_; }

  /// Throws Error(config) naming the key and, if known, its line.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* lookup(const std::string& key) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

}  // namespace pairsim
