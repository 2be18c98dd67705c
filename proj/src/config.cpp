#include "pairsim/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pairsim/error.hpp"

namespace pairsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size();
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string content = trim(raw);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::config, origin + ":" + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty())
      throw Error(Errc::config, origin + ":" + std::to_string(line) + ": empty key");
    if (cfg.entries_.count(key))
      throw Error(Errc::config,
                  origin + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    cfg.entries_[key] = {value, line};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = {value, 0};
}

const Config::Entry* Config::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  std::string where = origin_;
  if (it != entries_.end() && it->second.line > 0) where += ":" + std::to_string(it->second.line);
  throw Error(Errc::config, where + ": key '" + key + "': " + message);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* e = lookup(key);
  return e ? e->value : fallback;
}

std::string Config::require_string(const std::string& key) const {
  const auto* e = lookup(key);
  if (!e) fail(key, "required key is missing");
  return e->value;
}

std::optional<double> Config::find_double(const std::string& key) const {
  const auto* e = lookup(key);
  if (!e) return std::nullopt;
  double v = 0.0;
  if (!parse_number(e->value, v)) fail(key, "'" + e->value + "' is not a number");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return find_double(key).value_or(fallback);
}

double Config::require_double(const std::string& key) const {
  auto v = find_double(key);
  if (!v) fail(key, "required key is missing");
  return *v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = find_double(key);
  if (!v) return fallback;
  if (*v != static_cast<double>(static_cast<std::int64_t>(*v)))
    fail(key, "expected an integer");
  return static_cast<std::int64_t>(*v);
}

std::uint64_t Config::require_uint(const std::string& key) const {
  const auto* e = lookup(key);
  if (!e) fail(key, "required key is missing");
  errno = 0;
  char* end = nullptr;
  const auto v = std::strtoull(e->value.c_str(), &end, 10);
  if (errno != 0 || e->value.empty() || e->value[0] == '-' || end != e->value.c_str() + e->value.size())
    fail(key, "'" + e->value + "' is not an unsigned integer");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* e = lookup(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(key, "expected true or false");
}

std::vector<double> Config::get_list(const std::string& key) const {
  const auto* e = lookup(key);
  std::vector<double> out;
  if (!e) return out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_number(trim(item), v)) fail(key, "'" + trim(item) + "' is not a number");
    out.push_back(v);
  }
  return out;
}

void Config::reject_unused() const {
  for (const auto& [key, entry] : entries_) {
    if (!used_.count(key)) {
      std::string where = origin_;
      if (entry.line > 0) where += ":" + std::to_string(entry.line);
      throw Error(Errc::config, where + ": unknown key '" + key + "'");
    }
  }
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace pairsim
