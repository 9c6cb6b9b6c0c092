#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace switchjump::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (std::size_t c = 0; c < k.size(); ++c) {
    const char ch = k[c];
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') continue;
    if (ch == '.' && k[c - 1] != '.') continue;
    return false;
  }
  return true;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + "invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(where + key + ": empty value");
    if (cfg.values_.count(key)) {
      throw ConfigError(where + key + ": duplicate key (first set on line " + std::to_string(cfg.lines_[key]) + ")");
    }
    cfg.values_[key] = value;
    cfg.lines_[key] = line;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ":0: cannot open config file");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  lines_.emplace(key, 0);
}

void Config::fail(const std::string& key, const std::string& message) const {
  auto it = lines_.find(key);
  const int line = it == lines_.end() ? 0 : it->second;
  throw ConfigError(source_ + ":" + std::to_string(line) + ": " + key + ": " + message);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    fail(key, "expected a number, got '" + it->second + "'");
  }
  if (used != it->second.size()) fail(key, "expected a number, got '" + it->second + "'");
  return v;
}

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(it->second, &used);
  } catch (const std::exception&) {
    fail(key, "expected an integer, got '" + it->second + "'");
  }
  if (used != it->second.size()) fail(key, "expected an integer, got '" + it->second + "'");
  return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  fail(key, "expected true or false, got '" + it->second + "'");
}

std::vector<double> Config::list(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) fail(key, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "expected a comma-separated list of numbers");
  return out;
}

std::map<std::string, std::string> Config::section(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(p, 0) == 0) out[k.substr(p.size())] = v;
  }
  return out;
}

void Config::check_keys(const std::vector<std::string>& sections, const std::vector<std::string>& keys,
                        const std::vector<std::string>& closed) const {
  for (const auto& [k, _] : values_) {
    const auto dot = k.find('.');
    const std::string sec = dot == std::string::npos ? k : k.substr(0, dot);
    if (dot == std::string::npos || std::find(sections.begin(), sections.end(), sec) == sections.end()) {
      fail(k, "unknown section '" + sec + "'");
    }
    if (std::find(closed.begin(), closed.end(), sec) != closed.end() &&
        std::find(keys.begin(), keys.end(), k) == keys.end()) {
      fail(k, "unknown key");
    }
  }
}

std::uint64_t Config::hash() const {
  std::string canon;
  for (const auto& [k, v] : values_) canon += k + "=" + v + "\n";
  return fnv1a64(canon);
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace switchjump::cli
