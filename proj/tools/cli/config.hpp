#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "switchjump/errors.hpp"

namespace switchjump::cli {

// Malformed config input; the message carries "source:line: ".
class ConfigError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

// Flat "key = value" text. Keys are dotted (sim.dt, model.delta); '#' starts a
// comment; blank lines are ignored; duplicate keys are errors.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string text(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;

  // Entries "prefix.rest" returned as {"rest": value}.
  std::map<std::string, std::string> section(const std::string& prefix) const;

  // Throws ConfigError at the first key whose section is not in `sections`
  // or whose full name is not in `keys` (for sections listed in `closed`).
  void check_keys(const std::vector<std::string>& sections, const std::vector<std::string>& keys,
                  const std::vector<std::string>& closed) const;

  // Line-anchored error for `key` ("source:line: key: message").
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  // FNV-1a over the sorted "key=value\n" lines.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace switchjump::cli
