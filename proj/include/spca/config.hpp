#pragma once

// Flat key=value run configuration. Keys are the CSV record columns plus a
// fixed set of experiment knobs; anything else is rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spca/linalg.hpp"

namespace spca {

class Config {
 public:
  /// Parses "key = value" lines; '#' starts a comment. Later lines win.
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  static bool known_key(const std::string& key);
  static const std::vector<std::string>& known_keys();

  /// Rejects unknown keys and empty values.
  void set(const std::string& key, const std::string& value);
  /// Applies "key=value" strings in order.
  void apply_overrides(const std::vector<std::string>& overrides);
  /// Fills keys that are not yet set.
  void set_default(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  Index get_index(const std::string& key, Index fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// "a:b:xk" (geometric, factor k), "a:b:+k" (arithmetic) or "a,b,c"; must be strictly increasing.
  std::vector<Index> get_index_grid(const std::string& key, const std::vector<Index>& fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  /// Sorted "key=value" lines; parse(manifest()) reproduces this config.
  std::string manifest() const;
  /// FNV-1a 64 of manifest(), as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<Index> parse_index_grid(const std::string& text, const std::string& key);

}  // namespace spca
