#include "spca/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spca/error.hpp"

namespace spca {

namespace {

const std::vector<std::string> kKeys = {
    // record columns
    "algorithm", "family", "d", "s", "k", "gamma", "delta", "n", "seed", "mode", "r", "T", "metric",
    "value", "wall_ms", "iterations_used", "flags",
    // experiment knobs
    "experiment", "algorithms", "n_grid", "seeds", "s_grid", "gamma_grid", "delta_grid", "T_grid",
    "checkpoints", "r_factor", "tolerance", "backend", "timing", "population", "i_star",
    "tau", "u", "lam1", "lam2", "lam3", "lam4", "embed_dim", "enforce_preconditions", "graph_seed",
    "docword", "vocab", "n_docs", "vocab_size", "vocab_ranking", "restart_budget", "top_words",
    "instance", "dataset"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace

bool Config::known_key(const std::string& key) {
  return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

const std::vector<std::string>& Config::known_keys() { return kKeys; }

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ParameterError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ParameterError("unknown config key '" + key + "'");
  if (value.empty()) throw ParameterError("config key '" + key + "' has an empty value");
  values_[key] = value;
}

void Config::apply_overrides(const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ParameterError("override '" + o + "' is not key=value");
    set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
}

void Config::set_default(const std::string& key, const std::string& value) {
  if (!has(key)) set(key, value);
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  const double x = parse_number<double>(key, *v);
  if (!std::isfinite(x)) throw ParameterError("config key '" + key + "' must be finite");
  return x;
}

Index Config::get_index(const std::string& key, Index fallback) const {
  const auto v = raw(key);
  return v ? parse_number<Index>(key, *v) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = raw(key);
  return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  if (*v == "on" || *v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "off" || *v == "false" || *v == "0" || *v == "no") return false;
  throw ParameterError("config key '" + key + "': expected on/off, got '" + *v + "'");
}

std::vector<Index> parse_index_grid(const std::string& text, const std::string& key) {
  std::vector<Index> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 || parts[2].size() < 2 || (parts[2][0] != 'x' && parts[2][0] != '+')) {
      throw ParameterError("config key '" + key + "': grid must look like a:b:xk or a:b:+k");
    }
    const Index lo = parse_number<Index>(key, parts[0]);
    const Index hi = parse_number<Index>(key, parts[1]);
    const bool geometric = parts[2][0] == 'x';
    const double step = parse_number<double>(key, parts[2].substr(1));
    if (lo < 1 || hi < lo || (geometric ? step <= 1.0 : step < 1.0)) {
      throw ParameterError("config key '" + key + "': grid needs 1 <= a <= b and a growing step");
    }
    double x = static_cast<double>(lo);
    while (x <= static_cast<double>(hi) * (1.0 + 1e-12)) {
      const auto v = static_cast<Index>(std::llround(x));
      if (out.empty() || v > out.back()) out.push_back(v);
      x = geometric ? x * step : x + step;
    }
  } else {
    for (const auto& p : split(text, ',')) out.push_back(parse_number<Index>(key, p));
  }
  if (out.empty()) throw ParameterError("config key '" + key + "': empty grid");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw ParameterError("config key '" + key + "': grid must be strictly increasing");
  }
  return out;
}

std::vector<Index> Config::get_index_grid(const std::string& key, const std::vector<Index>& fallback) const {
  const auto v = raw(key);
  return v ? parse_index_grid(*v, key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& p : split(*v, ',')) out.push_back(parse_number<double>(key, p));
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  auto out = split(*v, ',');
  for (const auto& p : out)
    if (p.empty()) throw ParameterError("config key '" + key + "' has an empty list entry");
  return out;
}

std::string Config::manifest() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : manifest()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spca
