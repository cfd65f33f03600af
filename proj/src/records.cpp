#include "spca/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spca/error.hpp"

namespace spca {

const std::string& csv_header() {
  static const std::string h =
      "algorithm,family,d,s,k,gamma,delta,n,seed,mode,r,T,metric,value,wall_ms,iterations_used,flags";
  return h;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\"") != std::string::npos) {
    throw ParameterError(std::string("record ") + what + " '" + s + "' contains a CSV delimiter");
  }
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    check_field(f, "flag");
    if (f.empty() || f.find(';') != std::string::npos) throw ParameterError("record flag '" + f + "' is empty or contains ';'");
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

}  // namespace

std::string to_csv_row(const Record& r) {
  check_field(r.algorithm, "algorithm");
  check_field(r.family, "family");
  check_field(r.mode, "mode");
  check_field(r.metric, "metric");
  std::string out;
  out.reserve(160);
  auto add = [&](const std::string& s) {
    out += s;
    out += ',';
  };
  add(r.algorithm);
  add(r.family);
  add(std::to_string(r.d));
  add(std::to_string(r.s));
  add(std::to_string(r.k));
  add(format_double(r.gamma));
  add(format_double(r.delta));
  add(std::to_string(r.n));
  add(std::to_string(r.seed));
  add(r.mode);
  add(std::to_string(r.r));
  add(std::to_string(r.T));
  add(r.metric);
  add(format_double(r.value));
  add(format_double(r.wall_ms));
  add(std::to_string(r.iterations_used));
  out += join_flags(r.flags);
  return out;
}

void sort_records(std::vector<Record>& recs) {
  std::stable_sort(recs.begin(), recs.end(), [](const Record& a, const Record& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.seed < b.seed;
  });
}

std::string to_csv(const std::vector<Record>& recs) {
  std::string out = csv_header() + "\n";
  for (const auto& r : recs) out += to_csv_row(r) + "\n";
  return out;
}

void write_csv(const std::string& path, const std::vector<Record>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << to_csv(recs);
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

template <class T>
T field_number(const std::string& text, const std::string& path, std::size_t line) {
  if constexpr (std::is_floating_point_v<T>) {
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    if (text == "nan") return NAN;
  }
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ParseError(path, line, "bad numeric field '" + text + "'");
  return v;
}

}  // namespace

std::vector<Record> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != csv_header()) throw ParseError(path, 1, "missing or wrong CSV header");
  std::vector<Record> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) f.push_back(cur);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 17) throw ParseError(path, lineno, "expected 17 fields, got " + std::to_string(f.size()));
    Record r;
    r.algorithm = f[0];
    r.family = f[1];
    r.d = field_number<Index>(f[2], path, lineno);
    r.s = field_number<Index>(f[3], path, lineno);
    r.k = field_number<Index>(f[4], path, lineno);
    r.gamma = field_number<double>(f[5], path, lineno);
    r.delta = field_number<double>(f[6], path, lineno);
    r.n = field_number<Index>(f[7], path, lineno);
    r.seed = field_number<std::uint64_t>(f[8], path, lineno);
    r.mode = f[9];
    r.r = field_number<Index>(f[10], path, lineno);
    r.T = field_number<Index>(f[11], path, lineno);
    r.metric = f[12];
    r.value = field_number<double>(f[13], path, lineno);
    r.wall_ms = field_number<double>(f[14], path, lineno);
    r.iterations_used = field_number<Index>(f[15], path, lineno);
    std::istringstream fs(f[16]);
    while (std::getline(fs, cur, ';'))
      if (!cur.empty()) r.flags.push_back(cur);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace spca
