#pragma once

// Experiment rows in the harness CSV schema.

#include <cstdint>
#include <string>
#include <vector>

#include "spca/linalg.hpp"

namespace spca {

struct Record {
  std::string algorithm;
  std::string family;
  Index d = 0;
  Index s = 0;
  Index k = 1;
  double gamma = 0.0;
  double delta = 0.0;
  Index n = 0;  // 0: population covariance
  std::uint64_t seed = 0;
  std::string mode;  // full | disjoint | population | one-shot
  Index r = 0;
  Index T = 0;
  std::string metric;  // sin2 | correlation2 | n_scale
  double value = 0.0;
  double wall_ms = 0.0;
  Index iterations_used = 0;
  std::vector<std::string> flags;

  /// Position of the producing configuration point; the primary sort key.
  Index order = 0;
};

const std::string& csv_header();
/// Shortest round-trip decimal for doubles, so equal values print identically.
std::string format_double(double x);
std::string to_csv_row(const Record& rec);
/// Stable sort by (order, seed).
void sort_records(std::vector<Record>& recs);
std::string to_csv(const std::vector<Record>& recs);
void write_csv(const std::string& path, const std::vector<Record>& recs);
/// Reads a file written by write_csv (`order` is not stored and reads back as 0).
std::vector<Record> read_csv(const std::string& path);

}  // namespace spca
