#pragma once

// Experiment drivers. Each takes a resolved Config and returns records in a
// deterministic order that does not depend on the thread count.

#include <optional>
#include <string>
#include <vector>

#include "spca/config.hpp"
#include "spca/counterexamples.hpp"
#include "spca/records.hpp"
#include "spca/text.hpp"

namespace spca {

struct RunOptions {
  unsigned threads = 1;
  /// Record wall_ms; off keeps records byte-reproducible.
  bool timing = false;
};

/// A covariance model built from config keys, with the metadata every record carries.
struct BuiltModel {
  PlantedInstance instance;
  std::string family;
  std::vector<std::string> flags;
  double tau = 0.0;  // covthresh threshold
  std::optional<CounterexampleInstance> counterexample;
};

/// family ∈ {spiked_identity, spiked, covthresh, greedycorr, diagthresh, barrier}.
/// `s`/`gamma` override the config values when given.
BuiltModel build_model(const Config& cfg, std::optional<Index> s = {}, std::optional<double> gamma = {});

/// Sample seeds: seed, seed+1, …, seed+seeds−1.
std::vector<std::uint64_t> seed_list(const Config& cfg);

/// Algorithms on a fixed model over an n grid and seeds ("run").
std::vector<Record> run_recovery(const Config& cfg, const RunOptions& opt);

struct ScalingPoint {
  std::string axis;  // s | gamma | delta
  Index s = 0;
  double gamma = 0.0;
  double delta = 0.0;
  /// Per seed, smallest grid n reaching sin² ≤ delta; nullopt: above the grid.
  std::vector<std::optional<Index>> n_scale;
  /// Median over seeds; nullopt when the median itself is above the grid.
  std::optional<double> median;
};

struct ScalingResult {
  std::vector<Record> records;
  std::vector<ScalingPoint> points;
};

ScalingResult run_scaling(const Config& cfg, const RunOptions& opt);

struct RuntimeResult {
  std::vector<Record> records;
  std::vector<std::string> notes;
};

RuntimeResult run_runtime_accuracy(const Config& cfg, const RunOptions& opt);
std::vector<Record> run_counterexample_sweep(const Config& cfg, const RunOptions& opt);
std::vector<Record> run_ablation(const Config& cfg, const RunOptions& opt);

struct TextRunResult {
  std::vector<Record> records;
  TextResult result;
  TextCorpus corpus;
};

TextRunResult run_text(const Config& cfg, const RunOptions& opt);

/// Median of a sample with +∞ for missing entries; nullopt if the median is infinite.
std::optional<double> median_with_sentinel(std::vector<std::optional<Index>> values);
double median(std::vector<double> values);

}  // namespace spca
