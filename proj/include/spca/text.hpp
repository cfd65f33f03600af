#pragma once

// Bag-of-words loading and the sparse-component text pipeline.

#include <memory>
#include <string>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/models.hpp"

namespace spca {

enum class VocabRanking { total_count, doc_frequency };

struct TextCorpus {
  Index n_docs = 0;
  Index vocab_size = 0;
  /// Raw counts, one row per retained document, columns in ranking order.
  SparseRows counts;
  std::vector<std::string> vocabulary;
  /// 1-based word IDs of the source file, aligned with `vocabulary`.
  std::vector<Index> word_ids;
};

/// UCI bag-of-words reader. Keeps documents 1..n_docs and the vocab_size
/// highest-ranked words (ties to the smaller word ID), reindexed by rank.
TextCorpus load_bagofwords(const std::string& docword_path, const std::string& vocab_path, Index n_docs,
                           Index vocab_size, VocabRanking ranking = VocabRanking::total_count);

struct TextConfig {
  Index k = 4;
  Index r = 50;
  Index T = 50;
  Index restart_budget = 200;
  Index top_words = 10;
  unsigned threads = 1;
};

struct TextComponent {
  Vec values;
  std::vector<std::string> words;  // largest |entry| first, ties to the smaller index
  std::vector<double> weights;
  Index nnz = 0;
};

struct TextResult {
  std::vector<TextComponent> components;
  std::vector<Index> restarts;  // coordinates used as RTPM restarts
  Vec mean;
};

/// log(1 + count) features with their column means.
std::shared_ptr<SparseRows> log_features(const TextCorpus& corpus, Vec& mean);
/// Restart coordinates: the `budget` largest centered feature variances (ties to the smaller index), ascending.
std::vector<Index> variance_ranked(const SparseRows& x, const Vec& mean, Index budget);

TextResult text_pipeline(const TextCorpus& corpus, const TextConfig& cfg);

}  // namespace spca
