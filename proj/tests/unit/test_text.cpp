#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "spca/error.hpp"
#include "spca/models.hpp"
#include "spca/text.hpp"

using namespace spca;
namespace fs = std::filesystem;

namespace {

const std::string kDocword = std::string(SPCA_FIXTURE_DIR) + "/tiny_docword.txt";
const std::string kVocab = std::string(SPCA_FIXTURE_DIR) + "/tiny_vocab.txt";

std::map<std::pair<Index, Index>, double> entries(const SparseRows& x) {
  std::map<std::pair<Index, Index>, double> out;
  for (Index i = 0; i < x.n; ++i)
    for (Index k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) out[{i, x.col[k]}] = x.val[k];
  return out;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(BagOfWords, TinyFixtureCounts) {
  const TextCorpus c = load_bagofwords(kDocword, kVocab, 3, 5);
  // Totals: w1=3, w2=4, w3=2, w4=1, w5=3; w1 precedes w5 on the tie.
  EXPECT_EQ(c.word_ids, (std::vector<Index>{2, 1, 5, 3, 4}));
  EXPECT_EQ(c.vocabulary, (std::vector<std::string>{"beta", "alpha", "epsilon", "gamma", "delta"}));
  const std::map<std::pair<Index, Index>, double> expected{
      {{0, 1}, 2}, {{0, 3}, 1}, {{1, 0}, 4}, {{1, 3}, 1}, {{2, 1}, 1}, {{2, 2}, 3}, {{2, 4}, 1}};
  EXPECT_EQ(entries(c.counts), expected);
  EXPECT_EQ(c.counts.n, 3u);
  EXPECT_EQ(c.counts.d, 5u);
}

TEST(BagOfWords, RestrictsDocumentsBeforeRanking) {
  const TextCorpus c = load_bagofwords(kDocword, kVocab, 2, 2);
  EXPECT_EQ(c.word_ids, (std::vector<Index>{2, 1}));
  const std::map<std::pair<Index, Index>, double> expected{{{0, 1}, 2}, {{1, 0}, 4}};
  EXPECT_EQ(entries(c.counts), expected);
}

TEST(BagOfWords, DocFrequencyRanking) {
  const TextCorpus c = load_bagofwords(kDocword, kVocab, 3, 5, VocabRanking::doc_frequency);
  EXPECT_EQ(c.word_ids, (std::vector<Index>{1, 3, 2, 4, 5}));
}

TEST(BagOfWords, Errors) {
  EXPECT_THROW(load_bagofwords(kDocword, kVocab, 4, 5), ParameterError);
  EXPECT_THROW(load_bagofwords(kDocword, kVocab, 3, 6), ParameterError);
  EXPECT_THROW(load_bagofwords("/nonexistent/docword.txt", kVocab, 1, 1), IoError);

  const auto mismatch = write_temp("spca_nnz_mismatch.txt", "3\n5\n8\n1 1 2\n1 3 1\n2 2 4\n");
  try {
    load_bagofwords(mismatch.string(), kVocab, 3, 5);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
  const auto malformed = write_temp("spca_malformed.txt", "3\n5\n2\n1 1 2\n1 x 1\n");
  try {
    load_bagofwords(malformed.string(), kVocab, 3, 5);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
  }
}

namespace {

// Docs alternate between two disjoint topics of five words; ten noise words appear sparsely.
fs::path planted_corpus(const std::string& tag, fs::path& vocab) {
  std::mt19937_64 gen(3);
  std::string body;
  Index nnz = 0;
  const Index docs = 300, words = 20;
  for (Index d = 1; d <= docs; ++d) {
    const Index base = d % 2 ? 0 : 5;
    for (Index w = 1; w <= words; ++w) {
      Index count = 0;
      if (w - 1 >= base && w - 1 < base + 5) count = 2 + gen() % 6;
      else if (w > 10 && gen() % 4 == 0) count = 1;
      if (count) {
        body += std::to_string(d) + " " + std::to_string(w) + " " + std::to_string(count) + "\n";
        ++nnz;
      }
    }
  }
  std::string v;
  for (Index w = 1; w <= words; ++w) v += "w" + std::to_string(w) + "\n";
  vocab = write_temp("spca_planted_vocab_" + tag + ".txt", v);
  return write_temp("spca_planted_docword_" + tag + ".txt",
                    std::to_string(docs) + "\n" + std::to_string(words) + "\n" + std::to_string(nnz) + "\n" + body);
}

}  // namespace

TEST(TextPipeline, PlantedTopicsGiveDisjointTopWords) {
  fs::path vocab;
  const fs::path docword = planted_corpus("topics", vocab);
  const TextCorpus c = load_bagofwords(docword.string(), vocab.string(), 300, 20);
  TextConfig cfg;
  cfg.k = 2;
  cfg.r = 5;
  cfg.T = 30;
  cfg.top_words = 5;
  cfg.restart_budget = 20;
  const TextResult res = text_pipeline(c, cfg);
  ASSERT_EQ(res.components.size(), 2u);
  std::set<std::string> a(res.components[0].words.begin(), res.components[0].words.end());
  std::set<std::string> b(res.components[1].words.begin(), res.components[1].words.end());
  const std::set<std::string> t1{"w1", "w2", "w3", "w4", "w5"}, t2{"w6", "w7", "w8", "w9", "w10"};
  EXPECT_TRUE((a == t1 && b == t2) || (a == t2 && b == t1));
  for (const auto& comp : res.components) EXPECT_LE(comp.nnz, cfg.r);
}

TEST(TextPipeline, CenteredOperatorMatchesDense) {
  fs::path vocab;
  const fs::path docword = planted_corpus("center", vocab);
  const TextCorpus c = load_bagofwords(docword.string(), vocab.string(), 300, 20);
  Vec mean;
  const auto x = log_features(c, mean);
  const CovOperator op = CovOperator::sparse_data(x, mean);
  // Dense (1/n) Σ (x − μ)(x − μ)ᵀ.
  const Index d = x->d;
  std::vector<double> dense(d * d, 0.0);
  for (Index i = 0; i < x->n; ++i) {
    Vec row(d, 0.0);
    for (Index k = x->row_ptr[i]; k < x->row_ptr[i + 1]; ++k) row[x->col[k]] = x->val[k];
    for (Index j = 0; j < d; ++j) row[j] -= mean[j];
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) dense[p * d + q] += row[p] * row[q] / double(x->n);
  }
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    Vec u(d);
    for (auto& e : u) e = g(gen);
    const Vec got = op.apply(u);
    for (Index p = 0; p < d; ++p) {
      double want = 0.0;
      for (Index q = 0; q < d; ++q) want += dense[p * d + q] * u[q];
      EXPECT_NEAR(got[p], want, 1e-8);
    }
  }
}

TEST(TextPipeline, SingleComponentWithoutTruncationIsPowerMethod) {
  fs::path vocab;
  const fs::path docword = planted_corpus("power", vocab);
  const TextCorpus c = load_bagofwords(docword.string(), vocab.string(), 300, 20);
  TextConfig cfg;
  cfg.k = 1;
  cfg.r = 20;
  cfg.T = 200;
  cfg.restart_budget = 20;
  const TextResult res = text_pipeline(c, cfg);
  ASSERT_EQ(res.components.size(), 1u);
  Vec mean;
  const auto x = log_features(c, mean);
  const SymMatrix cov = CovOperator::sparse_data(x, mean).to_dense();
  const Vec top = top_eigenpair(cov).pair.vector;
  EXPECT_LE(sin2_angle(res.components[0].values, top), 1e-8);
}

TEST(TextPipeline, VarianceRankedRestarts) {
  SparseRows x;
  x.n = 4;
  x.d = 3;
  // Column 1 constant, column 2 most variable.
  x.row_ptr = {0, 2, 4, 6, 8};
  x.col = {1, 2, 0, 1, 1, 2, 0, 1};
  x.val = {1, 5, 1, 1, 1, 5, 1, 1};
  const Vec mean{0.5, 1.0, 2.5};
  EXPECT_EQ(variance_ranked(x, mean, 2), (std::vector<Index>{0, 2}));
  EXPECT_EQ(variance_ranked(x, mean, 1), (std::vector<Index>{2}));
}
