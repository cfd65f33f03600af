#include "spca/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spca/algos.hpp"
#include "spca/error.hpp"

namespace spca {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

Index parse_index(const std::string& text, const std::string& path, std::size_t line, const char* what) {
  Index v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ParseError(path, line, std::string("bad ") + what + " '" + text + "'");
  return v;
}

std::vector<Index> ranked_order(const std::vector<double>& key) {
  std::vector<Index> idx(key.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return key[a] > key[b]; });
  return idx;
}

}  // namespace

TextCorpus load_bagofwords(const std::string& docword_path, const std::string& vocab_path, Index n_docs,
                           Index vocab_size, VocabRanking ranking) {
  std::ifstream in(docword_path);
  if (!in) throw IoError("cannot open docword file '" + docword_path + "'");
  std::string line;
  std::size_t lineno = 0;
  Index header[3];
  for (auto& h : header) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(docword_path, lineno, "missing header line");
    const auto t = tokens(line);
    if (t.size() != 1) throw ParseError(docword_path, lineno, "header line must hold one integer");
    h = parse_index(t[0], docword_path, lineno, "header value");
  }
  const Index docs = header[0], words = header[1], nnz = header[2];
  if (n_docs < 1 || n_docs > docs) {
    throw ParameterError("n_docs = " + std::to_string(n_docs) + " outside [1, " + std::to_string(docs) + "]");
  }
  if (vocab_size < 1 || vocab_size > words) {
    throw ParameterError("vocab_size = " + std::to_string(vocab_size) + " outside [1, " + std::to_string(words) + "]");
  }

  struct Entry {
    Index doc, word, count;
  };
  std::vector<Entry> kept;
  Index body = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 3) throw ParseError(docword_path, lineno, "expected 'docID wordID count'");
    const Index doc = parse_index(t[0], docword_path, lineno, "docID");
    const Index word = parse_index(t[1], docword_path, lineno, "wordID");
    const Index count = parse_index(t[2], docword_path, lineno, "count");
    if (doc < 1 || doc > docs) throw ParseError(docword_path, lineno, "docID out of range");
    if (word < 1 || word > words) throw ParseError(docword_path, lineno, "wordID out of range");
    if (count < 1) throw ParseError(docword_path, lineno, "count must be positive");
    ++body;
    if (doc <= n_docs) kept.push_back({doc - 1, word - 1, count});
  }
  if (body != nnz) {
    throw ParseError(docword_path, 3,
                     "header NNZ = " + std::to_string(nnz) + " but body has " + std::to_string(body) + " entries");
  }

  std::ifstream vin(vocab_path);
  if (!vin) throw IoError("cannot open vocab file '" + vocab_path + "'");
  std::vector<std::string> vocab;
  std::size_t vline = 0;
  while (std::getline(vin, line)) {
    ++vline;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 1) throw ParseError(vocab_path, vline, "expected one word per line");
    vocab.push_back(t[0]);
  }
  if (vocab.size() != words) {
    throw ParseError(vocab_path, vline,
                     "vocabulary has " + std::to_string(vocab.size()) + " words, header says " + std::to_string(words));
  }

  std::vector<double> score(words, 0.0);
  for (const auto& e : kept) score[e.word] += ranking == VocabRanking::total_count ? static_cast<double>(e.count) : 1.0;
  std::vector<Index> order = ranked_order(score);
  order.resize(vocab_size);
  std::vector<Index> remap(words, words);
  for (Index j = 0; j < vocab_size; ++j) remap[order[j]] = j;

  std::sort(kept.begin(), kept.end(), [&](const Entry& a, const Entry& b) {
    if (a.doc != b.doc) return a.doc < b.doc;
    if (remap[a.word] != remap[b.word]) return remap[a.word] < remap[b.word];
    return a.word < b.word;
  });

  TextCorpus c;
  c.n_docs = n_docs;
  c.vocab_size = vocab_size;
  c.counts.n = n_docs;
  c.counts.d = vocab_size;
  c.counts.row_ptr.assign(n_docs + 1, 0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Entry& e = kept[i];
    if (i > 0 && kept[i - 1].doc == e.doc && kept[i - 1].word == e.word) {
      throw ParseError(docword_path, 0, "duplicate entry for docID " + std::to_string(e.doc + 1) + ", wordID " +
                                            std::to_string(e.word + 1));
    }
    if (remap[e.word] == words) continue;
    c.counts.col.push_back(remap[e.word]);
    c.counts.val.push_back(static_cast<double>(e.count));
    ++c.counts.row_ptr[e.doc + 1];
  }
  for (Index i = 0; i < n_docs; ++i) c.counts.row_ptr[i + 1] += c.counts.row_ptr[i];
  for (Index j = 0; j < vocab_size; ++j) {
    c.vocabulary.push_back(vocab[order[j]]);
    c.word_ids.push_back(order[j] + 1);
  }
  return c;
}

std::shared_ptr<SparseRows> log_features(const TextCorpus& corpus, Vec& mean) {
  auto x = std::make_shared<SparseRows>(corpus.counts);
  for (double& v : x->val) v = std::log1p(v);
  mean.assign(x->d, 0.0);
  for (std::size_t p = 0; p < x->col.size(); ++p) mean[x->col[p]] += x->val[p];
  for (double& m : mean) m /= static_cast<double>(x->n);
  return x;
}

std::vector<Index> variance_ranked(const SparseRows& x, const Vec& mean, Index budget) {
  std::vector<double> var(x.d, 0.0);
  for (std::size_t p = 0; p < x.col.size(); ++p) var[x.col[p]] += x.val[p] * x.val[p];
  for (Index j = 0; j < x.d; ++j) var[j] = var[j] / static_cast<double>(x.n) - mean[j] * mean[j];
  std::vector<Index> order = ranked_order(var);
  order.resize(std::min(budget, x.d));
  std::sort(order.begin(), order.end());
  return order;
}

TextResult text_pipeline(const TextCorpus& corpus, const TextConfig& cfg) {
  if (cfg.k < 1 || cfg.r < 1 || cfg.T < 1 || cfg.restart_budget < 1) {
    throw ParameterError("text pipeline: k, r, T and restart_budget must be positive");
  }
  if (corpus.counts.n == 0 || corpus.vocab_size == 0) throw ParameterError("text pipeline: empty corpus");
  TextResult res;
  auto x = log_features(corpus, res.mean);
  res.restarts = variance_ranked(*x, res.mean, cfg.restart_budget);
  auto op = std::make_shared<const CovOperator>(CovOperator::sparse_data(x, res.mean));

  RtpmConfig rc;
  rc.r = cfg.r;
  rc.T = cfg.T;
  rc.restarts = res.restarts;
  rc.threads = cfg.threads;
  rc.backend = OperatorBackend::matrix_free;
  const auto comps = kspca_deflate(op, cfg.k, rtpm_oracle(rc));

  for (const Vec& v : comps) {
    TextComponent tc;
    tc.values = v;
    tc.nnz = nnz(v);
    std::vector<double> mag(v.size());
    for (Index j = 0; j < v.size(); ++j) mag[j] = std::abs(v[j]);
    for (Index j : ranked_order(mag)) {
      if (tc.words.size() == cfg.top_words || mag[j] == 0.0) break;
      tc.words.push_back(corpus.vocabulary[j]);
      tc.weights.push_back(v[j]);
    }
    res.components.push_back(std::move(tc));
  }
  return res;
}

}  // namespace spca
