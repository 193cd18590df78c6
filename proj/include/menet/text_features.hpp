#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include "menet/feature_store.hpp"

namespace menet {

struct Vocabulary {
  std::map<std::string, std::uint32_t> index;     // term -> dense index
  std::vector<std::string> terms;                 // index -> term
  std::vector<std::uint64_t> document_frequency;  // aligned with terms
  std::uint64_t n_documents = 0;

  size_t size() const { return terms.size(); }
};

// Vocabulary from the TRAIN documents only. Terms appearing in fewer than
// min_df documents are dropped; indices are assigned in lexicographic term
// order so two runs agree exactly.
inline Vocabulary fit_vocabulary(const std::vector<UserDocument>& docs,
                                 std::uint64_t min_df) {
  if (min_df < 1) throw input_error("min_df must be >= 1");
  if (docs.empty()) throw input_error("cannot fit vocabulary on an empty corpus");
  std::map<std::string, std::uint64_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> seen(doc.tokens.begin(), doc.tokens.end());
    for (const auto& t : seen) df[t] += 1;
  }
  Vocabulary vocab;
  vocab.n_documents = docs.size();
  for (const auto& [term, count] : df) {
    if (count < min_df) continue;
    vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(count);
  }
  if (vocab.terms.empty())
    std::fprintf(stderr, "warning: vocabulary is empty (min_df=%llu too high?)\n",
                 static_cast<unsigned long long>(min_df));
  return vocab;
}

inline double idf(const Vocabulary& vocab, std::uint32_t term_index) {
  return std::log(static_cast<double>(1 + vocab.n_documents) /
                  static_cast<double>(1 + vocab.document_frequency[term_index])) +
         1.0;
}

// Sparse l2-normalized tf-idf: weight(t) = count(t, doc) * idf(t). Entries
// sorted by term index; documents with no in-vocabulary term give an empty
// (zero) vector.
inline std::vector<std::pair<std::uint32_t, double>> tfidf(
    const UserDocument& doc, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : doc.tokens) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [idx, tf] : counts) {
    const double w = tf * idf(vocab, idx);
    norm_sq += w * w;
    out.emplace_back(idx, w);
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [idx, w] : out) w *= inv;
  }
  return out;
}

inline FeatureMatrix tfidf_matrix(const std::vector<UserDocument>& docs,
                                  const Vocabulary& vocab) {
  auto m = FeatureMatrix::make_sparse("tfidf", docs.size(), vocab.size());
  for (size_t i = 0; i < docs.size(); ++i) m.rows[i] = tfidf(docs[i], vocab);
  return m;
}

inline void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw input_error("cannot write vocabulary file: " + path);
  os << vocab.n_documents << "\n";
  for (size_t i = 0; i < vocab.terms.size(); ++i)
    os << vocab.terms[i] << "\t" << vocab.document_frequency[i] << "\n";
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw input_error("cannot read vocabulary file: " + path);
  Vocabulary vocab;
  std::string line;
  if (!std::getline(is, line)) throw input_error("empty vocabulary file: " + path);
  vocab.n_documents = std::stoull(line);
  while (std::getline(is, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw input_error("malformed vocabulary line");
    const std::string term = line.substr(0, tab);
    vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(std::stoull(line.substr(tab + 1)));
  }
  return vocab;
}

}  // namespace menet
