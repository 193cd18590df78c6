#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "menet/alias.hpp"
#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include "menet/feature_store.hpp"
#include "menet/rng.hpp"
#include "menet/sgns.hpp"

namespace menet {

struct PvdbowConfig {
  size_t dim = 300;
  int epochs = 20;
  int negatives = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  std::uint64_t min_count = 1;  // minimum corpus frequency for a word
  std::uint64_t seed = 1;
  int threads = 1;  // >1 trades determinism for throughput (racy updates)
};

struct PvdbowModel {
  PvdbowConfig cfg;
  std::map<std::string, std::uint32_t> word_index;
  std::vector<std::string> words;
  std::vector<double> word_counts;  // corpus frequency, drives negative sampling
  std::vector<std::string> doc_ids;
  std::vector<double> D;  // n_docs x dim, paragraph vectors
  std::vector<double> W;  // V x dim, output word matrix

  std::span<const double> paragraph(size_t doc) const {
    return {D.data() + doc * cfg.dim, cfg.dim};
  }
};

namespace pvdbow_detail {

// in-vocabulary token ids per document
inline std::vector<std::vector<std::uint32_t>> doc_token_ids(
    const std::vector<UserDocument>& docs, const PvdbowModel& model) {
  std::vector<std::vector<std::uint32_t>> ids(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    ids[i].reserve(docs[i].tokens.size());
    for (const auto& t : docs[i].tokens) {
      auto it = model.word_index.find(t);
      if (it != model.word_index.end()) ids[i].push_back(it->second);
    }
  }
  return ids;
}

inline void run_steps(PvdbowModel& model, const std::vector<std::vector<std::uint32_t>>& ids,
                      const std::vector<std::uint32_t>& usable, const AliasTable& neg,
                      std::uint64_t steps, std::uint64_t lr_span, Rng rng) {
  const size_t dim = model.cfg.dim;
  std::vector<double> scratch(dim);
  const double lr0 = model.cfg.lr_start;
  const double lr1 = model.cfg.lr_end;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double frac = lr_span > 1 ? static_cast<double>(s) / static_cast<double>(lr_span - 1) : 0.0;
    const double lr = lr0 + (lr1 - lr0) * frac;
    const std::uint32_t doc = usable[rng.below(usable.size())];
    const auto& toks = ids[doc];
    const std::uint32_t target = toks[rng.below(toks.size())];
    std::span<double> v(model.D.data() + static_cast<size_t>(doc) * dim, dim);
    sgns::step(v, model.W.data(), dim, target, neg, model.cfg.negatives, lr, rng,
               scratch.data());
  }
}

}  // namespace pvdbow_detail

inline PvdbowModel train_pvdbow(const std::vector<UserDocument>& docs,
                                const PvdbowConfig& cfg) {
  if (cfg.dim == 0) throw input_error("paragraph vector dimension must be positive");
  if (docs.empty()) throw input_error("cannot train paragraph vectors on an empty corpus");

  PvdbowModel model;
  model.cfg = cfg;
  std::map<std::string, std::uint64_t> freq;
  for (const auto& doc : docs)
    for (const auto& t : doc.tokens) freq[t] += 1;
  for (const auto& [word, count] : freq) {
    if (count < cfg.min_count) continue;
    model.word_index.emplace(word, static_cast<std::uint32_t>(model.words.size()));
    model.words.push_back(word);
    model.word_counts.push_back(static_cast<double>(count));
  }
  if (model.words.empty())
    throw input_error("paragraph-vector vocabulary is empty");

  model.doc_ids.reserve(docs.size());
  for (const auto& doc : docs) model.doc_ids.push_back(doc.user_id);

  const size_t dim = cfg.dim;
  model.D.resize(docs.size() * dim);
  model.W.assign(model.words.size() * dim, 0.0);
  Rng init_rng(derive_seed(cfg.seed, 1));
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& x : model.D) x = init_rng.uniform(-half, half);

  const auto ids = pvdbow_detail::doc_token_ids(docs, model);
  std::vector<std::uint32_t> usable;
  std::uint64_t total_tokens = 0;
  for (std::uint32_t i = 0; i < ids.size(); ++i) {
    if (!ids[i].empty()) {
      usable.push_back(i);
      total_tokens += ids[i].size();
    }
  }
  if (usable.empty()) throw input_error("no document has an in-vocabulary token");

  const auto neg = sgns::unigram_table(std::span<const double>(model.word_counts));
  const std::uint64_t steps =
      static_cast<std::uint64_t>(cfg.epochs) * total_tokens;
  if (cfg.threads <= 1) {
    pvdbow_detail::run_steps(model, ids, usable, neg, steps, steps,
                             Rng(derive_seed(cfg.seed, 2)));
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t per = steps / static_cast<std::uint64_t>(cfg.threads);
    for (int t = 0; t < cfg.threads; ++t) {
      const std::uint64_t mine = t == 0 ? steps - per * (cfg.threads - 1) : per;
      pool.emplace_back([&model, &ids, &usable, &neg, mine, per, t, cfg] {
        pvdbow_detail::run_steps(model, ids, usable, neg, mine,
                                 std::max<std::uint64_t>(per, 1),
                                 Rng(derive_seed(cfg.seed, 2, 100 + t)));
      });
    }
    for (auto& th : pool) th.join();
  }
  return model;
}

// Fresh paragraph vector for an unseen document, optimized against the frozen
// word matrix. steps=0 returns the random initialization.
inline std::vector<double> infer_paragraph(const PvdbowModel& model,
                                           const UserDocument& doc,
                                           std::uint64_t steps, std::uint64_t seed) {
  const size_t dim = model.cfg.dim;
  std::vector<std::uint32_t> ids;
  for (const auto& t : doc.tokens) {
    auto it = model.word_index.find(t);
    if (it != model.word_index.end()) ids.push_back(it->second);
  }
  if (ids.empty()) {
    std::fprintf(stderr, "warning: no in-vocabulary token for user %s; zero paragraph vector\n",
                 doc.user_id.c_str());
    return std::vector<double>(dim, 0.0);
  }
  Rng rng(derive_seed(seed, 3));
  std::vector<double> v(dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& x : v) x = rng.uniform(-half, half);

  const auto neg = sgns::unigram_table(std::span<const double>(model.word_counts));
  std::vector<double> scratch(dim);
  // frozen weights: update_outputs=false guarantees W is only read
  double* W = const_cast<double*>(model.W.data());
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double frac = steps > 1 ? static_cast<double>(s) / static_cast<double>(steps - 1) : 0.0;
    const double lr = model.cfg.lr_start + (model.cfg.lr_end - model.cfg.lr_start) * frac;
    const std::uint32_t target = ids[rng.below(ids.size())];
    sgns::step(std::span<double>(v), W, dim, target, neg, model.cfg.negatives, lr, rng,
               scratch.data(), /*update_outputs=*/false);
  }
  return v;
}

inline std::uint64_t default_infer_steps(const PvdbowModel& model,
                                         const UserDocument& doc) {
  std::uint64_t usable = 0;
  for (const auto& t : doc.tokens)
    if (model.word_index.count(t)) ++usable;
  return static_cast<std::uint64_t>(model.cfg.epochs) * std::max<std::uint64_t>(usable, 1);
}

inline void save_pvdbow(const std::string& path, const PvdbowModel& m) {
  using namespace store_detail;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw input_error("cannot write paragraph model: " + path);
  os.write("MENETPVD", 8);
  put<std::uint8_t>(os, 1);
  put<std::uint64_t>(os, m.cfg.dim);
  put<std::int32_t>(os, m.cfg.epochs);
  put<std::int32_t>(os, m.cfg.negatives);
  put<double>(os, m.cfg.lr_start);
  put<double>(os, m.cfg.lr_end);
  put<std::uint64_t>(os, m.cfg.min_count);
  put<std::uint64_t>(os, m.cfg.seed);
  put<std::uint64_t>(os, m.words.size());
  for (size_t i = 0; i < m.words.size(); ++i) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(m.words[i].size()));
    put_bytes(os, m.words[i].data(), m.words[i].size());
    put<double>(os, m.word_counts[i]);
  }
  put<std::uint64_t>(os, m.doc_ids.size());
  for (const auto& id : m.doc_ids) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(id.size()));
    put_bytes(os, id.data(), id.size());
  }
  put_bytes(os, m.D.data(), m.D.size() * sizeof(double));
  put_bytes(os, m.W.data(), m.W.size() * sizeof(double));
  if (!os) throw input_error("short write on paragraph model: " + path);
}

inline PvdbowModel load_pvdbow(const std::string& path) {
  using namespace store_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("cannot read paragraph model: " + path);
  char magic[8];
  get_bytes(is, magic, 8);
  if (std::string_view(magic, 8) != "MENETPVD")
    throw input_error("not a paragraph model file: " + path);
  if (get<std::uint8_t>(is) != 1) throw input_error("unsupported paragraph model version");
  PvdbowModel m;
  m.cfg.dim = get<std::uint64_t>(is);
  m.cfg.epochs = get<std::int32_t>(is);
  m.cfg.negatives = get<std::int32_t>(is);
  m.cfg.lr_start = get<double>(is);
  m.cfg.lr_end = get<double>(is);
  m.cfg.min_count = get<std::uint64_t>(is);
  m.cfg.seed = get<std::uint64_t>(is);
  const auto n_words = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < n_words; ++i) {
    const auto len = get<std::uint32_t>(is);
    std::string word(len, '\0');
    get_bytes(is, word.data(), len);
    m.word_index.emplace(word, static_cast<std::uint32_t>(m.words.size()));
    m.words.push_back(std::move(word));
    m.word_counts.push_back(get<double>(is));
  }
  const auto n_docs = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    const auto len = get<std::uint32_t>(is);
    std::string id(len, '\0');
    get_bytes(is, id.data(), len);
    m.doc_ids.push_back(std::move(id));
  }
  m.D.resize(n_docs * m.cfg.dim);
  get_bytes(is, m.D.data(), m.D.size() * sizeof(double));
  m.W.resize(n_words * m.cfg.dim);
  get_bytes(is, m.W.data(), m.W.size() * sizeof(double));
  return m;
}

}  // namespace menet
