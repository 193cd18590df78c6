#pragma once

#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "menet/alias.hpp"
#include "menet/errors.hpp"
#include "menet/feature_store.hpp"
#include "menet/graph.hpp"
#include "menet/rng.hpp"
#include "menet/sgns.hpp"

namespace menet {

struct WalkConfig {
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  int walk_length = 80;
  int walks_per_node = 10;
  std::uint64_t seed = 1;
};

inline constexpr std::uint32_t kNoPrev = 0xffffffffu;

// Exact node2vec transition distribution out of `cur` given the previous
// node (kNoPrev for the first step = plain weighted transition). Returns
// (neighbor, probability) aligned with adj[cur].
inline std::vector<std::pair<std::uint32_t, double>> step_probabilities(
    const MentionGraph& g, std::uint32_t prev, std::uint32_t cur,
    const WalkConfig& cfg) {
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(g.adj[cur].size());
  double total = 0.0;
  for (const auto& [nbr, w] : g.adj[cur]) {
    double bias = 1.0;
    if (prev != kNoPrev) {
      if (nbr == prev)
        bias = 1.0 / cfg.p;
      else if (g.edge_weight(prev, nbr) > 0.0)
        bias = 1.0;
      else
        bias = 1.0 / cfg.q;
    }
    const double wt = w * bias;
    out.emplace_back(nbr, wt);
    total += wt;
  }
  for (auto& [nbr, pr] : out) pr /= total;
  return out;
}

inline std::uint32_t sample_step(const MentionGraph& g, std::uint32_t prev,
                                 std::uint32_t cur, const WalkConfig& cfg, Rng& rng) {
  const auto& list = g.adj[cur];
  double total = 0.0;
  thread_local std::vector<double> weights;
  weights.clear();
  weights.reserve(list.size());
  for (const auto& [nbr, w] : list) {
    double bias = 1.0;
    if (prev != kNoPrev) {
      if (nbr == prev)
        bias = 1.0 / cfg.p;
      else if (g.edge_weight(prev, nbr) > 0.0)
        bias = 1.0;
      else
        bias = 1.0 / cfg.q;
    }
    weights.push_back(w * bias);
    total += weights.back();
  }
  const double r = rng.uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return list[i].first;
  }
  return list.back().first;  // numeric edge case
}

inline std::vector<std::uint32_t> simulate_walk(const MentionGraph& g,
                                                std::uint32_t start,
                                                const WalkConfig& cfg, Rng& rng) {
  std::vector<std::uint32_t> walk;
  walk.reserve(cfg.walk_length);
  walk.push_back(start);
  std::uint32_t prev = kNoPrev;
  while (walk.size() < static_cast<size_t>(cfg.walk_length)) {
    const std::uint32_t cur = walk.back();
    if (g.adj[cur].empty()) break;
    const std::uint32_t next = sample_step(g, prev, cur, cfg, rng);
    prev = cur;
    walk.push_back(next);
  }
  return walk;
}

// walks_per_node walks from every non-isolated node, in node order. Each
// walk draws from its own rng stream so the set is identical no matter how
// the work is scheduled.
inline std::vector<std::vector<std::uint32_t>> simulate_walks(const MentionGraph& g,
                                                              const WalkConfig& cfg,
                                                              int threads = 1) {
  if (cfg.p <= 0.0 || cfg.q <= 0.0 || cfg.walk_length < 1 || cfg.walks_per_node < 1)
    throw input_error("walk parameters must be positive");
  std::vector<std::uint32_t> starts;
  for (std::uint32_t v = 0; v < g.n_nodes(); ++v)
    if (!g.is_isolated(v)) starts.push_back(v);
  std::vector<std::vector<std::uint32_t>> walks(starts.size() *
                                                static_cast<size_t>(cfg.walks_per_node));
  auto run_range = [&](size_t lo, size_t hi) {
    for (size_t s = lo; s < hi; ++s) {
      for (int r = 0; r < cfg.walks_per_node; ++r) {
        Rng rng(derive_seed(cfg.seed, starts[s], static_cast<std::uint64_t>(r)));
        walks[s * cfg.walks_per_node + r] = simulate_walk(g, starts[s], cfg, rng);
      }
    }
  };
  if (threads <= 1 || starts.size() < 2) {
    run_range(0, starts.size());
  } else {
    const size_t n = static_cast<size_t>(threads);
    std::vector<std::thread> pool;
    const size_t chunk = (starts.size() + n - 1) / n;
    for (size_t t = 0; t < n; ++t) {
      const size_t lo = t * chunk;
      const size_t hi = std::min(starts.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return walks;
}

struct Node2vecConfig {
  size_t dim = 300;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  std::uint64_t seed = 1;
  int threads = 1;  // >1 is the racy throughput mode
};

namespace node2vec_detail {

inline void train_walk_range(std::vector<double>& emb, std::vector<double>& out,
                             const std::vector<std::vector<std::uint32_t>>& walks,
                             size_t begin, size_t stride, const AliasTable& neg,
                             const Node2vecConfig& cfg, std::uint64_t total_positions,
                             std::uint64_t* step_counter, Rng rng) {
  const size_t dim = cfg.dim;
  std::vector<double> scratch(dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t wi = begin; wi < walks.size(); wi += stride) {
      const auto& walk = walks[wi];
      for (size_t pos = 0; pos < walk.size(); ++pos) {
        const std::uint64_t step = (*step_counter)++;
        const double frac =
            total_positions > 1
                ? static_cast<double>(step) / static_cast<double>(total_positions - 1)
                : 0.0;
        const double lr = cfg.lr_start + (cfg.lr_end - cfg.lr_start) * frac;
        const size_t c = 1 + rng.below(static_cast<std::uint64_t>(cfg.window));
        const size_t lo = pos >= c ? pos - c : 0;
        const size_t hi = std::min(walk.size() - 1, pos + c);
        for (size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx == pos) continue;
          std::span<double> v(emb.data() + static_cast<size_t>(walk[ctx]) * dim, dim);
          sgns::step(v, out.data(), dim, walk[pos], neg, cfg.negatives, lr, rng,
                     scratch.data());
        }
      }
    }
  }
}

}  // namespace node2vec_detail

// Skip-gram with negative sampling over the walk corpus. Rows follow the
// graph's node order; nodes that never appear in a walk keep a zero vector.
inline FeatureMatrix train_node_embeddings(const MentionGraph& g,
                                           const std::vector<std::vector<std::uint32_t>>& walks,
                                           const Node2vecConfig& cfg) {
  if (cfg.dim == 0) throw input_error("node embedding dimension must be positive");
  const size_t n = g.n_nodes();
  const size_t dim = cfg.dim;

  std::vector<double> counts(n, 0.0);
  std::uint64_t total_positions = 0;
  for (const auto& walk : walks) {
    total_positions += walk.size();
    for (auto v : walk) counts[v] += 1.0;
  }

  std::vector<double> emb(n * dim);
  Rng init_rng(derive_seed(cfg.seed, 5));
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& x : emb) x = init_rng.uniform(-half, half);
  std::vector<double> out(n * dim, 0.0);

  if (!walks.empty() && total_positions > 0) {
    const auto neg = sgns::unigram_table(std::span<const double>(counts));
    const std::uint64_t total_steps =
        static_cast<std::uint64_t>(cfg.epochs) * total_positions;
    if (cfg.threads <= 1) {
      std::uint64_t counter = 0;
      node2vec_detail::train_walk_range(emb, out, walks, 0, 1, neg, cfg, total_steps,
                                        &counter, Rng(derive_seed(cfg.seed, 6)));
    } else {
      std::vector<std::thread> pool;
      std::vector<std::uint64_t> counters(static_cast<size_t>(cfg.threads), 0);
      for (int t = 0; t < cfg.threads; ++t) {
        pool.emplace_back([&, t] {
          node2vec_detail::train_walk_range(
              emb, out, walks, static_cast<size_t>(t), static_cast<size_t>(cfg.threads),
              neg, cfg, std::max<std::uint64_t>(total_steps / cfg.threads, 1),
              &counters[static_cast<size_t>(t)],
              Rng(derive_seed(cfg.seed, 6, 100 + static_cast<std::uint64_t>(t))));
        });
      }
      for (auto& th : pool) th.join();
    }
  }

  auto m = FeatureMatrix::make_dense("node2vec", n, dim);
  for (size_t v = 0; v < n; ++v) {
    if (counts[v] == 0.0) continue;  // isolated: zero vector
    std::copy(emb.begin() + v * dim, emb.begin() + (v + 1) * dim, m.dense_row(v));
  }
  return m;
}

}  // namespace menet
