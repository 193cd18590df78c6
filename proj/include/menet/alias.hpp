#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "menet/rng.hpp"

namespace menet {

// Vose alias table for O(1) sampling from a fixed categorical distribution.
// Sampling from weighted neighbor lists and from the unigram^(3/4) negative
// table both go through this.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) { build(weights); }

  void build(std::span<const double> weights) {
    const size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    if (n == 0) return;

    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("alias: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("alias: all weights zero");

    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

    std::vector<uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const uint32_t s = small.back();
      small.pop_back();
      const uint32_t l = large.back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // Leftovers are 1.0 up to rounding.
    for (uint32_t i : large) prob_[i] = 1.0;
    for (uint32_t i : small) prob_[i] = 1.0;
  }

  uint32_t sample(Rng& rng) const {
    const auto i = static_cast<uint32_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

  bool empty() const { return prob_.empty(); }
  size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

}  // namespace menet
