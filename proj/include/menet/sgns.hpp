#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "menet/alias.hpp"
#include "menet/rng.hpp"

namespace menet::sgns {

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large negative x
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Negative-sampling logistic loss of one (input, target, negatives) triple:
//   L = -log s(v.w_t) - sum_n log s(-v.w_n)
inline double pair_loss(std::span<const double> v, const double* W, size_t dim,
                        size_t target, std::span<const size_t> negatives) {
  auto dot = [&](size_t row) {
    const double* w = W + row * dim;
    double s = 0.0;
    for (size_t i = 0; i < dim; ++i) s += v[i] * w[i];
    return s;
  };
  double loss = -log_sigmoid(dot(target));
  for (size_t n : negatives) loss -= log_sigmoid(-dot(n));
  return loss;
}

// Analytic gradients of pair_loss. grad_v has size dim; grad_W is a full
// (rows x dim) buffer that gets accumulated into (test-oriented; the hot
// path below fuses the update instead).
inline void pair_grad(std::span<const double> v, const double* W, size_t dim,
                      size_t target, std::span<const size_t> negatives,
                      std::span<double> grad_v, double* grad_W) {
  auto accumulate = [&](size_t row, double label) {
    const double* w = W + row * dim;
    double s = 0.0;
    for (size_t i = 0; i < dim; ++i) s += v[i] * w[i];
    const double g = sigmoid(s) - label;  // dL/ds
    for (size_t i = 0; i < dim; ++i) {
      grad_v[i] += g * w[i];
      grad_W[row * dim + i] += g * v[i];
    }
  };
  accumulate(target, 1.0);
  for (size_t n : negatives) accumulate(n, 0.0);
}

// One fused SGD step on a positive pair plus k sampled negatives, following
// the reference word2vec update order: output rows are adjusted against the
// pre-update input vector, and the input correction is applied last. A
// sampled negative equal to the target is skipped, not redrawn. Returns the
// pre-update loss. scratch must hold dim doubles.
inline double step(std::span<double> v, double* W, size_t dim, size_t target,
                   const AliasTable& negatives, int k, double lr, Rng& rng,
                   double* scratch, bool update_outputs = true) {
  for (size_t i = 0; i < dim; ++i) scratch[i] = 0.0;
  double loss = 0.0;
  auto train_row = [&](size_t row, double label) {
    double* w = W + row * dim;
    double s = 0.0;
    for (size_t i = 0; i < dim; ++i) s += v[i] * w[i];
    loss -= log_sigmoid(label > 0.5 ? s : -s);
    const double g = (label - sigmoid(s)) * lr;
    for (size_t i = 0; i < dim; ++i) scratch[i] += g * w[i];
    if (update_outputs)
      for (size_t i = 0; i < dim; ++i) w[i] += g * v[i];
  };
  train_row(target, 1.0);
  for (int n = 0; n < k; ++n) {
    const size_t row = negatives.sample(rng);
    if (row == target) continue;
    train_row(row, 0.0);
  }
  for (size_t i = 0; i < dim; ++i) v[i] += scratch[i];
  return loss;
}

// Standard unigram^(3/4) negative-sampling table.
inline AliasTable unigram_table(std::span<const double> counts) {
  std::vector<double> smoothed(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) smoothed[i] = std::pow(counts[i], 0.75);
  return AliasTable{std::span<const double>(smoothed)};
}

}  // namespace menet::sgns
