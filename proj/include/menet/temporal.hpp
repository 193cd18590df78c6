#pragma once

#include <array>
#include <cmath>

#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include "menet/feature_store.hpp"

namespace menet {

// l2-normalized 24-bin histogram of UTC posting hours; no tweets -> zeros.
inline std::array<double, 24> timestamp_feature(const UserDocument& doc) {
  std::array<double, 24> hist{};
  for (int h : doc.hours) {
    if (h < 0 || h > 23) throw input_error("hour out of range in document " + doc.user_id);
    hist[static_cast<size_t>(h)] += 1.0;
  }
  double norm_sq = 0.0;
  for (double x : hist) norm_sq += x * x;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : hist) x *= inv;
  }
  return hist;
}

inline FeatureMatrix timestamp_matrix(const std::vector<UserDocument>& docs) {
  auto m = FeatureMatrix::make_dense("timestamp", docs.size(), 24);
  for (size_t i = 0; i < docs.size(); ++i) {
    const auto f = timestamp_feature(docs[i]);
    std::copy(f.begin(), f.end(), m.dense_row(i));
  }
  return m;
}

}  // namespace menet
