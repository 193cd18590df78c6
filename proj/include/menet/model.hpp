#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "menet/errors.hpp"
#include "menet/feature_store.hpp"
#include "menet/rng.hpp"

namespace menet {

inline constexpr size_t kViews = 4;
// fixed view order everywhere: tfidf, node2vec, doc2vec, timestamp
inline constexpr std::array<const char*, kViews> kViewNames = {"tfidf", "node2vec",
                                                               "doc2vec", "timestamp"};

struct MenetConfig {
  std::array<size_t, kViews> hidden = {150, 150, 30, 30};
  size_t n_classes = 0;
  double learning_rate = 0.0001;
  double weight_decay = 0.1;  // on the output layer only
  size_t batch_size = 64;
  int max_epochs = 200;
  int patience = 10;
  double anneal_factor = 0.9;
  int anneal_every = 10;  // epochs between annealing steps
  std::uint64_t seed = 1;
  bool use_adam = true;  // false: plain SGD
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    for (size_t h : hidden)
      if (h == 0) throw input_error("hidden sizes must be positive");
    if (n_classes < 2) throw input_error("need at least two classes");
    if (learning_rate <= 0.0) throw input_error("learning rate must be positive");
    if (weight_decay < 0.0) throw input_error("weight decay must be non-negative");
    if (patience < 1) throw input_error("patience must be >= 1");
    if (batch_size < 1) throw input_error("batch size must be >= 1");
    if (anneal_every < 1) throw input_error("anneal interval must be >= 1");
    if (anneal_factor <= 0.0) throw input_error("anneal factor must be positive");
  }
};

// The four views of one user set, rows aligned across views.
struct ViewBatch {
  std::array<size_t, kViews> dims{};
  size_t n = 0;
  std::array<std::vector<double>, kViews> data;  // each n x dims[v], row-major

  const double* row(size_t view, size_t i) const {
    return data[view].data() + i * dims[view];
  }

  static ViewBatch from_features(const std::array<const FeatureMatrix*, kViews>& views) {
    ViewBatch b;
    b.n = views[0]->n_rows;
    for (size_t v = 0; v < kViews; ++v) {
      if (views[v]->n_rows != b.n)
        throw feature_mismatch_error("view row counts disagree: " + views[v]->view);
      b.dims[v] = views[v]->n_cols;
      b.data[v].assign(b.n * b.dims[v], 0.0);
      if (views[v]->sparse) {
        for (size_t i = 0; i < b.n; ++i)
          for (const auto& [idx, val] : views[v]->rows[i])
            b.data[v][i * b.dims[v] + idx] = val;
      } else {
        b.data[v] = views[v]->dense;
      }
    }
    return b;
  }

  ViewBatch select(std::span<const size_t> rows) const {
    ViewBatch out;
    out.dims = dims;
    out.n = rows.size();
    for (size_t v = 0; v < kViews; ++v) {
      out.data[v].resize(out.n * dims[v]);
      for (size_t i = 0; i < rows.size(); ++i)
        std::copy(row(v, rows[i]), row(v, rows[i]) + dims[v],
                  out.data[v].data() + i * dims[v]);
    }
    return out;
  }
};

struct PredictionBatch {
  size_t n = 0;
  size_t m = 0;
  std::vector<double> probs;        // n x m
  std::vector<std::uint32_t> argmax;  // ties toward the lowest class id
};

// One flat parameter vector: [W_1, b_1, ..., W_4, b_4, W_o, b_o], with W_v
// stored d_v x h_v row-major and W_o stored H x m row-major (H = sum h_v).
struct MenetModel {
  MenetConfig cfg;
  std::array<size_t, kViews> view_dims{};
  size_t hidden_total = 0;
  std::vector<double> params;
  std::array<size_t, kViews> off_W{};
  std::array<size_t, kViews> off_b{};
  size_t off_Wo = 0;
  size_t off_bo = 0;

  std::vector<double> adam_m, adam_v;
  std::int64_t adam_t = 0;
  int epoch = 0;

  double* W(size_t v) { return params.data() + off_W[v]; }
  const double* W(size_t v) const { return params.data() + off_W[v]; }
  double* b(size_t v) { return params.data() + off_b[v]; }
  const double* b(size_t v) const { return params.data() + off_b[v]; }
  double* Wo() { return params.data() + off_Wo; }
  const double* Wo() const { return params.data() + off_Wo; }
  double* bo() { return params.data() + off_bo; }
  const double* bo() const { return params.data() + off_bo; }
  size_t wo_size() const { return hidden_total * cfg.n_classes; }
};

inline MenetModel init_model(const MenetConfig& cfg,
                             const std::array<size_t, kViews>& view_dims) {
  cfg.validate();
  MenetModel m;
  m.cfg = cfg;
  m.view_dims = view_dims;
  size_t off = 0;
  for (size_t v = 0; v < kViews; ++v) {
    m.off_W[v] = off;
    off += view_dims[v] * cfg.hidden[v];
    m.off_b[v] = off;
    off += cfg.hidden[v];
    m.hidden_total += cfg.hidden[v];
  }
  m.off_Wo = off;
  off += m.hidden_total * cfg.n_classes;
  m.off_bo = off;
  off += cfg.n_classes;
  m.params.assign(off, 0.0);
  m.adam_m.assign(off, 0.0);
  m.adam_v.assign(off, 0.0);

  Rng rng(derive_seed(cfg.seed, 7));
  for (size_t v = 0; v < kViews; ++v) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(view_dims[v] + cfg.hidden[v]));
    double* w = m.W(v);
    for (size_t i = 0; i < view_dims[v] * cfg.hidden[v]; ++i)
      w[i] = rng.uniform(-bound, bound);
  }
  const double bound =
      std::sqrt(6.0 / static_cast<double>(m.hidden_total + cfg.n_classes));
  double* wo = m.Wo();
  for (size_t i = 0; i < m.wo_size(); ++i) wo[i] = rng.uniform(-bound, bound);
  return m;
}

namespace model_detail {

// z buffer holds the concatenated hidden activations for one instance.
inline void hidden_forward(const MenetModel& m, const ViewBatch& batch, size_t i,
                           double* z) {
  size_t zoff = 0;
  for (size_t v = 0; v < kViews; ++v) {
    const size_t d = m.view_dims[v];
    const size_t h = m.cfg.hidden[v];
    const double* x = batch.row(v, i);
    const double* W = m.W(v);
    const double* b = m.b(v);
    for (size_t j = 0; j < h; ++j) {
      double s = b[j];
      for (size_t k = 0; k < d; ++k) s += x[k] * W[k * h + j];
      z[zoff + j] = s > 0.0 ? s : 0.0;
    }
    zoff += h;
  }
}

inline void softmax_from_logits(std::span<double> logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : logits) v /= total;
}

}  // namespace model_detail

inline PredictionBatch forward(const MenetModel& m, const ViewBatch& batch) {
  for (size_t v = 0; v < kViews; ++v)
    if (batch.dims[v] != m.view_dims[v])
      throw feature_mismatch_error(
          std::string("view dimension mismatch for ") + kViewNames[v] + ": model expects " +
          std::to_string(m.view_dims[v]) + ", features have " +
          std::to_string(batch.dims[v]));
  PredictionBatch out;
  out.n = batch.n;
  out.m = m.cfg.n_classes;
  out.probs.resize(out.n * out.m);
  out.argmax.resize(out.n);
  std::vector<double> z(m.hidden_total);
  for (size_t i = 0; i < batch.n; ++i) {
    model_detail::hidden_forward(m, batch, i, z.data());
    double* p = out.probs.data() + i * out.m;
    const double* Wo = m.Wo();
    const double* bo = m.bo();
    for (size_t j = 0; j < out.m; ++j) {
      double s = bo[j];
      for (size_t k = 0; k < m.hidden_total; ++k) s += z[k] * Wo[k * out.m + j];
      p[j] = s;
    }
    model_detail::softmax_from_logits({p, out.m});
    size_t best = 0;
    for (size_t j = 1; j < out.m; ++j)
      if (p[j] > p[best]) best = j;
    out.argmax[i] = static_cast<std::uint32_t>(best);
  }
  return out;
}

// Summed cross-entropy over the batch; log clamped at 1e-12.
inline double cross_entropy_sum(const PredictionBatch& pred,
                                std::span<const std::uint32_t> labels) {
  double total = 0.0;
  for (size_t i = 0; i < pred.n; ++i) {
    const double p = pred.probs[i * pred.m + labels[i]];
    total -= std::log(std::max(p, 1e-12));
  }
  return total;
}

// Reported loss: summed cross-entropy, plus the (lambda/2)||W_o||^2 decay
// term when a model is supplied (the training flavor).
inline double loss(const PredictionBatch& pred, std::span<const std::uint32_t> labels,
                   const MenetModel* model = nullptr) {
  double total = cross_entropy_sum(pred, labels);
  if (model != nullptr && model->cfg.weight_decay > 0.0) {
    const double* wo = model->Wo();
    double sq = 0.0;
    for (size_t i = 0; i < model->wo_size(); ++i) sq += wo[i] * wo[i];
    total += 0.5 * model->cfg.weight_decay * sq;
  }
  return total;
}

// The quantity optimized per batch: mean cross-entropy plus the decay term.
inline double training_objective(const MenetModel& m, const ViewBatch& batch,
                                 std::span<const std::uint32_t> labels) {
  const auto pred = forward(m, batch);
  double total = cross_entropy_sum(pred, labels) / static_cast<double>(batch.n);
  const double* wo = m.Wo();
  double sq = 0.0;
  for (size_t i = 0; i < m.wo_size(); ++i) sq += wo[i] * wo[i];
  return total + 0.5 * m.cfg.weight_decay * sq;
}

// Exact gradient of training_objective with respect to every parameter.
// ReLU subgradient at 0 is taken as 0.
inline std::vector<double> backward(const MenetModel& m, const ViewBatch& batch,
                                    std::span<const std::uint32_t> labels) {
  std::vector<double> grad(m.params.size(), 0.0);
  const size_t mcls = m.cfg.n_classes;
  const double inv_n = 1.0 / static_cast<double>(batch.n);
  std::vector<double> z(m.hidden_total);
  std::vector<double> p(mcls);
  std::vector<double> dz(m.hidden_total);
  for (size_t i = 0; i < batch.n; ++i) {
    model_detail::hidden_forward(m, batch, i, z.data());
    const double* Wo = m.Wo();
    const double* bo = m.bo();
    for (size_t j = 0; j < mcls; ++j) {
      double s = bo[j];
      for (size_t k = 0; k < m.hidden_total; ++k) s += z[k] * Wo[k * mcls + j];
      p[j] = s;
    }
    model_detail::softmax_from_logits({p.data(), mcls});
    // dL/dlogit_j = (p_j - y_j) / n
    p[labels[i]] -= 1.0;
    for (double& v : p) v *= inv_n;

    double* gWo = grad.data() + m.off_Wo;
    double* gbo = grad.data() + m.off_bo;
    for (size_t j = 0; j < mcls; ++j) gbo[j] += p[j];
    for (size_t k = 0; k < m.hidden_total; ++k) {
      const double zk = z[k];
      double acc = 0.0;
      for (size_t j = 0; j < mcls; ++j) {
        gWo[k * mcls + j] += zk * p[j];
        acc += Wo[k * mcls + j] * p[j];
      }
      dz[k] = z[k] > 0.0 ? acc : 0.0;  // ReLU gate (post-activation > 0)
    }
    size_t zoff = 0;
    for (size_t v = 0; v < kViews; ++v) {
      const size_t d = m.view_dims[v];
      const size_t h = m.cfg.hidden[v];
      const double* x = batch.row(v, i);
      double* gW = grad.data() + m.off_W[v];
      double* gb = grad.data() + m.off_b[v];
      for (size_t j = 0; j < h; ++j) {
        const double g = dz[zoff + j];
        if (g == 0.0) continue;
        gb[j] += g;
        for (size_t k = 0; k < d; ++k) gW[k * h + j] += x[k] * g;
      }
      zoff += h;
    }
  }
  if (m.cfg.weight_decay > 0.0) {
    const double* wo = m.Wo();
    double* gWo = grad.data() + m.off_Wo;
    for (size_t i = 0; i < m.wo_size(); ++i) gWo[i] += m.cfg.weight_decay * wo[i];
  }
  return grad;
}

inline std::vector<std::uint32_t> predict(const MenetModel& m, const ViewBatch& batch) {
  return forward(m, batch).argmax;
}

inline double accuracy(const MenetModel& m, const ViewBatch& batch,
                       std::span<const std::uint32_t> labels) {
  const auto ids = predict(m, batch);
  size_t hits = 0;
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == labels[i]) ++hits;
  return ids.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(ids.size());
}

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;  // summed cross-entropy + decay, end of epoch
  double val_accuracy = 0.0;
  double lr = 0.0;
};

// Validation metric hook; the default is plain accuracy. Tests inject other
// metrics to pin the early-stopping rule down.
using ValMetric =
    std::function<double(const MenetModel&, const ViewBatch&, std::span<const std::uint32_t>)>;

// Mini-batch training with Adam (or plain SGD), stepwise LR annealing and
// patience-based early stopping on the validation metric. Improvement means
// strictly greater than the best seen; on stop (or at max_epochs) the best
// snapshot is restored.
inline std::vector<EpochStats> train(MenetModel& m, const ViewBatch& train_batch,
                                     std::span<const std::uint32_t> train_labels,
                                     const ViewBatch& val_batch,
                                     std::span<const std::uint32_t> val_labels,
                                     ValMetric val_metric = {}) {
  if (train_batch.n == 0) throw input_error("empty training set");
  if (val_batch.n == 0) throw input_error("empty validation set");
  if (train_labels.size() != train_batch.n || val_labels.size() != val_batch.n)
    throw feature_mismatch_error("label count does not match feature rows");
  for (auto y : train_labels)
    if (y >= m.cfg.n_classes) throw input_error("label id out of range");
  if (!val_metric)
    val_metric = [](const MenetModel& model, const ViewBatch& b,
                    std::span<const std::uint32_t> y) { return accuracy(model, b, y); };

  std::vector<EpochStats> history;
  std::vector<double> best_params = m.params;
  double best_metric = -std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<size_t> order(train_batch.n);
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<size_t> batch_rows;
  std::vector<std::uint32_t> batch_labels;

  for (int epoch = 1; epoch <= m.cfg.max_epochs; ++epoch) {
    const double lr = m.cfg.learning_rate *
                      std::pow(m.cfg.anneal_factor, (epoch - 1) / m.cfg.anneal_every);
    Rng shuffle_rng(derive_seed(m.cfg.seed, 8, static_cast<std::uint64_t>(epoch)));
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    for (size_t start = 0; start < order.size(); start += m.cfg.batch_size) {
      const size_t stop = std::min(order.size(), start + m.cfg.batch_size);
      batch_rows.assign(order.begin() + start, order.begin() + stop);
      const ViewBatch mb = train_batch.select(batch_rows);
      batch_labels.resize(batch_rows.size());
      for (size_t i = 0; i < batch_rows.size(); ++i)
        batch_labels[i] = train_labels[batch_rows[i]];
      const auto grad = backward(m, mb, batch_labels);

      m.adam_t += 1;
      if (m.cfg.use_adam) {
        const double b1 = m.cfg.adam_beta1, b2 = m.cfg.adam_beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(m.adam_t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(m.adam_t));
        for (size_t i = 0; i < m.params.size(); ++i) {
          m.adam_m[i] = b1 * m.adam_m[i] + (1.0 - b1) * grad[i];
          m.adam_v[i] = b2 * m.adam_v[i] + (1.0 - b2) * grad[i] * grad[i];
          m.params[i] -=
              lr * (m.adam_m[i] / c1) / (std::sqrt(m.adam_v[i] / c2) + m.cfg.adam_eps);
        }
      } else {
        for (size_t i = 0; i < m.params.size(); ++i) m.params[i] -= lr * grad[i];
      }
    }
    m.epoch = epoch;

    const auto train_pred = forward(m, train_batch);
    const double train_loss = loss(train_pred, train_labels, &m);
    if (!std::isfinite(train_loss))
      throw numeric_error("training loss is not finite at epoch " + std::to_string(epoch));
    const double metric = val_metric(m, val_batch, val_labels);
    if (!std::isfinite(metric))
      throw numeric_error("validation metric is not finite at epoch " + std::to_string(epoch));
    history.push_back({epoch, train_loss, metric, lr});

    if (metric > best_metric) {
      best_metric = metric;
      best_params = m.params;
      since_best = 0;
    } else {
      since_best += 1;
      if (since_best >= m.cfg.patience) break;
    }
  }
  m.params = best_params;
  return history;
}

inline void save_history_csv(const std::string& path, const std::vector<EpochStats>& hist) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw input_error("cannot write history file: " + path);
  os << "epoch,train_loss,val_accuracy,lr\n";
  char buf[64];
  auto fmt = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  for (const auto& row : hist)
    os << row.epoch << "," << fmt(row.train_loss) << "," << fmt(row.val_accuracy) << ","
       << fmt(row.lr) << "\n";
}

inline constexpr char kCheckpointMagic[9] = {'M', 'E', 'N', 'E', 'T', 'C', 'K', 'P', 'T'};

inline void save_checkpoint(const std::string& path, const MenetModel& m) {
  using namespace store_detail;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw input_error("cannot write checkpoint: " + path);
  put_bytes(os, kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint8_t>(os, 1);
  for (size_t v = 0; v < kViews; ++v) put<std::uint64_t>(os, m.cfg.hidden[v]);
  put<std::uint64_t>(os, m.cfg.n_classes);
  put<double>(os, m.cfg.learning_rate);
  put<double>(os, m.cfg.weight_decay);
  put<std::uint64_t>(os, m.cfg.batch_size);
  put<std::int32_t>(os, m.cfg.max_epochs);
  put<std::int32_t>(os, m.cfg.patience);
  put<double>(os, m.cfg.anneal_factor);
  put<std::int32_t>(os, m.cfg.anneal_every);
  put<std::uint64_t>(os, m.cfg.seed);
  put<std::uint8_t>(os, m.cfg.use_adam ? 1 : 0);
  put<double>(os, m.cfg.adam_beta1);
  put<double>(os, m.cfg.adam_beta2);
  put<double>(os, m.cfg.adam_eps);
  for (size_t v = 0; v < kViews; ++v) put<std::uint64_t>(os, m.view_dims[v]);
  put<std::int32_t>(os, m.epoch);
  put<std::int64_t>(os, m.adam_t);
  put<std::uint64_t>(os, m.params.size());
  put_bytes(os, m.params.data(), m.params.size() * sizeof(double));
  put_bytes(os, m.adam_m.data(), m.adam_m.size() * sizeof(double));
  put_bytes(os, m.adam_v.data(), m.adam_v.size() * sizeof(double));
  if (!os) throw input_error("short write on checkpoint: " + path);
}

inline MenetModel load_checkpoint(const std::string& path) {
  using namespace store_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("cannot read checkpoint: " + path);
  char magic[9];
  get_bytes(is, magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw input_error("not a checkpoint file: " + path);
  if (get<std::uint8_t>(is) != 1) throw input_error("unsupported checkpoint version");
  MenetConfig cfg;
  for (size_t v = 0; v < kViews; ++v) cfg.hidden[v] = get<std::uint64_t>(is);
  cfg.n_classes = get<std::uint64_t>(is);
  cfg.learning_rate = get<double>(is);
  cfg.weight_decay = get<double>(is);
  cfg.batch_size = get<std::uint64_t>(is);
  cfg.max_epochs = get<std::int32_t>(is);
  cfg.patience = get<std::int32_t>(is);
  cfg.anneal_factor = get<double>(is);
  cfg.anneal_every = get<std::int32_t>(is);
  cfg.seed = get<std::uint64_t>(is);
  cfg.use_adam = get<std::uint8_t>(is) == 1;
  cfg.adam_beta1 = get<double>(is);
  cfg.adam_beta2 = get<double>(is);
  cfg.adam_eps = get<double>(is);
  std::array<size_t, kViews> view_dims{};
  for (size_t v = 0; v < kViews; ++v) view_dims[v] = get<std::uint64_t>(is);
  MenetModel m = init_model(cfg, view_dims);
  m.epoch = get<std::int32_t>(is);
  m.adam_t = get<std::int64_t>(is);
  const auto n_params = get<std::uint64_t>(is);
  if (n_params != m.params.size())
    throw input_error("checkpoint parameter count does not match its header");
  get_bytes(is, m.params.data(), m.params.size() * sizeof(double));
  get_bytes(is, m.adam_m.data(), m.adam_m.size() * sizeof(double));
  get_bytes(is, m.adam_v.data(), m.adam_v.size() * sizeof(double));
  return m;
}

}  // namespace menet
