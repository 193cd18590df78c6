#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "menet/config.hpp"
#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include "menet/feature_store.hpp"
#include "menet/geo.hpp"
#include "menet/graph.hpp"
#include "menet/model.hpp"
#include "menet/node2vec.hpp"
#include "menet/pvdbow.hpp"
#include "menet/temporal.hpp"
#include "menet/text_features.hpp"

namespace menet {

// Fixed artifact names; stages talk to each other only through these files.
namespace workdir {

inline std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline std::string documents(const std::string& d) { return join(d, "documents.bin"); }
inline std::string splits(const std::string& d) { return join(d, "splits.tsv"); }
inline std::string rejects(const std::string& d) { return join(d, "ingest_rejects.tsv"); }
inline std::string vocabulary(const std::string& d) { return join(d, "vocabulary.tsv"); }
inline std::string features(const std::string& d, const std::string& view) {
  return join(d, "features_" + view + ".bin");
}
inline std::string pvdbow_model(const std::string& d) { return join(d, "pvdbow_model.bin"); }
inline std::string graph_edges(const std::string& d) { return join(d, "graph_edges.tsv"); }
inline std::string class_table(const std::string& d) { return join(d, "class_table.csv"); }
inline std::string checkpoint(const std::string& d) { return join(d, "checkpoint.bin"); }
inline std::string history(const std::string& d) { return join(d, "history.csv"); }
inline std::string eval_report(const std::string& d) { return join(d, "eval.json"); }
inline std::string predictions(const std::string& d) { return join(d, "predictions.tsv"); }

}  // namespace workdir

struct IngestSummary {
  size_t n_train = 0;
  size_t n_validation = 0;
  size_t n_test = 0;
  size_t rejected_lines = 0;
  size_t rejected_users = 0;
};

inline IngestSummary run_ingest(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw input_error("no input path configured");
  std::filesystem::create_directories(cfg.workdir);

  std::map<std::string, std::string> labels;
  const bool have_lookup = !cfg.label_file.empty();
  if (have_lookup) labels = load_label_lookup(cfg.label_file);
  const auto ingested =
      ingest(cfg.input, cfg.input_format(), have_lookup ? &labels : nullptr);

  std::set<std::string> user_set;
  for (const auto& r : ingested.records) user_set.insert(r.user_id);

  SplitSpec split;
  if (!cfg.split_file.empty()) {
    split = load_split_file(cfg.split_file);
    split.check_disjoint();
    for (const auto* ids : {&split.train_ids, &split.validation_ids, &split.test_ids})
      for (const auto& id : *ids)
        if (!user_set.count(id))
          throw manifest_error("split file references unknown user: " + id);
  } else {
    std::vector<std::string> ids(user_set.begin(), user_set.end());
    split = generate_split(ids, cfg.validation_frac, cfg.test_frac, cfg.seed);
  }

  const auto built = build_documents(ingested.records, split);
  save_documents(workdir::documents(cfg.workdir), built.documents);
  save_split_file(workdir::splits(cfg.workdir), split);
  {
    std::ofstream os(workdir::rejects(cfg.workdir), std::ios::trunc);
    for (const auto& r : ingested.rejects)
      os << "line\t" << r.line << "\t" << r.reason << "\n";
    for (const auto& r : built.rejected_users)
      os << "user\t" << r.user_id << "\t" << r.reason << "\n";
  }

  IngestSummary s;
  s.rejected_lines = ingested.rejects.size();
  s.rejected_users = built.rejected_users.size();
  for (const auto& doc : built.documents) {
    if (doc.split == Split::train) ++s.n_train;
    else if (doc.split == Split::validation) ++s.n_validation;
    else ++s.n_test;
  }
  return s;
}

inline const std::set<std::string>& all_view_names() {
  static const std::set<std::string> views = {"tfidf", "node2vec", "doc2vec", "timestamp"};
  return views;
}

inline std::vector<UserDocument> load_pipeline_documents(const PipelineConfig& cfg) {
  const auto path = workdir::documents(cfg.workdir);
  if (!std::filesystem::exists(path))
    throw input_error("documents file missing (run ingest first): " + path);
  return load_documents(path);
}

// Writes one feature file per requested view; returns the paths written.
inline std::vector<std::string> run_featurize(const PipelineConfig& cfg,
                                              std::set<std::string> views = {}) {
  if (views.empty()) views = all_view_names();
  for (const auto& v : views)
    if (!all_view_names().count(v)) throw input_error("unknown view: " + v);

  const auto docs = load_pipeline_documents(cfg);
  std::vector<UserDocument> train_docs;
  for (const auto& d : docs)
    if (d.split == Split::train) train_docs.push_back(d);

  std::vector<std::string> written;
  if (views.count("tfidf")) {
    const auto vocab = fit_vocabulary(train_docs, cfg.min_df);
    save_vocabulary(workdir::vocabulary(cfg.workdir), vocab);
    const auto m = tfidf_matrix(docs, vocab);
    const auto path = workdir::features(cfg.workdir, "tfidf");
    save_features(path, m);
    written.push_back(path);
  }
  if (views.count("doc2vec")) {
    const auto model = train_pvdbow(train_docs, cfg.pvdbow_config());
    save_pvdbow(workdir::pvdbow_model(cfg.workdir), model);
    auto m = FeatureMatrix::make_dense("doc2vec", docs.size(), cfg.d_doc);
    size_t train_row = 0;
    for (size_t i = 0; i < docs.size(); ++i) {
      if (docs[i].split == Split::train) {
        const auto v = model.paragraph(train_row++);
        std::copy(v.begin(), v.end(), m.dense_row(i));
      } else {
        const auto v = infer_paragraph(model, docs[i], default_infer_steps(model, docs[i]),
                                       derive_seed(cfg.seed, 15, i));
        std::copy(v.begin(), v.end(), m.dense_row(i));
      }
    }
    const auto path = workdir::features(cfg.workdir, "doc2vec");
    save_features(path, m);
    written.push_back(path);
  }
  if (views.count("node2vec")) {
    const auto graph = build_mention_graph(docs, cfg.celebrity_threshold);
    save_edge_list(workdir::graph_edges(cfg.workdir), graph);
    const auto walks = simulate_walks(graph, cfg.walk_config(), cfg.effective_threads());
    const auto m = train_node_embeddings(graph, walks, cfg.node2vec_config());
    const auto path = workdir::features(cfg.workdir, "node2vec");
    save_features(path, m);
    written.push_back(path);
  }
  if (views.count("timestamp")) {
    const auto m = timestamp_matrix(docs);
    const auto path = workdir::features(cfg.workdir, "timestamp");
    save_features(path, m);
    written.push_back(path);
  }
  return written;
}

inline ViewBatch load_view_batch(const PipelineConfig& cfg, size_t n_docs) {
  std::array<FeatureMatrix, kViews> mats;
  std::array<const FeatureMatrix*, kViews> ptrs{};
  for (size_t v = 0; v < kViews; ++v) {
    const auto path = workdir::features(cfg.workdir, kViewNames[v]);
    if (!std::filesystem::exists(path))
      throw input_error("feature file missing (run featurize first): " + path);
    mats[v] = load_features(path);
    if (mats[v].view != kViewNames[v])
      throw feature_mismatch_error("feature file " + path + " holds view " + mats[v].view);
    if (mats[v].n_rows != n_docs)
      throw feature_mismatch_error(
          "feature rows do not match documents: " + std::to_string(mats[v].n_rows) +
          " vs " + std::to_string(n_docs) + " (" + kViewNames[v] + ")");
    ptrs[v] = &mats[v];
  }
  return ViewBatch::from_features(ptrs);
}

namespace pipeline_detail {

inline std::vector<size_t> split_rows(const std::vector<UserDocument>& docs, Split s) {
  std::vector<size_t> rows;
  for (size_t i = 0; i < docs.size(); ++i)
    if (docs[i].split == s) rows.push_back(i);
  return rows;
}

inline std::vector<std::uint32_t> subset_labels(const std::vector<std::uint32_t>& all,
                                                const std::vector<size_t>& rows) {
  std::vector<std::uint32_t> out;
  out.reserve(rows.size());
  for (size_t r : rows) out.push_back(all[r]);
  return out;
}

}  // namespace pipeline_detail

inline std::vector<EpochStats> run_train(const PipelineConfig& cfg) {
  const auto docs = load_pipeline_documents(cfg);
  const auto batch = load_view_batch(cfg, docs.size());

  std::vector<UserDocument> train_docs;
  for (const auto& d : docs)
    if (d.split == Split::train) train_docs.push_back(d);
  const auto table = build_class_table(train_docs);
  require_known_labels(table, docs);
  save_class_table_csv(workdir::class_table(cfg.workdir), table);

  const auto labels = label_ids(table, docs);
  const auto train_rows = pipeline_detail::split_rows(docs, Split::train);
  const auto val_rows = pipeline_detail::split_rows(docs, Split::validation);
  const auto train_labels = pipeline_detail::subset_labels(labels, train_rows);
  const auto val_labels = pipeline_detail::subset_labels(labels, val_rows);

  auto model = init_model(cfg.model_config(table.size()), batch.dims);
  const auto history = train(model, batch.select(train_rows), train_labels,
                             batch.select(val_rows), val_labels);
  save_checkpoint(workdir::checkpoint(cfg.workdir), model);
  save_history_csv(workdir::history(cfg.workdir), history);
  return history;
}

inline EvalReport run_evaluate(const PipelineConfig& cfg) {
  const auto docs = load_pipeline_documents(cfg);
  const auto ckpt_path = workdir::checkpoint(cfg.workdir);
  if (!std::filesystem::exists(ckpt_path))
    throw input_error("checkpoint missing (run train first): " + ckpt_path);
  const auto model = load_checkpoint(ckpt_path);
  const auto table = load_class_table_csv(workdir::class_table(cfg.workdir));
  const auto batch = load_view_batch(cfg, docs.size());

  const auto test_rows = pipeline_detail::split_rows(docs, Split::test);
  std::vector<UserDocument> test_docs;
  for (size_t r : test_rows) test_docs.push_back(docs[r]);
  const auto preds = predict(model, batch.select(test_rows));
  const auto report = evaluate(preds, test_docs, table);

  std::ofstream os(workdir::eval_report(cfg.workdir), std::ios::trunc);
  if (!os) throw input_error("cannot write eval report");
  os << report_json(report, table).dump(2) << "\n";
  return report;
}

inline void run_predict(const PipelineConfig& cfg) {
  const auto docs = load_pipeline_documents(cfg);
  const auto ckpt_path = workdir::checkpoint(cfg.workdir);
  if (!std::filesystem::exists(ckpt_path))
    throw input_error("checkpoint missing (run train first): " + ckpt_path);
  const auto model = load_checkpoint(ckpt_path);
  const auto table = load_class_table_csv(workdir::class_table(cfg.workdir));
  const auto batch = load_view_batch(cfg, docs.size());

  const auto preds = predict(model, batch);
  std::ofstream os(workdir::predictions(cfg.workdir), std::ios::trunc);
  if (!os) throw input_error("cannot write predictions file");
  os << "user_id\tpredicted_label\tcentroid_longitude\tcentroid_latitude\n";
  for (size_t i = 0; i < docs.size(); ++i) {
    const auto& c = table.classes[preds[i]];
    os << docs[i].user_id << "\t" << c.label << "\t"
       << geo_detail::format_double(c.centroid_longitude) << "\t"
       << geo_detail::format_double(c.centroid_latitude) << "\n";
  }
}

}  // namespace menet
