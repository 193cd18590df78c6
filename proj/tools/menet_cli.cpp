#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "menet/pipeline.hpp"

namespace {

int dispatch(const std::string& command, const menet::PipelineConfig& cfg,
             const std::set<std::string>& views) {
  using namespace menet;
  if (command == "ingest") {
    const auto s = run_ingest(cfg);
    std::printf("train %zu\nvalidation %zu\ntest %zu\n", s.n_train, s.n_validation,
                s.n_test);
    std::printf("rejected lines %zu\nrejected users %zu\n", s.rejected_lines,
                s.rejected_users);
    std::printf("documents: %s\n", workdir::documents(cfg.workdir).c_str());
  } else if (command == "featurize") {
    for (const auto& path : run_featurize(cfg, views))
      std::printf("wrote %s\n", path.c_str());
  } else if (command == "train") {
    const auto history = run_train(cfg);
    double best = 0.0;
    for (const auto& row : history) best = std::max(best, row.val_accuracy);
    std::printf("epochs %zu\nbest validation accuracy %.6f\n", history.size(), best);
    std::printf("checkpoint: %s\n", workdir::checkpoint(cfg.workdir).c_str());
    std::printf("history: %s\n", workdir::history(cfg.workdir).c_str());
  } else if (command == "evaluate") {
    const auto report = run_evaluate(cfg);
    const auto table = load_class_table_csv(workdir::class_table(cfg.workdir));
    std::fputs(report_table(report, table).c_str(), stdout);
    std::printf("report: %s\n", workdir::eval_report(cfg.workdir).c_str());
  } else if (command == "predict") {
    run_predict(cfg);
    std::printf("predictions: %s\n", workdir::predictions(cfg.workdir).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiview Twitter user geolocation pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, workdir_flag, input_flag;
  std::uint64_t seed_flag = 0;
  bool deterministic_flag = true;
  int threads_flag = 1;
  std::vector<std::string> views_flag;

  auto* opt_config = app.add_option("-c,--config", config_path, "config file (TOML-style)");
  auto* opt_workdir = app.add_option("-w,--workdir", workdir_flag, "artifact directory");
  auto* opt_input = app.add_option("-i,--input", input_flag, "input corpus path");
  auto* opt_seed = app.add_option("-s,--seed", seed_flag, "master random seed");
  auto* opt_det = app.add_flag("--deterministic,!--no-deterministic", deterministic_flag,
                               "force single-threaded stochastic stages");
  auto* opt_threads = app.add_option("-t,--threads", threads_flag,
                                     "worker threads (non-deterministic mode)");

  app.add_subcommand("ingest", "parse the corpus, build user documents and splits");
  auto* cmd_featurize =
      app.add_subcommand("featurize", "compute per-view feature matrices");
  cmd_featurize->add_option("--views", views_flag, "subset of views to compute")
      ->delimiter(',');
  app.add_subcommand("train", "train the fusion model on the train/validation splits");
  app.add_subcommand("evaluate", "score the checkpoint on the test split");
  app.add_subcommand("predict", "write predictions for every user");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    menet::PipelineConfig cfg;
    if (opt_config->count()) cfg = menet::PipelineConfig::from_file(config_path);
    if (opt_workdir->count()) cfg.workdir = workdir_flag;
    if (opt_input->count()) cfg.input = input_flag;
    if (opt_seed->count()) cfg.seed = seed_flag;
    if (opt_det->count()) cfg.deterministic = deterministic_flag;
    if (opt_threads->count()) cfg.threads = threads_flag;

    const std::set<std::string> views(views_flag.begin(), views_flag.end());
    return dispatch(app.get_subcommands().front()->get_name(), cfg, views);
  } catch (const menet::manifest_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const menet::feature_mismatch_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const menet::numeric_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
