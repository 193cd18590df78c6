#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "menet/config.hpp"
#include "test_util.hpp"

using namespace menet;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("config parser handles sections, comments and quotes", "[config]") {
  const auto cf = ConfigFile::parse(
      "# leading comment\n"
      "[paths]\n"
      "input = data.jsonl   # trailing comment\n"
      "workdir = \"my work dir\"\n"
      "\n"
      "[run]\n"
      "seed=42 ; alt comment\n"
      "  threads =  8\n");
  CHECK(cf.sections.at("paths").at("input") == "data.jsonl");
  CHECK(cf.sections.at("paths").at("workdir") == "my work dir");
  CHECK(cf.sections.at("run").at("seed") == "42");
  CHECK(cf.sections.at("run").at("threads") == "8");
}

TEST_CASE("config parser reports the offending line", "[config]") {
  CHECK_THROWS_WITH(ConfigFile::parse("[paths]\n[oops\n"),
                    ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(ConfigFile::parse("[paths]\nnot a key value line\n"),
                    ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(ConfigFile::parse("= naked value\n"), ContainsSubstring("line 1"));
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/config.toml"), input_error);
}

TEST_CASE("shipped defaults", "[config]") {
  const PipelineConfig cfg;
  CHECK(cfg.hidden == std::array<size_t, 4>{150, 150, 30, 30});
  CHECK(cfg.learning_rate == 0.0001);
  CHECK(cfg.weight_decay == 0.1);
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.max_epochs == 200);
  CHECK(cfg.patience == 10);
  CHECK(cfg.anneal_factor == 0.9);
  CHECK(cfg.anneal_every == 10);
  CHECK(cfg.use_adam);
  CHECK(cfg.min_df == 40);
  CHECK(cfg.d_doc == 300);
  CHECK(cfg.d_node == 300);
  CHECK(cfg.doc_epochs == 20);
  CHECK(cfg.doc_negatives == 5);
  CHECK(cfg.doc_min_count == 1);
  CHECK(cfg.walk_p == 1.0);
  CHECK(cfg.walk_q == 1.0);
  CHECK(cfg.walk_length == 80);
  CHECK(cfg.walks_per_node == 10);
  CHECK(cfg.window == 10);
  CHECK(cfg.node_negatives == 5);
  CHECK(cfg.node_epochs == 5);
  CHECK(cfg.celebrity_threshold == 5);
  CHECK(cfg.format == "jsonl");
  CHECK(cfg.validation_frac == 0.1);
  CHECK(cfg.test_frac == 0.1);
  CHECK(cfg.task == "region");
  CHECK(cfg.seed == 1);
  CHECK(cfg.deterministic);
  CHECK(cfg.threads == 1);
  CHECK(cfg.workdir == "work");
}

TEST_CASE("config values override the defaults", "[config]") {
  PipelineConfig cfg;
  cfg.apply(ConfigFile::parse(
      "[paths]\n"
      "input = tweets.tsv\n"
      "workdir = out\n"
      "label_file = labels.tsv\n"
      "split_file = split.tsv\n"
      "[corpus]\n"
      "format = geotext_tsv\n"
      "validation_frac = 0.2\n"
      "test_frac = 0.25\n"
      "[features]\n"
      "min_df = 3\n"
      "d_doc = 50\n"
      "d_node = 40\n"
      "doc_epochs = 7\n"
      "doc_negatives = 3\n"
      "doc_min_count = 2\n"
      "p = 0.5\n"
      "q = 2.0\n"
      "walk_length = 30\n"
      "walks_per_node = 6\n"
      "window = 4\n"
      "node_negatives = 2\n"
      "node_epochs = 9\n"
      "celebrity_threshold = 7\n"
      "[model]\n"
      "hidden1 = 10\n"
      "hidden2 = 11\n"
      "hidden3 = 12\n"
      "hidden4 = 13\n"
      "learning_rate = 0.01\n"
      "weight_decay = 0.05\n"
      "batch_size = 16\n"
      "max_epochs = 33\n"
      "patience = 4\n"
      "anneal_factor = 0.5\n"
      "anneal_every = 3\n"
      "optimizer = sgd\n"
      "[run]\n"
      "task = state\n"
      "seed = 12345\n"
      "deterministic = false\n"
      "threads = 8\n"));

  CHECK(cfg.input == "tweets.tsv");
  CHECK(cfg.workdir == "out");
  CHECK(cfg.label_file == "labels.tsv");
  CHECK(cfg.split_file == "split.tsv");
  CHECK(cfg.format == "geotext_tsv");
  CHECK(cfg.input_format() == InputFormat::geotext_tsv);
  CHECK(cfg.validation_frac == 0.2);
  CHECK(cfg.test_frac == 0.25);
  CHECK(cfg.min_df == 3);
  CHECK(cfg.d_doc == 50);
  CHECK(cfg.d_node == 40);
  CHECK(cfg.doc_epochs == 7);
  CHECK(cfg.doc_negatives == 3);
  CHECK(cfg.doc_min_count == 2);
  CHECK(cfg.walk_p == 0.5);
  CHECK(cfg.walk_q == 2.0);
  CHECK(cfg.walk_length == 30);
  CHECK(cfg.walks_per_node == 6);
  CHECK(cfg.window == 4);
  CHECK(cfg.node_negatives == 2);
  CHECK(cfg.node_epochs == 9);
  CHECK(cfg.celebrity_threshold == 7);
  CHECK(cfg.hidden == std::array<size_t, 4>{10, 11, 12, 13});
  CHECK(cfg.learning_rate == 0.01);
  CHECK(cfg.weight_decay == 0.05);
  CHECK(cfg.batch_size == 16);
  CHECK(cfg.max_epochs == 33);
  CHECK(cfg.patience == 4);
  CHECK(cfg.anneal_factor == 0.5);
  CHECK(cfg.anneal_every == 3);
  CHECK_FALSE(cfg.use_adam);
  CHECK(cfg.task == "state");
  CHECK(cfg.seed == 12345);
  CHECK_FALSE(cfg.deterministic);
  CHECK(cfg.threads == 8);
}

TEST_CASE("unknown keys and bad values are rejected", "[config]") {
  PipelineConfig cfg;
  CHECK_THROWS_WITH(cfg.apply(ConfigFile::parse("[features]\nbogus = 1\n")),
                    ContainsSubstring("features.bogus"));
  CHECK_THROWS_AS(cfg.apply(ConfigFile::parse("[weird]\nx = 1\n")), input_error);
  CHECK_THROWS_AS(cfg.apply(ConfigFile::parse("top_level = 1\n")), input_error);
  CHECK_THROWS_AS(cfg.apply(ConfigFile::parse("[model]\noptimizer = rmsprop\n")),
                  input_error);
  CHECK_THROWS_AS(cfg.apply(ConfigFile::parse("[corpus]\nformat = parquet\n")),
                  input_error);
  CHECK_THROWS_WITH(cfg.apply(ConfigFile::parse("[model]\nlearning_rate = fast\n")),
                    ContainsSubstring("not a number"));
  CHECK_THROWS_WITH(cfg.apply(ConfigFile::parse("[model]\nbatch_size = 1.5\n")),
                    ContainsSubstring("not an integer"));
  CHECK_THROWS_WITH(cfg.apply(ConfigFile::parse("[run]\ndeterministic = maybe\n")),
                    ContainsSubstring("not a boolean"));
}

TEST_CASE("boolean spellings", "[config]") {
  for (const std::string v : {"true", "1", "yes"}) {
    PipelineConfig cfg;
    cfg.apply(ConfigFile::parse("[run]\ndeterministic = " + v + "\n"));
    CHECK(cfg.deterministic);
  }
  for (const std::string v : {"false", "0", "no"}) {
    PipelineConfig cfg;
    cfg.apply(ConfigFile::parse("[run]\ndeterministic = " + v + "\n"));
    CHECK_FALSE(cfg.deterministic);
  }
}

TEST_CASE("derived stage configs inherit their own seed streams", "[config]") {
  PipelineConfig cfg;
  cfg.seed = 777;
  cfg.d_doc = 60;
  cfg.d_node = 70;
  cfg.threads = 8;

  const auto pv = cfg.pvdbow_config();
  CHECK(pv.dim == 60);
  CHECK(pv.epochs == cfg.doc_epochs);
  CHECK(pv.negatives == cfg.doc_negatives);
  CHECK(pv.min_count == cfg.doc_min_count);
  CHECK(pv.seed == derive_seed(777, 11));
  CHECK(pv.threads == 1);  // deterministic mode pins threads

  const auto wk = cfg.walk_config();
  CHECK(wk.p == cfg.walk_p);
  CHECK(wk.q == cfg.walk_q);
  CHECK(wk.walk_length == cfg.walk_length);
  CHECK(wk.walks_per_node == cfg.walks_per_node);
  CHECK(wk.seed == derive_seed(777, 12));

  const auto nv = cfg.node2vec_config();
  CHECK(nv.dim == 70);
  CHECK(nv.window == cfg.window);
  CHECK(nv.negatives == cfg.node_negatives);
  CHECK(nv.epochs == cfg.node_epochs);
  CHECK(nv.seed == derive_seed(777, 13));

  const auto mc = cfg.model_config(9);
  CHECK(mc.n_classes == 9);
  CHECK(mc.hidden == cfg.hidden);
  CHECK(mc.learning_rate == cfg.learning_rate);
  CHECK(mc.weight_decay == cfg.weight_decay);
  CHECK(mc.seed == derive_seed(777, 14));

  cfg.deterministic = false;
  CHECK(cfg.effective_threads() == 8);
  CHECK(cfg.pvdbow_config().threads == 8);
  cfg.deterministic = true;
  CHECK(cfg.effective_threads() == 1);
}

TEST_CASE("configs load from disk", "[config]") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("run.toml"),
                       "[paths]\ninput = x.jsonl\n[run]\nseed = 5\n");
  const auto cfg = PipelineConfig::from_file(tmp.file("run.toml"));
  CHECK(cfg.input == "x.jsonl");
  CHECK(cfg.seed == 5);
  CHECK_THROWS_AS(PipelineConfig::from_file(tmp.file("missing.toml")), input_error);
}
