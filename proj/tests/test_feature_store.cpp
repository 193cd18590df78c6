#include <catch2/catch_amalgamated.hpp>

#include "menet/feature_store.hpp"
#include "test_util.hpp"

using namespace menet;

TEST_CASE("dense feature round trip", "[store]") {
  auto m = FeatureMatrix::make_dense("timestamp", 3, 4);
  for (size_t i = 0; i < m.dense.size(); ++i) m.dense[i] = 0.25 * static_cast<double>(i);
  testutil::TempDir tmp;
  save_features(tmp.file("f.bin"), m);
  const auto r = load_features(tmp.file("f.bin"));
  CHECK(r.view == "timestamp");
  CHECK(r.n_rows == 3);
  CHECK(r.n_cols == 4);
  CHECK_FALSE(r.sparse);
  CHECK(r.dense == m.dense);
}

TEST_CASE("sparse feature round trip", "[store]") {
  auto m = FeatureMatrix::make_sparse("tfidf", 3, 100);
  m.rows[0] = {{2, 0.5}, {99, -1.25}};
  m.rows[2] = {{0, 3.0}};
  testutil::TempDir tmp;
  save_features(tmp.file("f.bin"), m);
  const auto r = load_features(tmp.file("f.bin"));
  CHECK(r.sparse);
  CHECK(r.rows == m.rows);
  const auto row0 = r.row_as_dense(0);
  CHECK(row0[2] == 0.5);
  CHECK(row0[99] == -1.25);
  CHECK(row0[1] == 0.0);
  CHECK(r.row_as_dense(1) == std::vector<double>(100, 0.0));
}

TEST_CASE("rewriting the same matrix is byte-identical", "[store]") {
  auto m = FeatureMatrix::make_dense("doc2vec", 2, 3);
  m.dense = {0.1, -0.2, 0.3, 1e-17, 5e300, 0.0};
  testutil::TempDir tmp;
  save_features(tmp.file("a.bin"), m);
  save_features(tmp.file("b.bin"), m);
  CHECK(testutil::read_file(tmp.file("a.bin")) == testutil::read_file(tmp.file("b.bin")));
}

TEST_CASE("feature store load failures", "[store]") {
  testutil::TempDir tmp;
  SECTION("missing file") {
    CHECK_THROWS_AS(load_features(tmp.file("nope.bin")), input_error);
  }
  SECTION("wrong magic") {
    testutil::write_file(tmp.file("bad.bin"), "NOTAFEATUREFILE----");
    CHECK_THROWS_AS(load_features(tmp.file("bad.bin")), input_error);
  }
  SECTION("truncated body") {
    auto m = FeatureMatrix::make_dense("tfidf", 4, 4);
    save_features(tmp.file("t.bin"), m);
    auto bytes = testutil::read_file(tmp.file("t.bin"));
    bytes.resize(bytes.size() - 10);
    testutil::write_file(tmp.file("t.bin"), bytes);
    CHECK_THROWS_AS(load_features(tmp.file("t.bin")), input_error);
  }
}
