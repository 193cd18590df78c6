#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "menet/alias.hpp"
#include "menet/corpus.hpp"
#include "menet/porter.hpp"
#include "menet/rng.hpp"
#include "menet/stopwords.hpp"
#include "menet/timeparse.hpp"
#include "test_util.hpp"

using namespace menet;

// Frozen from an independent reference implementation of the 1980 algorithm,
// itself validated against the worked examples in the original publication.
static const std::vector<std::pair<std::string, std::string>> kPorterVectors = {
    {"running", "run"},       {"stores", "store"},        {"eating", "eat"},
    {"traveling", "travel"},  {"beaches", "beach"},       {"city", "citi"},
    {"cities", "citi"},       {"weather", "weather"},     {"raining", "rain"},
    {"sunny", "sunni"},       {"flights", "flight"},      {"delayed", "delai"},
    {"airport", "airport"},   {"coffee", "coffe"},        {"drinking", "drink"},
    {"morning", "morn"},      {"nights", "night"},        {"parties", "parti"},
    {"studying", "studi"},    {"working", "work"},        {"games", "game"},
    {"playing", "plai"},      {"watching", "watch"},      {"movies", "movi"},
    {"concerts", "concert"},  {"singing", "sing"},        {"driving", "drive"},
    {"trucks", "truck"},      {"highways", "highwai"},    {"mountains", "mountain"},
    {"rivers", "river"},      {"lakes", "lake"},          {"fishing", "fish"},
    {"hunting", "hunt"},      {"cooking", "cook"},        {"dinner", "dinner"},
    {"restaurants", "restaur"}, {"pizzas", "pizza"},      {"burgers", "burger"},
    {"snowing", "snow"},      {"freezing", "freez"},      {"temperatures", "temperatur"},
    {"universities", "univers"}, {"colleges", "colleg"},  {"students", "student"},
    {"teachers", "teacher"},  {"happiness", "happi"},     {"celebration", "celebr"},
    {"beautiful", "beauti"},  {"amazing", "amaz"},        {"awesome", "awesom"},
    {"terrible", "terribl"},  {"horrible", "horribl"},    {"election", "elect"},
    {"political", "polit"},   {"government", "govern"},   {"national", "nation"},
    {"international", "intern"}, {"connection", "connect"}, {"computers", "comput"},
    {"programming", "program"}, {"engineers", "engin"},   {"hospitals", "hospit"},
    {"doctors", "doctor"},    {"nurses", "nurs"},         {"generalization", "gener"},
    {"relational", "relat"},  {"conditional", "condit"},  {"electricity", "electr"},
    {"controlling", "control"},
    // step examples from the original publication
    {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},
    {"feed", "feed"},         {"agreed", "agre"},         {"plastered", "plaster"},
    {"bled", "bled"},         {"motoring", "motor"},      {"sing", "sing"},
    {"hopping", "hop"},       {"tanned", "tan"},          {"falling", "fall"},
    {"hissing", "hiss"},      {"fizzed", "fizz"},         {"failing", "fail"},
    {"filing", "file"},       {"happy", "happi"},         {"sky", "sky"},
    {"sized", "size"},        {"troubled", "troubl"},     {"conflated", "conflat"},
    {"rational", "ration"},   {"probate", "probat"},      {"rate", "rate"},
    {"cease", "ceas"},
};

TEST_CASE("porter stemmer matches reference vectors", "[corpus][porter]") {
  for (const auto& [word, want] : kPorterVectors) {
    INFO(word);
    CHECK(porter_stem(word) == want);
  }
}

TEST_CASE("porter leaves very short words alone", "[corpus][porter]") {
  CHECK(porter_stem("as") == "as");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("") == "");
}

TEST_CASE("built-in stopword list matches the shipped data file", "[corpus]") {
  const auto from_file = load_stopwords(std::string(MENET_SOURCE_DIR) + "/data/stopwords_en.txt");
  const auto& builtin = english_stopwords();
  CHECK(builtin.size() == 179);
  CHECK(from_file == builtin);
}

TEST_CASE("iso8601 parsing", "[corpus][time]") {
  auto t = parse_iso8601_utc("2010-03-01T13:00:00Z");
  REQUIRE(t.has_value());
  CHECK(t->hour_utc == 13);
  CHECK(t->epoch_seconds == 1267448400);

  SECTION("offset is applied") {
    auto t2 = parse_iso8601_utc("2010-03-01T13:00:00+02:00");
    REQUIRE(t2.has_value());
    CHECK(t2->hour_utc == 11);
    CHECK(t2->epoch_seconds == 1267448400 - 7200);
  }
  SECTION("negative offset crossing midnight") {
    auto t2 = parse_iso8601_utc("2010-03-01T23:30:00-05:00");
    REQUIRE(t2.has_value());
    CHECK(t2->hour_utc == 4);
  }
  SECTION("no designator means UTC, space separator accepted") {
    auto t2 = parse_iso8601_utc("2010-03-01 13:00:00");
    REQUIRE(t2.has_value());
    CHECK(t2->epoch_seconds == t->epoch_seconds);
  }
  SECTION("fractional seconds") {
    auto t2 = parse_iso8601_utc("2010-03-01T13:00:00.123Z");
    REQUIRE(t2.has_value());
    CHECK(t2->epoch_seconds == t->epoch_seconds);
  }
  SECTION("leap day") {
    CHECK(parse_iso8601_utc("2012-02-29T00:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601_utc("2011-02-29T00:00:00Z").has_value());
  }
  SECTION("rejects") {
    CHECK_FALSE(parse_iso8601_utc("").has_value());
    CHECK_FALSE(parse_iso8601_utc("yesterday").has_value());
    CHECK_FALSE(parse_iso8601_utc("2010-13-01T00:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601_utc("2010-03-01T24:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601_utc("2010-03-01T13:00:00Zjunk").has_value());
    CHECK_FALSE(parse_iso8601_utc("2010-03-01T13:00:00+2:00").has_value());
  }
}

TEST_CASE("preprocess: urls, stopwords, stemming", "[corpus]") {
  CHECK(preprocess("Running to http://t.co/x the stores!!") ==
        std::vector<std::string>{"run", "store"});
  CHECK(preprocess("") == std::vector<std::string>{});
  CHECK(preprocess("@bob @bob hello") == std::vector<std::string>{"@bob", "@bob", "hello"});
}

TEST_CASE("preprocess: mention handles survive stopword removal and stemming", "[corpus]") {
  // "@the" is a handle, not the stopword "the"; handles are not stemmed.
  CHECK(preprocess("@the @Running hi") == std::vector<std::string>{"@the", "@running", "hi"});
  CHECK(preprocess("wow WWW.example.com and https://x.co/y?a=1 done") ==
        std::vector<std::string>{"wow", "done"});
  CHECK(preprocess("it's DON'T stop") == std::vector<std::string>{"stop"});
  CHECK(preprocess("2010 was cold") == std::vector<std::string>{"2010", "cold"});
}

TEST_CASE("preprocess is idempotent on realistic tweet text", "[corpus][property]") {
  // Classic Porter is not idempotent on every English word (e.g. relational
  // -> relate -> relat), so the vocabulary here sticks to words whose stems
  // are stable.
  static const std::vector<std::string> vocab = {
      "running", "stores", "eating", "beaches", "weather", "raining", "flights",
      "airport", "drinking", "morning", "nights", "working", "games", "watching",
      "concerts", "driving", "trucks", "mountains", "rivers", "lakes", "fishing",
      "cooking", "dinner", "students", "teachers", "amazing", "awesome", "the",
      "and", "to", "from", "@alice", "@bob_99", "2010", "snowing", "cold", "hot",
  };
  Rng rng(20260814);
  for (int iter = 0; iter < 200; ++iter) {
    std::string text;
    const size_t n_words = 1 + rng.below(12);
    for (size_t w = 0; w < n_words; ++w) {
      if (w > 0) text += ' ';
      text += vocab[rng.below(vocab.size())];
    }
    const auto once = preprocess(text);
    std::string joined;
    for (size_t i = 0; i < once.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += once[i];
    }
    const auto twice = preprocess(joined);
    INFO(text);
    CHECK(once == twice);
  }
}

static std::string jsonl_line(const std::string& user, const std::string& text,
                              const std::string& ts, double lat, double lon,
                              const std::string& label) {
  nlohmann::ordered_json j;
  j["user_id"] = user;
  j["text"] = text;
  j["timestamp_utc"] = ts;
  j["latitude"] = lat;
  j["longitude"] = lon;
  j["label"] = label;
  return j.dump() + "\n";
}

TEST_CASE("ingest jsonl", "[corpus][ingest]") {
  testutil::TempDir tmp;

  SECTION("direct field mapping") {
    testutil::write_file(tmp.file("a.jsonl"),
                         R"({"user_id":"u1","text":"hi","timestamp_utc":"2010-03-01T13:00:00Z","latitude":0.0,"longitude":0.0,"label":"A"})"
                         "\n");
    const auto res = ingest(tmp.file("a.jsonl"), InputFormat::jsonl);
    REQUIRE(res.records.size() == 1);
    CHECK(res.rejects.empty());
    const auto& r = res.records[0];
    CHECK(r.user_id == "u1");
    CHECK(r.text == "hi");
    CHECK(r.hour == 13);
    CHECK(r.latitude == 0.0);
    CHECK(r.longitude == 0.0);
    CHECK(r.label == "A");
  }
  SECTION("empty file") {
    testutil::write_file(tmp.file("empty.jsonl"), "");
    const auto res = ingest(tmp.file("empty.jsonl"), InputFormat::jsonl);
    CHECK(res.records.empty());
    CHECK(res.rejects.empty());
  }
  SECTION("latitude without longitude is rejected with line number") {
    testutil::write_file(tmp.file("bad.jsonl"),
                         jsonl_line("u0", "ok", "2010-03-01T00:00:00Z", 1.0, 2.0, "A") +
                         R"({"user_id":"u1","text":"hi","timestamp_utc":"2010-03-01T13:00:00Z","latitude":5.0})"
                         "\n");
    const auto res = ingest(tmp.file("bad.jsonl"), InputFormat::jsonl);
    CHECK(res.records.size() == 1);
    REQUIRE(res.rejects.size() == 1);
    CHECK(res.rejects[0].line == 2);
  }
  SECTION("malformed json and bad timestamps are record-level rejects") {
    testutil::write_file(tmp.file("bad2.jsonl"),
                         "{nope\n" +
                         jsonl_line("u1", "hi", "not-a-time", 0.0, 0.0, "A"));
    const auto res = ingest(tmp.file("bad2.jsonl"), InputFormat::jsonl);
    CHECK(res.records.empty());
    CHECK(res.rejects.size() == 2);
  }
  SECTION("unreadable file is fatal") {
    CHECK_THROWS_AS(ingest(tmp.file("missing.jsonl"), InputFormat::jsonl), input_error);
  }
  SECTION("coordinates out of range rejected") {
    testutil::write_file(tmp.file("oor.jsonl"),
                         jsonl_line("u1", "hi", "2010-03-01T00:00:00Z", 91.0, 0.0, "A"));
    const auto res = ingest(tmp.file("oor.jsonl"), InputFormat::jsonl);
    CHECK(res.records.empty());
    CHECK(res.rejects.size() == 1);
  }
}

TEST_CASE("ingest geotext tsv with label lookup", "[corpus][ingest]") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("a.tsv"),
                       "u1\t2010-03-01T13:00:00\t33.1\t-87.5\thello world\n"
                       "u2\t2010-03-02 05:00:00\t40.7\t-74.0\thi\tthere\n"  // tab inside text
                       "u3\tgarbage\t0\t0\tx\n");
  std::map<std::string, std::string> labels{{"u1", "South"}, {"u2", "Northeast"}};
  const auto res = ingest(tmp.file("a.tsv"), InputFormat::geotext_tsv, &labels);
  REQUIRE(res.records.size() == 2);
  CHECK(res.rejects.size() == 1);
  CHECK(res.records[0].user_id == "u1");
  CHECK(res.records[0].label == "South");
  CHECK(res.records[0].latitude == 33.1);
  CHECK(res.records[1].text == "hi\tthere");
  CHECK(res.records[1].label == "Northeast");
}

static TweetRecord make_record(const std::string& user, const std::string& text,
                               const std::string& ts, double lat, double lon,
                               const std::string& label) {
  TweetRecord r;
  r.user_id = user;
  r.text = text;
  r.timestamp_utc = ts;
  const auto t = parse_iso8601_utc(ts);
  REQUIRE(t.has_value());
  r.epoch_seconds = t->epoch_seconds;
  r.hour = t->hour_utc;
  r.latitude = lat;
  r.longitude = lon;
  r.label = label;
  return r;
}

TEST_CASE("build_documents basics", "[corpus]") {
  SplitSpec split;
  split.train_ids = {"u1"};

  SECTION("hours follow timestamp order") {
    std::vector<TweetRecord> recs = {
        make_record("u1", "first words", "2010-03-01T03:00:00Z", 1.0, 2.0, "A"),
        make_record("u1", "second words", "2010-03-01T20:00:00Z", 9.0, 9.0, "A"),
    };
    const auto out = build_documents(recs, split);
    REQUIRE(out.documents.size() == 1);
    CHECK(out.documents[0].hours == std::vector<int>{3, 20});
    // ground truth from the earliest coordinate-bearing tweet
    CHECK(out.documents[0].gt_latitude == 1.0);
    CHECK(out.documents[0].gt_longitude == 2.0);
  }
  SECTION("out-of-order input is sorted by timestamp") {
    std::vector<TweetRecord> recs = {
        make_record("u1", "later", "2010-03-01T20:00:00Z", 9.0, 9.0, "A"),
        make_record("u1", "earlier", "2010-03-01T03:00:00Z", 1.0, 2.0, "A"),
    };
    const auto out = build_documents(recs, split);
    REQUIRE(out.documents.size() == 1);
    CHECK(out.documents[0].hours == std::vector<int>{3, 20});
    CHECK(out.documents[0].raw_texts == std::vector<std::string>{"earlier", "later"});
    CHECK(out.documents[0].gt_latitude == 1.0);
  }
  SECTION("user in two split sets is fatal") {
    SplitSpec bad;
    bad.train_ids = {"u1"};
    bad.test_ids = {"u1"};
    std::vector<TweetRecord> recs = {
        make_record("u1", "x", "2010-03-01T00:00:00Z", 0.0, 0.0, "A")};
    CHECK_THROWS_AS(build_documents(recs, bad), manifest_error);
  }
  SECTION("user missing from every split set is fatal") {
    std::vector<TweetRecord> recs = {
        make_record("u2", "x", "2010-03-01T00:00:00Z", 0.0, 0.0, "A")};
    CHECK_THROWS_AS(build_documents(recs, split), manifest_error);
  }
  SECTION("user with no coordinate-bearing tweet is rejected and reported") {
    TweetRecord r;
    r.user_id = "u1";
    r.text = "x";
    r.timestamp_utc = "2010-03-01T00:00:00Z";
    r.epoch_seconds = parse_iso8601_utc(r.timestamp_utc)->epoch_seconds;
    r.hour = 0;
    r.label = "A";
    const auto out = build_documents({r}, split);
    CHECK(out.documents.empty());
    REQUIRE(out.rejected_users.size() == 1);
    CHECK(out.rejected_users[0].user_id == "u1");
  }
}

TEST_CASE("build_documents is order-insensitive given distinct timestamps", "[corpus][property]") {
  std::vector<TweetRecord> recs;
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const std::string user = "u" + std::to_string(i % 7);
    char ts[40];
    std::snprintf(ts, sizeof(ts), "2010-03-%02dT%02d:%02d:00Z", 1 + i % 27, i % 24,
                  static_cast<int>(rng.below(60)));
    recs.push_back(make_record(user, "tok" + std::to_string(i) + " words", ts,
                               static_cast<double>(i % 10), static_cast<double>(i % 20), "A"));
  }
  // ensure distinct timestamps per user
  std::map<std::string, std::vector<int64_t>> seen;
  for (auto& r : recs) {
    auto& v = seen[r.user_id];
    while (std::find(v.begin(), v.end(), r.epoch_seconds) != v.end()) {
      r.epoch_seconds += 1;
    }
    v.push_back(r.epoch_seconds);
  }
  SplitSpec split;
  for (int i = 0; i < 7; ++i) split.train_ids.insert("u" + std::to_string(i));

  const auto base = build_documents(recs, split);
  for (int perm = 0; perm < 5; ++perm) {
    for (size_t i = recs.size(); i > 1; --i) std::swap(recs[i - 1], recs[rng.below(i)]);
    const auto shuffled = build_documents(recs, split);
    REQUIRE(shuffled.documents.size() == base.documents.size());
    for (size_t i = 0; i < base.documents.size(); ++i) {
      CHECK(shuffled.documents[i].user_id == base.documents[i].user_id);
      CHECK(shuffled.documents[i].tokens == base.documents[i].tokens);
      CHECK(shuffled.documents[i].hours == base.documents[i].hours);
      CHECK(shuffled.documents[i].gt_latitude == base.documents[i].gt_latitude);
    }
  }
}

TEST_CASE("document count equals distinct users minus rejected", "[corpus][property]") {
  std::vector<TweetRecord> recs;
  SplitSpec split;
  for (int i = 0; i < 12; ++i) {
    const std::string user = "u" + std::to_string(i);
    split.train_ids.insert(user);
    TweetRecord r = make_record(user, "hello world", "2010-03-01T01:00:00Z", 1.0, 1.0, "A");
    if (i % 4 == 0) {  // strip coordinates -> rejected
      r.latitude.reset();
      r.longitude.reset();
    }
    recs.push_back(r);
  }
  const auto out = build_documents(recs, split);
  CHECK(out.documents.size() + out.rejected_users.size() == 12);
  CHECK(out.rejected_users.size() == 3);
}

TEST_CASE("split generation and file round trip", "[corpus]") {
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back("user" + std::to_string(i));
  const auto spec = generate_split(ids, 0.1, 0.1, 42);
  CHECK(spec.validation_ids.size() == 10);
  CHECK(spec.test_ids.size() == 10);
  CHECK(spec.train_ids.size() == 80);
  spec.check_disjoint();

  // deterministic for a fixed seed
  const auto spec2 = generate_split(ids, 0.1, 0.1, 42);
  CHECK(spec2.train_ids == spec.train_ids);
  const auto spec3 = generate_split(ids, 0.1, 0.1, 43);
  CHECK(spec3.train_ids != spec.train_ids);

  testutil::TempDir tmp;
  save_split_file(tmp.file("splits.tsv"), spec);
  const auto loaded = load_split_file(tmp.file("splits.tsv"));
  CHECK(loaded.train_ids == spec.train_ids);
  CHECK(loaded.validation_ids == spec.validation_ids);
  CHECK(loaded.test_ids == spec.test_ids);
}

TEST_CASE("documents file round trip", "[corpus]") {
  SplitSpec split;
  split.train_ids = {"u1"};
  split.test_ids = {"u2"};
  std::vector<TweetRecord> recs = {
      make_record("u1", "Running to http://t.co/x the stores!!", "2010-03-01T03:00:00Z", 1.5, -2.5, "A"),
      make_record("u2", "@u1 hi\nmultiline \"quoted\"", "2010-03-01T04:00:00Z", 3.25, 4.75, "B"),
  };
  const auto out = build_documents(recs, split);
  REQUIRE(out.documents.size() == 2);

  testutil::TempDir tmp;
  save_documents(tmp.file("docs.bin"), out.documents);
  const auto loaded = load_documents(tmp.file("docs.bin"));
  REQUIRE(loaded.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(loaded[i].user_id == out.documents[i].user_id);
    CHECK(loaded[i].tokens == out.documents[i].tokens);
    CHECK(loaded[i].raw_texts == out.documents[i].raw_texts);
    CHECK(loaded[i].hours == out.documents[i].hours);
    CHECK(loaded[i].gt_longitude == out.documents[i].gt_longitude);
    CHECK(loaded[i].gt_latitude == out.documents[i].gt_latitude);
    CHECK(loaded[i].gt_label == out.documents[i].gt_label);
    CHECK(loaded[i].split == out.documents[i].split);
  }
}

TEST_CASE("alias table matches exact categorical probabilities", "[corpus][alias][property]") {
  const std::vector<double> weights = {5.0, 1.0, 0.5, 2.5, 1.0, 10.0};
  AliasTable table{std::span<const double>(weights)};
  double total = 0;
  for (double w : weights) total += w;

  const int n = 100000;
  std::vector<int> counts(weights.size(), 0);
  Rng rng(1234);
  for (int i = 0; i < n; ++i) counts[table.sample(rng)]++;

  double chi2 = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    const double expected = n * weights[k] / total;
    const double d = counts[k] - expected;
    chi2 += d * d / expected;
  }
  // chi-square 0.999 quantile, 5 degrees of freedom
  CHECK(chi2 < 20.515005652432873);
}

TEST_CASE("rng uniformity sanity", "[corpus][rng]") {
  Rng rng(9);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == Catch::Approx(0.5).margin(0.02));
  // below() stays in range
  for (int i = 0; i < 1000; ++i) REQUIRE(rng.below(7) < 7);
}
