#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "menet/errors.hpp"
#include "menet/porter.hpp"
#include "menet/rng.hpp"
#include "menet/stopwords.hpp"
#include "menet/timeparse.hpp"

namespace menet {

enum class Split { train, validation, test };

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    default: return "test";
  }
}

inline std::optional<Split> split_from_name(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  return std::nullopt;
}

struct TweetRecord {
  std::string user_id;
  std::string text;
  std::string timestamp_utc;  // raw string as ingested
  int64_t epoch_seconds = 0;
  int hour = 0;  // 0..23, UTC
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::optional<std::string> label;

  bool has_coordinates() const { return latitude.has_value() && longitude.has_value(); }
};

struct UserDocument {
  std::string user_id;
  std::vector<std::string> tokens;     // preprocessed, all tweets concatenated
  std::vector<std::string> raw_texts;  // kept for mention extraction
  std::vector<int> hours;              // one entry per tweet
  double gt_longitude = 0.0;
  double gt_latitude = 0.0;
  std::string gt_label;
  Split split = Split::train;
};

struct SplitSpec {
  std::set<std::string> train_ids;
  std::set<std::string> validation_ids;
  std::set<std::string> test_ids;

  // Throws if a user appears in more than one set.
  void check_disjoint() const {
    auto overlap = [](const std::set<std::string>& a, const std::set<std::string>& b,
                      const char* what) {
      for (const auto& id : a) {
        if (b.count(id)) throw manifest_error(std::string("user in two split sets (") + what + "): " + id);
      }
    };
    overlap(train_ids, validation_ids, "train/validation");
    overlap(train_ids, test_ids, "train/test");
    overlap(validation_ids, test_ids, "validation/test");
  }

  std::optional<Split> find(const std::string& id) const {
    if (train_ids.count(id)) return Split::train;
    if (validation_ids.count(id)) return Split::validation;
    if (test_ids.count(id)) return Split::test;
    return std::nullopt;
  }

  size_t size() const { return train_ids.size() + validation_ids.size() + test_ids.size(); }
};

// ---------------------------------------------------------------------------
// Preprocessing

namespace corpus_detail {

inline bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool is_handle_char(unsigned char c) { return is_token_char(c) || c == '_'; }

inline bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool url_starts_at(std::string_view s, size_t i) {
  auto prefix = [&](std::string_view p) {
    if (i + p.size() > s.size()) return false;
    for (size_t k = 0; k < p.size(); ++k) {
      if (lower(s[i + k]) != p[k]) return false;
    }
    return true;
  };
  return prefix("http://") || prefix("https://") || prefix("www.");
}

}  // namespace corpus_detail

// Tokenizes a raw tweet: @-mentions are kept verbatim as "@handle" tokens,
// URLs ("http://", "https://", "www." up to whitespace) are dropped, the rest
// is lowercased, split on whitespace/punctuation, stopword-filtered and
// Porter-stemmed.
inline std::vector<std::string> preprocess(
    std::string_view text, const std::unordered_set<std::string>& stopwords = english_stopwords()) {
  using namespace corpus_detail;
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const unsigned char c = text[i];
    if (c == '@' && i + 1 < n && is_handle_char(text[i + 1])) {
      std::string tok = "@";
      ++i;
      while (i < n && is_handle_char(text[i])) tok.push_back(lower(text[i++]));
      tokens.push_back(std::move(tok));
    } else if (url_starts_at(text, i)) {
      while (i < n && !is_space(text[i])) ++i;
    } else if (is_token_char(c)) {
      std::string tok;
      while (i < n && is_token_char(text[i])) tok.push_back(lower(text[i++]));
      if (!stopwords.count(tok)) tokens.push_back(porter_stem(std::move(tok)));
    } else {
      ++i;
    }
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Ingestion

enum class InputFormat { jsonl, geotext_tsv };

struct IngestResult {
  std::vector<TweetRecord> records;
  struct Reject {
    size_t line;  // 1-based line number
    std::string reason;
  };
  std::vector<Reject> rejects;
};

namespace corpus_detail {

inline std::optional<TweetRecord> record_from_json(const nlohmann::json& j, std::string& err) {
  TweetRecord r;
  if (!j.is_object()) {
    err = "not a JSON object";
    return std::nullopt;
  }
  if (!j.contains("user_id") || !j["user_id"].is_string()) {
    err = "missing user_id";
    return std::nullopt;
  }
  r.user_id = j["user_id"].get<std::string>();
  if (!j.contains("text") || !j["text"].is_string()) {
    err = "missing text";
    return std::nullopt;
  }
  r.text = j["text"].get<std::string>();
  if (!j.contains("timestamp_utc") || !j["timestamp_utc"].is_string()) {
    err = "missing timestamp_utc";
    return std::nullopt;
  }
  r.timestamp_utc = j["timestamp_utc"].get<std::string>();
  const auto t = parse_iso8601_utc(r.timestamp_utc);
  if (!t) {
    err = "unparseable timestamp: " + r.timestamp_utc;
    return std::nullopt;
  }
  r.epoch_seconds = t->epoch_seconds;
  r.hour = t->hour_utc;

  const bool has_lat = j.contains("latitude") && !j["latitude"].is_null();
  const bool has_lon = j.contains("longitude") && !j["longitude"].is_null();
  if (has_lat != has_lon) {
    err = "latitude/longitude must be both present or both absent";
    return std::nullopt;
  }
  if (has_lat) {
    if (!j["latitude"].is_number() || !j["longitude"].is_number()) {
      err = "non-numeric coordinates";
      return std::nullopt;
    }
    const double lat = j["latitude"].get<double>();
    const double lon = j["longitude"].get<double>();
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
      err = "coordinates out of range";
      return std::nullopt;
    }
    r.latitude = lat;
    r.longitude = lon;
  }
  if (j.contains("label") && !j["label"].is_null()) {
    if (!j["label"].is_string()) {
      err = "non-string label";
      return std::nullopt;
    }
    r.label = j["label"].get<std::string>();
  }
  return r;
}

inline std::optional<TweetRecord> record_from_tsv(std::string_view line, std::string& err) {
  // GeoText layout: user_id, timestamp, latitude, longitude, text.
  std::vector<std::string_view> cols;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      cols.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  if (cols.size() < 5) {
    err = "expected 5 tab-separated columns, got " + std::to_string(cols.size());
    return std::nullopt;
  }
  TweetRecord r;
  r.user_id = std::string(cols[0]);
  if (r.user_id.empty()) {
    err = "empty user_id";
    return std::nullopt;
  }
  r.timestamp_utc = std::string(cols[1]);
  const auto t = parse_iso8601_utc(r.timestamp_utc);
  if (!t) {
    err = "unparseable timestamp: " + r.timestamp_utc;
    return std::nullopt;
  }
  r.epoch_seconds = t->epoch_seconds;
  r.hour = t->hour_utc;
  try {
    size_t used = 0;
    const std::string lat_s(cols[2]), lon_s(cols[3]);
    const double lat = std::stod(lat_s, &used);
    if (used != lat_s.size()) throw std::invalid_argument(lat_s);
    const double lon = std::stod(lon_s, &used);
    if (used != lon_s.size()) throw std::invalid_argument(lon_s);
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
      err = "coordinates out of range";
      return std::nullopt;
    }
    r.latitude = lat;
    r.longitude = lon;
  } catch (const std::exception&) {
    err = "malformed coordinates";
    return std::nullopt;
  }
  // Remaining columns are the text (re-join in case the tweet contained tabs).
  std::string text(cols[4]);
  for (size_t i = 5; i < cols.size(); ++i) {
    text.push_back('\t');
    text.append(cols[i]);
  }
  r.text = std::move(text);
  return r;
}

}  // namespace corpus_detail

// Reads one record per line; malformed lines are rejected individually with
// their line number. An unreadable file is fatal. The optional label lookup
// (user_id -> class name) fills labels missing from the input itself.
inline IngestResult ingest(const std::string& path, InputFormat format,
                           const std::map<std::string, std::string>* label_lookup = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open input file: " + path);
  IngestResult out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string err;
    std::optional<TweetRecord> rec;
    if (format == InputFormat::jsonl) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        err = "invalid JSON";
      } else {
        rec = corpus_detail::record_from_json(j, err);
      }
    } else {
      rec = corpus_detail::record_from_tsv(line, err);
    }
    if (!rec) {
      out.rejects.push_back({line_no, err});
      continue;
    }
    if (!rec->label && label_lookup != nullptr) {
      const auto it = label_lookup->find(rec->user_id);
      if (it != label_lookup->end()) rec->label = it->second;
    }
    out.records.push_back(std::move(*rec));
  }
  return out;
}

// Loads a "user_id<TAB>label" lookup file.
inline std::map<std::string, std::string> load_label_lookup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open label file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw input_error("label file line without tab: " + line);
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Document building

struct BuildResult {
  std::vector<UserDocument> documents;  // sorted by user_id
  struct RejectedUser {
    std::string user_id;
    std::string reason;
  };
  std::vector<RejectedUser> rejected_users;
};

// Groups records per user, orders tweets by timestamp (ties by file order),
// concatenates preprocessed tokens and takes ground truth from the earliest
// coordinate-bearing tweet. Users without coordinates or label are rejected
// and reported. Every surviving user must appear in exactly one split set.
inline BuildResult build_documents(
    const std::vector<TweetRecord>& records, const SplitSpec& split,
    const std::unordered_set<std::string>& stopwords = english_stopwords()) {
  split.check_disjoint();

  // std::map keeps output deterministic and sorted by user_id.
  std::map<std::string, std::vector<size_t>> by_user;
  for (size_t i = 0; i < records.size(); ++i) by_user[records[i].user_id].push_back(i);

  BuildResult out;
  for (auto& [user_id, idxs] : by_user) {
    std::stable_sort(idxs.begin(), idxs.end(), [&](size_t a, size_t b) {
      return records[a].epoch_seconds < records[b].epoch_seconds;
    });

    UserDocument doc;
    doc.user_id = user_id;
    const TweetRecord* gt = nullptr;
    const TweetRecord* labeled = nullptr;
    for (size_t i : idxs) {
      const TweetRecord& r = records[i];
      auto toks = preprocess(r.text, stopwords);
      doc.tokens.insert(doc.tokens.end(), std::make_move_iterator(toks.begin()),
                        std::make_move_iterator(toks.end()));
      doc.raw_texts.push_back(r.text);
      doc.hours.push_back(r.hour);
      if (gt == nullptr && r.has_coordinates()) gt = &r;
      if (labeled == nullptr && r.label.has_value()) labeled = &r;
    }
    if (gt == nullptr) {
      out.rejected_users.push_back({user_id, "no coordinate-bearing tweet"});
      continue;
    }
    if (labeled == nullptr) {
      out.rejected_users.push_back({user_id, "no label"});
      continue;
    }
    doc.gt_longitude = *gt->longitude;
    doc.gt_latitude = *gt->latitude;
    doc.gt_label = *labeled->label;

    const auto s = split.find(user_id);
    if (!s) throw manifest_error("user not covered by any split set: " + user_id);
    doc.split = *s;
    out.documents.push_back(std::move(doc));
  }
  return out;
}

// Deterministically partitions user ids into train/validation/test by the
// given fractions (validation and test sizes rounded to nearest).
inline SplitSpec generate_split(std::vector<std::string> user_ids, double validation_frac,
                                double test_frac, uint64_t seed) {
  if (validation_frac < 0 || test_frac < 0 || validation_frac + test_frac >= 1.0) {
    throw input_error("invalid split fractions");
  }
  std::sort(user_ids.begin(), user_ids.end());
  Rng rng(derive_seed(seed, 0x511e5ULL));
  for (size_t i = user_ids.size(); i > 1; --i) {
    std::swap(user_ids[i - 1], user_ids[rng.below(i)]);
  }
  const size_t n = user_ids.size();
  const auto n_val = static_cast<size_t>(validation_frac * static_cast<double>(n) + 0.5);
  const auto n_test = static_cast<size_t>(test_frac * static_cast<double>(n) + 0.5);
  SplitSpec spec;
  for (size_t i = 0; i < n; ++i) {
    if (i < n_val) {
      spec.validation_ids.insert(user_ids[i]);
    } else if (i < n_val + n_test) {
      spec.test_ids.insert(user_ids[i]);
    } else {
      spec.train_ids.insert(user_ids[i]);
    }
  }
  return spec;
}

inline SplitSpec load_split_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open split file: " + path);
  SplitSpec spec;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw manifest_error("split file line " + std::to_string(line_no) + " has no tab");
    }
    const std::string id = line.substr(0, tab);
    const auto s = split_from_name(line.substr(tab + 1));
    if (!s) throw manifest_error("split file line " + std::to_string(line_no) + ": unknown split name");
    switch (*s) {
      case Split::train: spec.train_ids.insert(id); break;
      case Split::validation: spec.validation_ids.insert(id); break;
      case Split::test: spec.test_ids.insert(id); break;
    }
  }
  spec.check_disjoint();
  return spec;
}

inline void save_split_file(const std::string& path, const SplitSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write split file: " + path);
  // Globally sorted by user id for stable diffs.
  std::map<std::string, Split> all;
  for (const auto& id : spec.train_ids) all[id] = Split::train;
  for (const auto& id : spec.validation_ids) all[id] = Split::validation;
  for (const auto& id : spec.test_ids) all[id] = Split::test;
  for (const auto& [id, s] : all) out << id << '\t' << split_name(s) << '\n';
}

// ---------------------------------------------------------------------------
// Document file: newline-delimited, each record "<byte length>\t<JSON>\n".
// The length prefix makes the format binary-safe regardless of content.

inline void save_documents(const std::string& path, const std::vector<UserDocument>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write documents file: " + path);
  for (const UserDocument& d : docs) {
    nlohmann::ordered_json j;
    j["user_id"] = d.user_id;
    j["tokens"] = d.tokens;
    j["raw_texts"] = d.raw_texts;
    j["hours"] = d.hours;
    j["gt_longitude"] = d.gt_longitude;
    j["gt_latitude"] = d.gt_latitude;
    j["gt_label"] = d.gt_label;
    j["split"] = split_name(d.split);
    const std::string payload = j.dump();
    out << payload.size() << '\t' << payload << '\n';
  }
}

inline std::vector<UserDocument> load_documents(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open documents file: " + path);
  std::vector<UserDocument> docs;
  std::string len_str;
  while (std::getline(in, len_str, '\t')) {
    size_t used = 0;
    size_t len = 0;
    try {
      len = std::stoul(len_str, &used);
    } catch (const std::exception&) {
      throw input_error("corrupt documents file (bad length prefix): " + path);
    }
    if (used != len_str.size()) throw input_error("corrupt documents file (bad length prefix): " + path);
    std::string payload(len, '\0');
    if (!in.read(payload.data(), static_cast<std::streamsize>(len))) {
      throw input_error("corrupt documents file (truncated record): " + path);
    }
    char nl = 0;
    if (!in.get(nl) || nl != '\n') throw input_error("corrupt documents file (missing newline): " + path);
    const auto j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded()) throw input_error("corrupt documents file (bad JSON): " + path);
    UserDocument d;
    d.user_id = j.at("user_id").get<std::string>();
    d.tokens = j.at("tokens").get<std::vector<std::string>>();
    d.raw_texts = j.at("raw_texts").get<std::vector<std::string>>();
    d.hours = j.at("hours").get<std::vector<int>>();
    d.gt_longitude = j.at("gt_longitude").get<double>();
    d.gt_latitude = j.at("gt_latitude").get<double>();
    d.gt_label = j.at("gt_label").get<std::string>();
    const auto s = split_from_name(j.at("split").get<std::string>());
    if (!s) throw input_error("corrupt documents file (bad split): " + path);
    d.split = *s;
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace menet
