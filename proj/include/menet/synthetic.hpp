#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "menet/corpus.hpp"
#include "menet/rng.hpp"
#include "menet/timeparse.hpp"

namespace menet {

// Synthetic four-region corpus where vocabulary, mention partners and posting
// hours each carry regional signal. Each channel is independently corrupted
// for a fraction of users, so no single view suffices but their fusion does.
struct SyntheticConfig {
  size_t users_per_region = 100;
  int tweets_per_user = 12;
  double text_corrupt = 0.12;    // user tweets with another region's vocabulary
  double mention_corrupt = 0.06; // user mentions users of another region
  double hour_corrupt = 0.05;    // user posts at uniformly random hours
  std::uint64_t seed = 1;
};

namespace synthetic_detail {

inline constexpr size_t kRegions = 4;

inline const std::array<std::string, kRegions>& region_labels() {
  static const std::array<std::string, kRegions> labels = {"cascadia", "gulf", "plains",
                                                           "seaboard"};
  return labels;
}

// (latitude, longitude) region centers, far enough apart that only the
// correct class centroid is within 161 km of a user
inline const std::array<std::pair<double, double>, kRegions>& region_centers() {
  static const std::array<std::pair<double, double>, kRegions> centers = {{
      {45.0, -120.0},  // cascadia
      {30.0, -92.0},   // gulf
      {41.0, -95.0},   // plains
      {40.0, -74.0},   // seaboard
  }};
  return centers;
}

inline const std::array<std::vector<std::string>, kRegions>& region_words() {
  static const std::array<std::vector<std::string>, kRegions> words = {{
      {"rain", "ferry", "salmon", "evergreen", "volcano", "espresso", "trailhead",
       "drizzle", "timber", "kayak"},
      {"bayou", "shrimp", "humidity", "hurricane", "gumbo", "pelican", "crawfish",
       "beach", "porch", "magnolia"},
      {"wheat", "tornado", "prairie", "cattle", "harvest", "rodeo", "silo",
       "thunder", "county", "combine"},
      {"subway", "harbor", "brownstone", "bagel", "borough", "transit", "museum",
       "skyline", "pizza", "stoop"},
  }};
  return words;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "today", "tomorrow", "work",   "school", "gaming", "food", "music", "friend",
      "weekend", "morning", "night", "watch",  "love",   "time", "home"};
  return words;
}

inline constexpr std::array<int, kRegions> kBaseHours = {2, 8, 14, 20};

}  // namespace synthetic_detail

inline std::vector<TweetRecord> synthetic_records(const SyntheticConfig& cfg) {
  using namespace synthetic_detail;
  Rng rng(derive_seed(cfg.seed, 21));
  const size_t n_users = cfg.users_per_region * kRegions;

  std::vector<size_t> region_of(n_users);
  std::vector<std::string> ids(n_users);
  for (size_t u = 0; u < n_users; ++u) {
    region_of[u] = u / cfg.users_per_region;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%04zu", u);
    ids[u] = buf;
  }

  std::vector<TweetRecord> records;
  records.reserve(n_users * static_cast<size_t>(cfg.tweets_per_user));
  for (size_t u = 0; u < n_users; ++u) {
    const size_t r = region_of[u];
    const bool bad_text = rng.uniform() < cfg.text_corrupt;
    const bool bad_mentions = rng.uniform() < cfg.mention_corrupt;
    const bool bad_hours = rng.uniform() < cfg.hour_corrupt;
    const size_t text_region = bad_text ? (r + 1 + rng.below(kRegions - 1)) % kRegions : r;
    const size_t mention_region =
        bad_mentions ? (r + 1 + rng.below(kRegions - 1)) % kRegions : r;

    const auto [clat, clon] = region_centers()[r];
    const double lat = clat + rng.uniform(-1.0, 1.0);
    const double lon = clon + rng.uniform(-1.0, 1.0);

    for (int t = 0; t < cfg.tweets_per_user; ++t) {
      std::string text;
      const size_t n_words = 5 + rng.below(5);
      for (size_t w = 0; w < n_words; ++w) {
        if (!text.empty()) text += ' ';
        if (rng.uniform() < 0.55) {
          const auto& list = region_words()[text_region];
          text += list[rng.below(list.size())];
        } else {
          text += filler_words()[rng.below(filler_words().size())];
        }
      }
      if (rng.uniform() < 0.5) {
        size_t partner;
        do {
          partner = mention_region * cfg.users_per_region + rng.below(cfg.users_per_region);
        } while (partner == u);
        text += " @" + ids[partner];
      }
      if (rng.uniform() < 0.05) text += " @megastar";  // high-degree outside account

      const int hour = bad_hours
                           ? static_cast<int>(rng.below(24))
                           : (kBaseHours[r] + static_cast<int>(rng.below(9)) - 4 + 24) % 24;
      char ts[32];
      std::snprintf(ts, sizeof(ts), "2010-03-%02dT%02d:%02d:00Z",
                    1 + static_cast<int>(rng.below(27)), hour,
                    static_cast<int>(rng.below(60)));

      TweetRecord rec;
      rec.user_id = ids[u];
      rec.text = text;
      rec.timestamp_utc = ts;
      const auto parsed = parse_iso8601_utc(rec.timestamp_utc);
      rec.epoch_seconds = parsed->epoch_seconds;
      rec.hour = parsed->hour_utc;
      rec.latitude = lat;
      rec.longitude = lon;
      rec.label = region_labels()[r];
      records.push_back(std::move(rec));
    }
  }
  return records;
}

inline void write_synthetic_jsonl(const std::string& path, const SyntheticConfig& cfg) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw input_error("cannot write synthetic corpus: " + path);
  for (const auto& rec : synthetic_records(cfg)) {
    nlohmann::ordered_json j;
    j["user_id"] = rec.user_id;
    j["text"] = rec.text;
    j["timestamp_utc"] = rec.timestamp_utc;
    j["latitude"] = *rec.latitude;
    j["longitude"] = *rec.longitude;
    j["label"] = *rec.label;
    os << j.dump() << "\n";
  }
}

}  // namespace menet
