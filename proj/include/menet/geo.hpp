#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include <json.hpp>

namespace menet {

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance in kilometers from latitude/longitude degrees.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = lat1 * deg;
  const double phi2 = lat2 * deg;
  const double dphi = (lat2 - lat1) * deg;
  const double dlam = (lon2 - lon1) * deg;
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  a = std::clamp(a, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(a));
}

struct GeoClassEntry {
  std::string label;
  double centroid_longitude = 0.0;
  double centroid_latitude = 0.0;
  std::uint64_t train_count = 0;
};

// Class ids are assigned in lexicographic label order, so the mapping is a
// pure function of the training labels.
struct GeoClassTable {
  std::vector<GeoClassEntry> classes;
  std::map<std::string, std::uint32_t> class_of_label;

  size_t size() const { return classes.size(); }

  std::uint32_t require_class(const std::string& label) const {
    auto it = class_of_label.find(label);
    if (it == class_of_label.end())
      throw input_error("class label absent from the training set: " + label);
    return it->second;
  }
};

namespace geo_detail {

inline double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace geo_detail

inline GeoClassTable build_class_table(const std::vector<UserDocument>& train_docs) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> coords;
  for (const auto& doc : train_docs) {
    if (doc.gt_label.empty())
      throw input_error("training user lacks a label: " + doc.user_id);
    auto& [lons, lats] = coords[doc.gt_label];
    lons.push_back(doc.gt_longitude);
    lats.push_back(doc.gt_latitude);
  }
  if (coords.empty()) throw input_error("no training users to build a class table from");
  GeoClassTable table;
  for (auto& [label, ll] : coords) {
    GeoClassEntry e;
    e.label = label;
    e.train_count = ll.first.size();
    e.centroid_longitude = geo_detail::median_inplace(ll.first);
    e.centroid_latitude = geo_detail::median_inplace(ll.second);
    table.class_of_label.emplace(label, static_cast<std::uint32_t>(table.classes.size()));
    table.classes.push_back(std::move(e));
  }
  return table;
}

// Every labeled document must use a class known to the table.
inline void require_known_labels(const GeoClassTable& table,
                                 const std::vector<UserDocument>& docs) {
  for (const auto& doc : docs)
    if (!doc.gt_label.empty()) table.require_class(doc.gt_label);
}

inline std::vector<std::uint32_t> label_ids(const GeoClassTable& table,
                                            const std::vector<UserDocument>& docs) {
  std::vector<std::uint32_t> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    if (doc.gt_label.empty()) throw input_error("document has no label: " + doc.user_id);
    out.push_back(table.require_class(doc.gt_label));
  }
  return out;
}

struct EvalReport {
  size_t n = 0;
  double accuracy = 0.0;
  double mean_km = 0.0;
  double median_km = 0.0;
  double at161 = 0.0;  // fraction with error strictly below 161 km
  std::vector<std::vector<std::uint64_t>> confusion;  // [true class][predicted]
};

inline EvalReport evaluate(std::span<const std::uint32_t> predictions,
                           const std::vector<UserDocument>& truth_docs,
                           const GeoClassTable& table) {
  if (predictions.size() != truth_docs.size())
    throw feature_mismatch_error("prediction count does not match document count");
  EvalReport rep;
  rep.n = predictions.size();
  rep.confusion.assign(table.size(), std::vector<std::uint64_t>(table.size(), 0));
  if (rep.n == 0) return rep;
  std::vector<double> errors;
  errors.reserve(rep.n);
  size_t hits = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const auto pred = predictions[i];
    if (pred >= table.size())
      throw input_error("predicted class id out of range: " + std::to_string(pred));
    const auto& doc = truth_docs[i];
    if (doc.gt_label.empty())
      throw input_error("evaluation user lacks ground truth: " + doc.user_id);
    const auto truth = table.require_class(doc.gt_label);
    rep.confusion[truth][pred] += 1;
    if (truth == pred) ++hits;
    const auto& c = table.classes[pred];
    errors.push_back(haversine_km(doc.gt_latitude, doc.gt_longitude,
                                  c.centroid_latitude, c.centroid_longitude));
  }
  rep.accuracy = static_cast<double>(hits) / static_cast<double>(rep.n);
  double total = 0.0;
  size_t close = 0;
  for (double e : errors) {
    total += e;
    if (e < 161.0) ++close;
  }
  rep.mean_km = total / static_cast<double>(rep.n);
  rep.median_km = geo_detail::median_inplace(errors);
  rep.at161 = static_cast<double>(close) / static_cast<double>(rep.n);
  return rep;
}

inline nlohmann::ordered_json report_json(const EvalReport& rep, const GeoClassTable& table) {
  nlohmann::ordered_json j;
  j["n"] = rep.n;
  j["accuracy"] = rep.accuracy;
  j["mean_km"] = rep.mean_km;
  j["median_km"] = rep.median_km;
  j["at161"] = rep.at161;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const auto& c : table.classes) labels.push_back(c.label);
  j["labels"] = labels;
  j["confusion"] = rep.confusion;
  return j;
}

inline std::string report_table(const EvalReport& rep, const GeoClassTable& table) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "users          %zu\n", rep.n);
  out += buf;
  std::snprintf(buf, sizeof(buf), "accuracy       %.4f\n", rep.accuracy);
  out += buf;
  std::snprintf(buf, sizeof(buf), "mean error km  %.2f\n", rep.mean_km);
  out += buf;
  std::snprintf(buf, sizeof(buf), "median error km %.2f\n", rep.median_km);
  out += buf;
  std::snprintf(buf, sizeof(buf), "acc@161        %.4f\n", rep.at161);
  out += buf;
  out += "confusion (rows = truth):\n";
  for (size_t t = 0; t < rep.confusion.size(); ++t) {
    out += "  " + table.classes[t].label + ":";
    for (auto c : rep.confusion[t]) {
      std::snprintf(buf, sizeof(buf), " %llu", static_cast<unsigned long long>(c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace geo_detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace geo_detail

inline void save_class_table_csv(const std::string& path, const GeoClassTable& table) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw input_error("cannot write class table: " + path);
  os << "class,label,centroid_longitude,centroid_latitude,train_count\n";
  for (size_t i = 0; i < table.classes.size(); ++i) {
    const auto& c = table.classes[i];
    os << i << "," << c.label << "," << geo_detail::format_double(c.centroid_longitude)
       << "," << geo_detail::format_double(c.centroid_latitude) << "," << c.train_count
       << "\n";
  }
}

inline GeoClassTable load_class_table_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw input_error("cannot read class table: " + path);
  GeoClassTable table;
  std::string line;
  if (!std::getline(is, line)) throw input_error("empty class table: " + path);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cols.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (cols.size() != 5) throw input_error("malformed class table row: " + line);
    GeoClassEntry e;
    e.label = cols[1];
    e.centroid_longitude = std::stod(cols[2]);
    e.centroid_latitude = std::stod(cols[3]);
    e.train_count = std::stoull(cols[4]);
    const auto id = static_cast<std::uint32_t>(table.classes.size());
    if (std::stoul(cols[0]) != id) throw input_error("class table ids must be dense");
    table.class_of_label.emplace(e.label, id);
    table.classes.push_back(std::move(e));
  }
  return table;
}

}  // namespace menet
