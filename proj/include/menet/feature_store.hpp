#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "menet/errors.hpp"

namespace menet {

// One named view's feature rows. Either dense row-major doubles or per-row
// sparse (index, value) pairs with indices strictly increasing.
struct FeatureMatrix {
  std::string view;
  std::uint64_t n_rows = 0;
  std::uint64_t n_cols = 0;
  bool sparse = false;
  std::vector<double> dense;                                    // n_rows * n_cols
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;  // sparse only

  static FeatureMatrix make_dense(std::string view, std::uint64_t n_rows,
                                  std::uint64_t n_cols) {
    FeatureMatrix m;
    m.view = std::move(view);
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.dense.assign(static_cast<size_t>(n_rows * n_cols), 0.0);
    return m;
  }

  static FeatureMatrix make_sparse(std::string view, std::uint64_t n_rows,
                                   std::uint64_t n_cols) {
    FeatureMatrix m;
    m.view = std::move(view);
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.sparse = true;
    m.rows.resize(static_cast<size_t>(n_rows));
    return m;
  }

  double* dense_row(std::uint64_t i) { return dense.data() + i * n_cols; }
  const double* dense_row(std::uint64_t i) const { return dense.data() + i * n_cols; }

  // Row i as a dense vector regardless of storage.
  std::vector<double> row_as_dense(std::uint64_t i) const {
    std::vector<double> out(static_cast<size_t>(n_cols), 0.0);
    if (sparse) {
      for (const auto& [idx, val] : rows[static_cast<size_t>(i)]) out[idx] = val;
    } else {
      const double* p = dense_row(i);
      out.assign(p, p + n_cols);
    }
    return out;
  }
};

namespace store_detail {

inline void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  put_bytes(os, &v, sizeof(v));
}

inline void get_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw input_error("feature file truncated");
}

template <class T>
T get(std::istream& is) {
  T v;
  get_bytes(is, &v, sizeof(v));
  return v;
}

}  // namespace store_detail

inline constexpr char kFeatureMagic[8] = {'M', 'E', 'N', 'E', 'T', 'F', 'T', 'R'};

inline void save_features(const std::string& path, const FeatureMatrix& m) {
  using namespace store_detail;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw input_error("cannot write feature file: " + path);
  put_bytes(os, kFeatureMagic, sizeof(kFeatureMagic));
  put<std::uint8_t>(os, 1);  // format version
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.view.size()));
  put_bytes(os, m.view.data(), m.view.size());
  put<std::uint64_t>(os, m.n_rows);
  put<std::uint64_t>(os, m.n_cols);
  put<std::uint8_t>(os, 0);  // dtype: f64
  put<std::uint8_t>(os, m.sparse ? 1 : 0);
  if (m.sparse) {
    for (const auto& row : m.rows) {
      put<std::uint32_t>(os, static_cast<std::uint32_t>(row.size()));
      for (const auto& [idx, val] : row) put<std::uint32_t>(os, idx);
      for (const auto& [idx, val] : row) put<double>(os, val);
    }
  } else {
    put_bytes(os, m.dense.data(), m.dense.size() * sizeof(double));
  }
  if (!os) throw input_error("short write on feature file: " + path);
}

inline FeatureMatrix load_features(const std::string& path) {
  using namespace store_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("cannot read feature file: " + path);
  char magic[8];
  get_bytes(is, magic, sizeof(magic));
  if (std::memcmp(magic, kFeatureMagic, sizeof(magic)) != 0)
    throw input_error("not a feature file: " + path);
  const auto version = get<std::uint8_t>(is);
  if (version != 1) throw input_error("unsupported feature file version");
  const auto name_len = get<std::uint32_t>(is);
  if (name_len > 4096) throw input_error("implausible view name length");
  FeatureMatrix m;
  m.view.resize(name_len);
  get_bytes(is, m.view.data(), name_len);
  m.n_rows = get<std::uint64_t>(is);
  m.n_cols = get<std::uint64_t>(is);
  const auto dtype = get<std::uint8_t>(is);
  if (dtype != 0) throw input_error("unsupported feature dtype");
  const auto flag = get<std::uint8_t>(is);
  m.sparse = flag == 1;
  if (m.sparse) {
    m.rows.resize(static_cast<size_t>(m.n_rows));
    for (auto& row : m.rows) {
      const auto count = get<std::uint32_t>(is);
      if (count > m.n_cols) throw input_error("sparse row longer than column count");
      std::vector<std::uint32_t> idx(count);
      for (auto& v : idx) v = get<std::uint32_t>(is);
      row.resize(count);
      for (std::uint32_t k = 0; k < count; ++k) {
        if (idx[k] >= m.n_cols) throw input_error("sparse index out of range");
        row[k].first = idx[k];
        row[k].second = get<double>(is);
      }
    }
  } else {
    m.dense.resize(static_cast<size_t>(m.n_rows * m.n_cols));
    get_bytes(is, m.dense.data(), m.dense.size() * sizeof(double));
  }
  return m;
}

}  // namespace menet
