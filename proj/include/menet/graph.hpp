#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "menet/corpus.hpp"
#include "menet/errors.hpp"

namespace menet {

// Weighted undirected mention graph over the users of interest. Node order
// is the sorted user_id order; adjacency lists are sorted by neighbor index.
struct MentionGraph {
  std::vector<std::string> user_ids;
  std::map<std::string, std::uint32_t> index_of;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<std::string> pruned_celebrities;

  size_t n_nodes() const { return user_ids.size(); }

  std::uint64_t n_edges() const {
    std::uint64_t twice = 0;
    for (const auto& a : adj) twice += a.size();
    return twice / 2;
  }

  bool is_isolated(std::uint32_t v) const { return adj[v].empty(); }

  double edge_weight(std::uint32_t a, std::uint32_t b) const {
    const auto& list = adj[a];
    auto it = std::lower_bound(list.begin(), list.end(), b,
                               [](const auto& e, std::uint32_t x) { return e.first < x; });
    if (it != list.end() && it->first == b) return it->second;
    return 0.0;
  }
};

// All "@handle" occurrences in a text, lowercased. Handle characters are
// letters, digits and underscore.
inline std::vector<std::string> extract_mentions(const std::string& text) {
  std::vector<std::string> out;
  const auto is_handle_char = [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  };
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '@') continue;
    size_t j = i + 1;
    while (j < text.size() && is_handle_char(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i + 1) {
      std::string h = text.substr(i + 1, j - i - 1);
      for (auto& c : h) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(std::move(h));
      i = j - 1;
    }
  }
  return out;
}

// Graph construction:
//  - direct edge between two users of interest, weight = mention count summed
//    over both directions;
//  - for each outside account mentioned by several users of interest, an edge
//    between every mentioning pair, weight += their two mention counts, unless
//    the outside account has more than celebrity_threshold unique mentioners;
//  - afterwards, any user of interest whose unique-neighbor count exceeds
//    celebrity_threshold loses all incident edges (degrees evaluated on the
//    built graph, all celebrities identified before any removal).
inline MentionGraph build_mention_graph(const std::vector<UserDocument>& docs,
                                        std::uint32_t celebrity_threshold = 5) {
  MentionGraph g;
  for (const auto& d : docs) g.user_ids.push_back(d.user_id);
  std::sort(g.user_ids.begin(), g.user_ids.end());
  g.user_ids.erase(std::unique(g.user_ids.begin(), g.user_ids.end()), g.user_ids.end());
  std::map<std::string, std::uint32_t> lower_index;
  for (std::uint32_t i = 0; i < g.user_ids.size(); ++i) {
    g.index_of.emplace(g.user_ids[i], i);
    std::string low = g.user_ids[i];
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    lower_index.emplace(low, i);
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, double> edge;
  std::map<std::string, std::map<std::uint32_t, double>> outside;  // handle -> mentioner -> count
  for (const auto& d : docs) {
    const std::uint32_t u = g.index_of.at(d.user_id);
    for (const auto& text : d.raw_texts) {
      for (const auto& handle : extract_mentions(text)) {
        auto it = lower_index.find(handle);
        if (it != lower_index.end()) {
          const std::uint32_t v = it->second;
          if (v == u) continue;
          edge[{std::min(u, v), std::max(u, v)}] += 1.0;
        } else {
          outside[handle][u] += 1.0;
        }
      }
    }
  }
  for (const auto& [handle, mentioners] : outside) {
    if (mentioners.size() > celebrity_threshold) continue;
    for (auto a = mentioners.begin(); a != mentioners.end(); ++a) {
      auto b = a;
      for (++b; b != mentioners.end(); ++b) {
        edge[{a->first, b->first}] += a->second + b->second;
      }
    }
  }

  std::vector<std::set<std::uint32_t>> neighbors(g.user_ids.size());
  for (const auto& [uv, w] : edge) {
    neighbors[uv.first].insert(uv.second);
    neighbors[uv.second].insert(uv.first);
  }
  std::vector<bool> celebrity(g.user_ids.size(), false);
  for (std::uint32_t i = 0; i < g.user_ids.size(); ++i) {
    if (neighbors[i].size() > celebrity_threshold) {
      celebrity[i] = true;
      g.pruned_celebrities.push_back(g.user_ids[i]);
    }
  }

  g.adj.resize(g.user_ids.size());
  for (const auto& [uv, w] : edge) {
    if (celebrity[uv.first] || celebrity[uv.second]) continue;
    g.adj[uv.first].emplace_back(uv.second, w);
    g.adj[uv.second].emplace_back(uv.first, w);
  }
  for (auto& list : g.adj)
    std::sort(list.begin(), list.end());
  return g;
}

inline void save_edge_list(const std::string& path, const MentionGraph& g) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw input_error("cannot write edge list: " + path);
  for (std::uint32_t a = 0; a < g.adj.size(); ++a) {
    for (const auto& [b, w] : g.adj[a]) {
      if (b < a) continue;  // each undirected edge once
      os << g.user_ids[a] << "\t" << g.user_ids[b] << "\t"
         << static_cast<std::uint64_t>(w) << "\n";
    }
  }
}

}  // namespace menet
