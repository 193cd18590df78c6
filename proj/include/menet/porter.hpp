#pragma once

#include <array>
#include <string>
#include <string_view>

namespace menet {
namespace porter_detail {

inline bool is_consonant(std::string_view w, size_t i) {
  const char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
  if (c == 'y') return i == 0 || !is_consonant(w, i - 1);
  return true;
}

// m in the [C](VC)^m[V] decomposition of the stem.
inline int measure(std::string_view stem) {
  int m = 0;
  size_t i = 0;
  const size_t n = stem.size();
  while (i < n && is_consonant(stem, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(stem, i)) ++i;
    if (i >= n) break;
    ++m;
    while (i < n && is_consonant(stem, i)) ++i;
  }
  return m;
}

inline bool has_vowel(std::string_view stem) {
  for (size_t i = 0; i < stem.size(); ++i) {
    if (!is_consonant(stem, i)) return true;
  }
  return false;
}

inline bool ends_double_consonant(std::string_view w) {
  const size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o condition: stem ends cvc where the final consonant is not w, x or y.
inline bool ends_cvc(std::string_view w) {
  const size_t n = w.size();
  if (n < 3) return false;
  if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
  const char c = w[n - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Within one step the longest matching suffix is selected first; only then is
// the measure condition tested. A failed condition ends the step with no
// fallthrough to shorter suffixes.
template <size_t N>
void apply_step(std::string& w, const std::array<Rule, N>& rules, int min_measure) {
  const Rule* best = nullptr;
  for (const Rule& r : rules) {
    if (w.size() >= r.suffix.size() &&
        std::string_view(w).substr(w.size() - r.suffix.size()) == r.suffix) {
      if (best == nullptr || r.suffix.size() > best->suffix.size()) best = &r;
    }
  }
  if (best == nullptr) return;
  const std::string_view stem = std::string_view(w).substr(0, w.size() - best->suffix.size());
  if (measure(stem) > min_measure - 1) {
    w.assign(stem);
    w.append(best->replacement);
  }
}

inline void step1a(std::string& w) {
  auto ends = [&](std::string_view s) {
    return w.size() >= s.size() && std::string_view(w).substr(w.size() - s.size()) == s;
  };
  if (ends("sses")) {
    w.erase(w.size() - 2);
  } else if (ends("ies")) {
    w.erase(w.size() - 2);
  } else if (ends("ss")) {
    // unchanged
  } else if (ends("s")) {
    w.pop_back();
  }
}

inline void step1b(std::string& w) {
  auto ends = [&](std::string_view s) {
    return w.size() >= s.size() && std::string_view(w).substr(w.size() - s.size()) == s;
  };
  if (ends("eed")) {
    if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) w.pop_back();
    return;
  }
  size_t cut = 0;
  if (ends("ing")) {
    cut = 3;
  } else if (ends("ed")) {
    cut = 2;
  } else {
    return;
  }
  const std::string_view stem = std::string_view(w).substr(0, w.size() - cut);
  if (!has_vowel(stem)) return;
  w.erase(w.size() - cut);
  if (ends("at") || ends("bl") || ends("iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w) && w.back() != 'l' && w.back() != 's' && w.back() != 'z') {
    w.pop_back();
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w.push_back('e');
  }
}

inline void step1c(std::string& w) {
  if (!w.empty() && w.back() == 'y' && has_vowel(std::string_view(w).substr(0, w.size() - 1))) {
    w.back() = 'i';
  }
}

inline void step2(std::string& w) {
  static constexpr std::array<Rule, 20> rules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
  }};
  apply_step(w, rules, 1);
}

inline void step3(std::string& w) {
  static constexpr std::array<Rule, 7> rules{{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  apply_step(w, rules, 1);
}

inline void step4(std::string& w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
  };
  std::string_view best;
  for (std::string_view s : suffixes) {
    if (w.size() >= s.size() && std::string_view(w).substr(w.size() - s.size()) == s) {
      if (s.size() > best.size()) best = s;
    }
  }
  if (best.empty()) return;
  const std::string_view stem = std::string_view(w).substr(0, w.size() - best.size());
  if (measure(stem) <= 1) return;
  if (best == "ion" && !(stem.ends_with('s') || stem.ends_with('t'))) return;
  w.erase(w.size() - best.size());
}

inline void step5a(std::string& w) {
  if (w.empty() || w.back() != 'e') return;
  const std::string_view stem = std::string_view(w).substr(0, w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
}

inline void step5b(std::string& w) {
  if (measure(w) > 1 && ends_double_consonant(w) && w.back() == 'l') w.pop_back();
}

}  // namespace porter_detail

// Classic Porter stemmer (1980 algorithm). Expects a lowercase token; words
// of length <= 2 are returned unchanged.
inline std::string porter_stem(std::string word) {
  if (word.size() <= 2) return word;
  porter_detail::step1a(word);
  porter_detail::step1b(word);
  porter_detail::step1c(word);
  porter_detail::step2(word);
  porter_detail::step3(word);
  porter_detail::step4(word);
  porter_detail::step5a(word);
  porter_detail::step5b(word);
  return word;
}

}  // namespace menet
