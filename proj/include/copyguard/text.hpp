#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/common.hpp"

namespace copyguard {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  }
  return true;
}

// Case-insensitive lexicographic order; falls back to byte order when the
// folded strings compare equal so that sorting is total.
inline bool ci_less(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char la = ascii_lower(a[i]);
    const char lb = ascii_lower(b[i]);
    if (la != lb) return la < lb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// A word character is an ASCII alphanumeric or any non-ASCII byte (so UTF-8
// sequences stay inside tokens); everything else separates words.
inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

// Lowercased word tokens with punctuation stripped.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : s) {
    if (is_word_byte(c)) {
      current.push_back(ascii_lower(static_cast<char>(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Case-insensitive substring test on the raw strings.
inline bool contains_ci(std::string_view text, std::string_view needle) {
  if (needle.empty()) return false;
  if (needle.size() > text.size()) return false;
  const std::string t = to_lower(text);
  const std::string n = to_lower(needle);
  return t.find(n) != std::string::npos;
}

inline bool tokens_contain_sequence(const std::vector<std::string>& tokens,
                                    const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

// Whole-word phrase match: the phrase's tokens must appear as a contiguous
// word sequence in the text.
inline bool contains_phrase(std::string_view text, std::string_view phrase) {
  return tokens_contain_sequence(tokenize(text), tokenize(phrase));
}

// Comma-split with trimming; empty fields are dropped.
inline std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = (comma == std::string_view::npos) ? s.size() : comma;
    std::string field = trim(s.substr(start, end - start));
    if (!field.empty()) out.push_back(std::move(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& items,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(items[i]);
  }
  return out;
}

// Case-insensitive first-occurrence-wins deduplication.
inline std::vector<std::string> dedup_ci(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  std::vector<std::string> seen;
  for (const auto& item : items) {
    const std::string key = to_lower(item);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      out.push_back(item);
    }
  }
  return out;
}

// Removes every case-insensitive occurrence of `needle` and tidies the
// whitespace left behind.
inline std::string erase_ci(std::string_view text, std::string_view needle) {
  if (needle.empty()) return std::string(text);
  const std::string lower_text = to_lower(text);
  const std::string lower_needle = to_lower(needle);
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t hit = lower_text.find(lower_needle, pos);
    if (hit == std::string::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, hit - pos));
    pos = hit + needle.size();
  }
  // Collapse runs of whitespace introduced by the removals.
  std::string collapsed;
  bool in_space = false;
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed.push_back(' ');
    in_space = false;
    collapsed.push_back(c);
  }
  return collapsed;
}

inline bool utf8_valid(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
    } else {
      return false;
    }
    for (std::size_t j = 1; j <= extra; ++j) {
      if (i + j >= s.size()) return false;
      if ((static_cast<unsigned char>(s[i + j]) & 0xc0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace copyguard
