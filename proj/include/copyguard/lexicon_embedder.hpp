#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

// Deterministic text encoder derived from a character KB, standing in for the
// generation model's text encoder in GPU-free runs. A text embeds to the mean
// of its token vectors; each token vector is a hash-seeded gaussian direction
// plus a pull toward the direction of every character whose name or keyword
// lexicon contains that token. Texts about the same character therefore land
// near each other while unrelated texts stay near-orthogonal.
class KbLexiconEmbedder : public Embedder {
 public:
  explicit KbLexiconEmbedder(const CharacterSet& kb, std::size_t dim = 256,
                             std::uint64_t seed = 0x636f7079677561ull)
      : dim_(dim), seed_(seed), kb_checksum_(kb.checksum()) {
    // token -> (character id -> strongest weight for that character).
    std::map<std::string, std::map<std::string, double>> memberships;
    for (const auto& record : kb) {
      for (const auto& token : tokenize(record.name)) {
        double& w = memberships[token][record.id];
        w = std::max(w, kNameWeight);
      }
      for (const auto& keyword : record.keyword_candidates) {
        for (const auto& token : tokenize(keyword)) {
          double& w = memberships[token][record.id];
          w = std::max(w, kKeywordWeight);
        }
      }
    }
    // Tokens shared across many characters carry little identity: scale each
    // pull down by the square root of the number of sharing characters.
    for (const auto& [token, owners] : memberships) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(owners.size()));
      for (const auto& [character_id, weight] : owners) {
        add_pull(token, gaussian_direction("character|" + character_id),
                 weight * scale);
      }
    }
  }

  // The tag carries the KB checksum: vectors derived from different KBs are
  // different encoders and must never share a cache or description index.
  std::string model_tag() const override {
    return "kb-lexicon-v1-d" + std::to_string(dim_) + "-" + to_hex(kb_checksum_);
  }

  EmbeddingVector embed(const std::string& text) override {
    const std::vector<std::string> tokens = tokenize(text);
    std::vector<double> sum(dim_, 0.0);
    std::size_t used = 0;
    for (const auto& token : tokens) {
      if (is_stopword(token)) continue;
      const std::vector<double> vec = token_vector(token);
      for (std::size_t i = 0; i < dim_; ++i) sum[i] += vec[i];
      ++used;
    }
    if (used == 0) {
      // No content tokens: a stable non-zero direction so cosine stays
      // defined.
      sum = gaussian_direction("empty|");
      used = 1;
    }
    for (double& v : sum) v /= static_cast<double>(used);
    return EmbeddingVector(std::move(sum));
  }

  // Function words carry no character identity; sharing them should not make
  // two texts similar.
  static bool is_stopword(const std::string& token) {
    static const std::set<std::string> kStopwords = {
        "a",    "an",   "and",  "any",  "are",  "as",    "at",   "be",
        "but",  "by",   "for",  "from", "has",  "his",   "her",  "in",
        "into", "is",   "it",   "its",  "no",   "nothing", "of", "on",
        "or",   "over", "so",   "that", "the",  "their", "this", "to",
        "under", "up",  "was",  "while", "with", "without"};
    return kStopwords.count(token) > 0;
  }

 private:
  static constexpr double kNameWeight = 2.5;
  static constexpr double kKeywordWeight = 1.1;

  std::vector<double> gaussian_direction(const std::string& key) const {
    std::mt19937_64 rng(fnv1a64(key, seed_));
    std::vector<double> v(dim_);
    // Box-Muller on raw 53-bit uniforms keeps the stream portable.
    for (std::size_t i = 0; i < dim_; i += 2) {
      const double u1 =
          (static_cast<double>(rng() >> 11) + 0.5) / 9007199254740992.0;
      const double u2 =
          (static_cast<double>(rng() >> 11) + 0.5) / 9007199254740992.0;
      const double r = std::sqrt(-2.0 * std::log(u1));
      v[i] = r * std::cos(2.0 * 3.14159265358979323846 * u2);
      if (i + 1 < dim_) v[i + 1] = r * std::sin(2.0 * 3.14159265358979323846 * u2);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
  }

  void add_pull(const std::string& token, const std::vector<double>& direction,
                double weight) {
    auto& pull = pulls_[token];
    if (pull.empty()) pull.assign(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) pull[i] += weight * direction[i];
  }

  std::vector<double> token_vector(const std::string& token) const {
    std::vector<double> v = gaussian_direction("token|" + token);
    auto it = pulls_.find(token);
    if (it != pulls_.end()) {
      for (std::size_t i = 0; i < dim_; ++i) v[i] += it->second[i];
    }
    return v;
  }

  std::size_t dim_;
  std::uint64_t seed_;
  std::uint64_t kb_checksum_;
  std::map<std::string, std::vector<double>> pulls_;
};

}  // namespace copyguard
