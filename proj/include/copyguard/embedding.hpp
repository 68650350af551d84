#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/common.hpp"

namespace copyguard {

// Fixed-length real vector produced by a text encoder. Finiteness and a
// positive dimension are checked at construction.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values)
      : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("embedding vector has dim 0");
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw ValidationError("embedding vector has a non-finite value");
      }
    }
  }

  std::size_t dim() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  bool operator==(const EmbeddingVector& other) const {
    return values_ == other.values_;
  }

 private:
  std::vector<double> values_;
};

// Cosine similarity g(u)·g(v) / (‖u‖‖v‖), clamped to [-1, 1] against
// floating-point drift.
inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() == 0 || v.dim() == 0) throw ZeroVector("empty embedding vector");
  if (u.dim() != v.dim()) {
    throw DimMismatch("cosine: dims " + std::to_string(u.dim()) + " vs " +
                      std::to_string(v.dim()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) dot += u[i] * v[i];
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine of an all-zero vector");
  const double value = dot / (nu * nv);
  if (value > 1.0) return 1.0;
  if (value < -1.0) return -1.0;
  return value;
}

// Text encoder handle. All vectors produced by one handle share a dimension,
// and outputs are deterministic for a fixed model tag.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string model_tag() const = 0;
  virtual EmbeddingVector embed(const std::string& text) = 0;
};

// Persistent embedding cache keyed by (model tag, exact text). Wraps another
// embedder; safe for concurrent readers.
class EmbeddingCache : public Embedder {
 public:
  explicit EmbeddingCache(Embedder& inner) : inner_(inner) {}

  std::string model_tag() const override { return inner_.model_tag(); }

  EmbeddingVector embed(const std::string& text) override {
    const std::string tag = inner_.model_tag();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = entries_.find({tag, text});
      if (it != entries_.end()) return it->second;
    }
    EmbeddingVector vec = inner_.embed(text);
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.emplace(std::make_pair(tag, text), vec);
    return vec;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
  }

  // JSONL persistence: one {"model", "text", "values"} object per line.
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open cache file for write: " + path);
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [key, vec] : entries_) {
      nlohmann::ordered_json j;
      j["model"] = key.first;
      j["text"] = key.second;
      j["values"] = vec.values();
      out << j.dump() << '\n';
    }
  }

  void load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;  // a missing cache file just means a cold cache
    std::string line;
    std::size_t line_no = 0;
    std::lock_guard<std::mutex> lock(mutex_);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("cache line " + std::to_string(line_no) + ": " + e.what());
      }
      entries_.emplace(
          std::make_pair(j.at("model").get<std::string>(),
                         j.at("text").get<std::string>()),
          EmbeddingVector(j.at("values").get<std::vector<double>>()));
    }
  }

 private:
  Embedder& inner_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, EmbeddingVector> entries_;
};

}  // namespace copyguard
