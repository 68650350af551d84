#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/common.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

struct CorpusManifest {
  std::string corpus_name;
  std::uint64_t checksum = 0;
};

// Inverted index over a document corpus for the phrases requested at ingest
// time. Postings are document-level: strictly sorted, duplicate-free lists of
// document ids. Matching is case-insensitive whole-word; multi-word phrases
// match as contiguous word sequences.
class CorpusIndex {
 public:
  // Key under which a phrase is stored: its tokens joined by single spaces.
  static std::string canonical_phrase(std::string_view phrase) {
    return join(tokenize(phrase), " ");
  }

  static CorpusIndex ingest(const std::vector<std::string>& documents,
                            const std::vector<std::string>& phrases,
                            const std::string& corpus_name = "inline") {
    std::size_t cursor = 0;
    return ingest_stream(
        [&](std::string& out) {
          if (cursor >= documents.size()) return false;
          out = documents[cursor++];
          return true;
        },
        phrases, corpus_name);
  }

  // `next` fills one document and returns false at end of stream.
  static CorpusIndex ingest_stream(
      const std::function<bool(std::string&)>& next,
      const std::vector<std::string>& phrases,
      const std::string& corpus_name = "stream") {
    if (phrases.empty()) throw IngestError("ingest requires a non-empty phrase set");

    CorpusIndex index;
    index.manifest_.corpus_name = corpus_name;

    // Tokenized phrase table grouped by first token for the scan.
    struct PhraseSeq {
      std::string key;
      std::vector<std::string> tokens;
    };
    std::vector<PhraseSeq> seqs;
    std::map<std::string, std::vector<std::size_t>> by_first_token;
    for (const auto& phrase : phrases) {
      PhraseSeq seq{canonical_phrase(phrase), tokenize(phrase)};
      if (seq.tokens.empty()) {
        throw IngestError("phrase '" + phrase + "' has no word tokens");
      }
      if (index.postings_.count(seq.key)) continue;  // duplicate request
      index.postings_[seq.key] = {};
      by_first_token[seq.tokens.front()].push_back(seqs.size());
      seqs.push_back(std::move(seq));
    }

    std::uint64_t checksum = kFnvOffsetBasis;
    std::string doc;
    std::size_t attempted = 0;
    std::uint32_t doc_id = 0;
    while (next(doc)) {
      ++attempted;
      if (!utf8_valid(doc)) {
        ++index.skipped_;
        continue;
      }
      checksum = fnv1a64(doc, checksum);
      const std::vector<std::string> tokens = tokenize(doc);
      std::vector<bool> hit(seqs.size(), false);
      for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        auto it = by_first_token.find(tokens[pos]);
        if (it == by_first_token.end()) continue;
        for (std::size_t seq_idx : it->second) {
          if (hit[seq_idx]) continue;
          const auto& seq = seqs[seq_idx].tokens;
          if (pos + seq.size() > tokens.size()) continue;
          bool match = true;
          for (std::size_t j = 1; j < seq.size(); ++j) {
            if (tokens[pos + j] != seq[j]) {
              match = false;
              break;
            }
          }
          if (match) hit[seq_idx] = true;
        }
      }
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (hit[i]) index.postings_[seqs[i].key].push_back(doc_id);
      }
      ++doc_id;
    }
    index.doc_count_ = doc_id;
    index.manifest_.checksum = checksum;
    if (attempted > 0 && index.doc_count_ == 0) {
      throw IngestError("all " + std::to_string(attempted) +
                        " documents were undecodable");
    }
    return index;
  }

  // Reads a JSONL corpus with a `text` field per line.
  static CorpusIndex ingest_jsonl(const std::string& path,
                                  const std::vector<std::string>& phrases,
                                  const std::string& corpus_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file: " + path);
    std::string line;
    return ingest_stream(
        [&](std::string& out) {
          while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            try {
              const auto j = nlohmann::json::parse(line);
              out = j.at("text").get<std::string>();
              return true;
            } catch (const nlohmann::json::exception&) {
              out.clear();
              out.push_back('\xff');  // undecodable marker, counted as skipped
              return true;
            }
          }
          return false;
        },
        phrases, corpus_name);
  }

  std::size_t doc_count() const { return doc_count_; }
  std::size_t skipped_documents() const { return skipped_; }
  const CorpusManifest& manifest() const { return manifest_; }

  bool has_phrase(std::string_view phrase) const {
    return postings_.count(canonical_phrase(phrase)) > 0;
  }

  const std::vector<std::uint32_t>& postings(std::string_view phrase) const {
    auto it = postings_.find(canonical_phrase(phrase));
    if (it == postings_.end()) {
      throw UnknownTerm("phrase not indexed: '" + std::string(phrase) + "'");
    }
    return it->second;
  }

  // Document frequency.
  std::size_t df(std::string_view phrase) const { return postings(phrase).size(); }

  // |postings(a) ∩ postings(b)|: the number of documents where both phrases
  // occur.
  std::size_t count_cooccurrence(std::string_view a, std::string_view b) const {
    const auto& pa = postings(a);
    const auto& pb = postings(b);
    std::size_t count = 0;
    auto ia = pa.begin();
    auto ib = pb.begin();
    while (ia != pa.end() && ib != pb.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++count;
        ++ia;
        ++ib;
      }
    }
    return count;
  }

  std::vector<std::string> phrases() const {
    std::vector<std::string> out;
    out.reserve(postings_.size());
    for (const auto& [key, _] : postings_) out.push_back(key);
    return out;
  }

  // Binary persistence. Layout (little-endian):
  //   "CGIX" | u32 version | u64 doc_count | u64 skipped | u32 name_len |
  //   name | u64 checksum | u32 n_phrases | per phrase: u32 key_len | key |
  //   u64 n_docs | u32 doc ids...
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open index file for write: " + path);
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u64(out, doc_count_);
    write_u64(out, skipped_);
    write_u32(out, static_cast<std::uint32_t>(manifest_.corpus_name.size()));
    out.write(manifest_.corpus_name.data(),
              static_cast<std::streamsize>(manifest_.corpus_name.size()));
    write_u64(out, manifest_.checksum);
    write_u32(out, static_cast<std::uint32_t>(postings_.size()));
    for (const auto& [key, docs] : postings_) {
      write_u32(out, static_cast<std::uint32_t>(key.size()));
      out.write(key.data(), static_cast<std::streamsize>(key.size()));
      write_u64(out, docs.size());
      for (std::uint32_t id : docs) write_u32(out, id);
    }
    if (!out) throw Error("failed writing index file: " + path);
  }

  static CorpusIndex load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != kMagic) {
      throw ParseError("not a corpus index file (bad magic): " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) {
      throw ParseError("unsupported index version " + std::to_string(version));
    }
    CorpusIndex index;
    index.doc_count_ = read_u64(in);
    index.skipped_ = read_u64(in);
    index.manifest_.corpus_name = read_string(in, read_u32(in));
    index.manifest_.checksum = read_u64(in);
    const std::uint32_t n_phrases = read_u32(in);
    for (std::uint32_t i = 0; i < n_phrases; ++i) {
      std::string key = read_string(in, read_u32(in));
      const std::uint64_t n_docs = read_u64(in);
      std::vector<std::uint32_t> docs;
      docs.reserve(n_docs);
      for (std::uint64_t d = 0; d < n_docs; ++d) docs.push_back(read_u32(in));
      if (!std::is_sorted(docs.begin(), docs.end()) ||
          std::adjacent_find(docs.begin(), docs.end()) != docs.end()) {
        throw ParseError("posting list for '" + key + "' is not strictly sorted");
      }
      for (std::uint32_t id : docs) {
        if (id >= index.doc_count_) {
          throw ParseError("posting for '" + key + "' references doc " +
                           std::to_string(id) + " >= doc_count");
        }
      }
      index.postings_.emplace(std::move(key), std::move(docs));
    }
    if (!in) throw ParseError("truncated index file: " + path);
    return index;
  }

 private:
  static constexpr const char* kMagic = "CGIX";
  static constexpr std::uint32_t kVersion = 1;

  static void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
  }
  static void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
  }
  static std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw ParseError("truncated index file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  static std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw ParseError("truncated index file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  static std::string read_string(std::istream& in, std::uint32_t len) {
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw ParseError("truncated index file");
    return s;
  }

  std::size_t doc_count_ = 0;
  std::size_t skipped_ = 0;
  std::map<std::string, std::vector<std::uint32_t>> postings_;
  CorpusManifest manifest_;
};

inline std::size_t count_cooccurrence(const CorpusIndex& index,
                                      std::string_view a, std::string_view b) {
  return index.count_cooccurrence(a, b);
}

}  // namespace copyguard
