#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/embedding.hpp"

namespace jargon::test {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(JARGON_TEST_DATA); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "jargon") {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
      path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(attempt));
      if (fs::create_directory(path_)) return;
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Already-tokenized documents, as if preprocessed with stemmer none.
inline Corpus make_corpus(const std::vector<std::vector<std::string>>& docs, std::string source = "test") {
  Corpus c;
  for (std::size_t i = 0; i < docs.size(); ++i) c.docs.push_back({"d" + std::to_string(i), docs[i]});
  c.provenance.source = std::move(source);
  return c;
}

/// Up to max_docs documents of up to max_len tokens over w0..w{vocab-1}.
inline Corpus random_corpus(std::mt19937_64& rng, std::size_t max_docs, std::size_t max_len, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> ndocs(1, max_docs), len(0, max_len), word(0, vocab - 1);
  std::vector<std::vector<std::string>> docs(ndocs(rng));
  for (auto& d : docs) {
    d.resize(len(rng));
    for (auto& t : d) t = "w" + std::to_string(word(rng));
  }
  return make_corpus(docs);
}

/// One document per non-blank line of every file in `dir`, files in name
/// order, ids "file:line" with 0-based line numbers.
inline std::vector<RawDocument> line_documents(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::string line;
    for (std::size_t n = 0; std::getline(in, line); ++n) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      out.push_back({f.filename().string() + ":" + std::to_string(n), line});
    }
  }
  return out;
}

/// Vocabulary of words w0..w{n-1}, all with frequency 1.
inline std::shared_ptr<const Vocabulary> numbered_vocab(std::size_t n) {
  FrequencyTable f;
  for (std::size_t i = 0; i < n; ++i) f.counts["w" + std::to_string(i)] = 1;
  return std::make_shared<const Vocabulary>(build_vocab(f, n));
}

/// Embedding whose row for "w<i>" is rows[i].
inline EmbeddingMatrix embedding_from_rows(std::shared_ptr<const Vocabulary> vocab,
                                           const std::vector<std::vector<double>>& rows) {
  EmbeddingMatrix e;
  e.vocab = std::move(vocab);
  e.dim = rows.front().size();
  e.data.assign(rows.size() * e.dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const WordId id = e.vocab->id("w" + std::to_string(i));
    std::copy(rows[i].begin(), rows[i].end(), e.data.begin() + static_cast<std::ptrdiff_t>(id * e.dim));
  }
  e.frequencies.assign(rows.size(), 10);
  return e;
}

/// Raw documents as jsonl text.
std::string to_jsonl(const std::vector<RawDocument>& docs);

}  // namespace jargon::test
