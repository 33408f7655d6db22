#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jargon {

/// Prefix reserved for simulated dark words ("_strawberry").
inline constexpr char kDashMarker = '_';

struct RawDocument {
  std::string id;
  std::string text;
};

enum class CorpusFormat { plain_dir, jsonl };

enum class StemmerKind { none, english_snowball };

/**
 * Token normalization settings. Steps run in a fixed order: whitespace
 * split, lowercase, boundary punctuation strip, stopword removal (on
 * lowercased, unstemmed tokens), stemming, minimum length.
 */
struct PipelineConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::set<std::string> stopwords;
  StemmerKind stemmer = StemmerKind::english_snowball;
  std::size_t min_token_length = 1;

  /// Defaults with the built-in stopword list.
  static PipelineConfig defaults();

  /// Throws InvalidArgument when min_token_length is 0.
  void validate() const;

  /// Stable hash over every field; identical configs hash identically.
  std::uint64_t fingerprint() const;

  bool operator==(const PipelineConfig&) const = default;
};

struct Document {
  std::string id;
  std::vector<std::string> tokens;

  bool operator==(const Document&) const = default;
};

struct Provenance {
  std::string source;
  std::uint64_t pipeline_fingerprint = 0;

  bool operator==(const Provenance&) const = default;
};

struct Corpus {
  std::vector<Document> docs;
  Provenance provenance;

  std::size_t token_count() const noexcept;

  bool operator==(const Corpus&) const = default;
};

/// Reads raw documents. jsonl: one {"id": ..., "text": ...} object per line
/// in file order; plain_dir: every regular file under `path`, ordered by
/// relative path, id = relative path with '/' separators.
std::vector<RawDocument> load_corpus(const std::filesystem::path& path, CorpusFormat format);

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// Stable hash of ids and texts, used to detect corpus changes.
std::uint64_t content_fingerprint(std::span<const RawDocument> docs);

/// Maximal runs of non-whitespace (Unicode White_Space) code points.
std::vector<std::string> tokenize(std::string_view text);

Document preprocess(const RawDocument& doc, const PipelineConfig& cfg);

/// Preprocesses every document; output order equals input order for any
/// worker count (0 = hardware concurrency).
Corpus preprocess_corpus(std::span<const RawDocument> docs, const PipelineConfig& cfg,
                         std::string source, unsigned threads = 1);

/// True for tokens carrying the reserved dash marker.
bool is_dashed(std::string_view token) noexcept;

std::string_view to_string(StemmerKind kind);
StemmerKind parse_stemmer_kind(std::string_view name);

}  // namespace jargon
