#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jargon/corpus.hpp"

namespace jargon {

using WordId = std::uint32_t;

/// Exact occurrence counts over one or more corpora.
struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& word) const;
  bool operator==(const FrequencyTable&) const = default;
};

/// Sums token counts across every document of every corpus. All corpora
/// must carry the same pipeline fingerprint (MismatchError otherwise).
FrequencyTable count_frequencies(std::span<const Corpus* const> corpora);
FrequencyTable count_frequencies(const Corpus& corpus);

/**
 * Joint vocabulary: the N most frequent words (ties by ascending byte
 * order) followed by forced words that missed the cut, in the same order.
 */
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Reconstructs a vocabulary from its entries (used by the loader).
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> frequencies, std::size_t n,
             std::set<std::string> forced);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t configured_size() const noexcept { return n_; }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t frequency(WordId id) const { return frequencies_.at(id); }
  const std::set<std::string>& forced() const noexcept { return forced_; }
  /// Position of the word in ascending byte order, for cheap tie-breaks.
  std::uint32_t lexical_rank(WordId id) const { return lexical_rank_[id]; }

  std::optional<WordId> find(std::string_view word) const;
  /// Throws UnknownWord.
  WordId id(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  /// Hash of the ordered word list; artifacts built over this vocabulary
  /// carry it so they cannot be paired with a different one.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && frequencies_ == other.frequencies_ && n_ == other.n_ &&
           forced_ == other.forced_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, WordId> index_;
  std::set<std::string> forced_;
  std::vector<std::uint32_t> lexical_rank_;
  std::size_t n_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Throws InvalidArgument when n is 0.
Vocabulary build_vocab(const FrequencyTable& freq, std::size_t n, const std::set<std::string>& forced = {});

/// Text format: a header line, then "word<TAB>frequency" per entry in rank
/// order; forced entries carry a third "forced" column.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path,
                     std::uint64_t build_fingerprint = 0);
Vocabulary load_vocabulary(const std::filesystem::path& path, std::uint64_t* build_fingerprint = nullptr);

}  // namespace jargon
