#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jargon/vocabulary.hpp"

namespace jargon {

enum class CorpusSide : std::uint8_t { dark = 0, clean = 1 };

std::string_view to_string(CorpusSide side);

struct ScoredWord {
  WordId word = 0;
  double score = 0.0;

  bool operator==(const ScoredWord&) const = default;
};

/**
 * Clean-side candidates for one dark query word, best first: ascending
 * score, exact ties broken by ascending word bytes. Similarity-based
 * methods store negated similarities so "lower is better" holds for every
 * method.
 */
struct RankedMapping {
  std::string query;
  std::vector<ScoredWord> candidates;
  /// 1-based position of the query's own surface form, if it is a candidate.
  std::optional<std::size_t> self_rank;

  /// 1-based position of `word`, if present.
  std::optional<std::size_t> rank_of(WordId word) const;
};

/// Sorts `scored` into ranking order and fills self_rank from the query
/// string.
RankedMapping make_ranking(std::string query, std::vector<ScoredWord> scored, const Vocabulary& vocab);

/// The ranking order used everywhere: lower score first, then word bytes.
inline bool ranks_before(const ScoredWord& a, const ScoredWord& b, const Vocabulary& vocab) {
  if (a.score != b.score) return a.score < b.score;
  return vocab.lexical_rank(a.word) < vocab.lexical_rank(b.word);
}

}  // namespace jargon
