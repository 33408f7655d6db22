#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "jargon/embedding.hpp"
#include "jargon/ranking.hpp"

namespace jargon {

/// Words present in both neighbor lists, ascending WordId.
std::vector<WordId> common_neighbors(const NeighborList& dark, const NeighborList& clean);

/**
 * Cross-context usage similarity of a dark and a clean neighborhood:
 *
 *   phi = sum over common x of cos_dark(x, w_d) * cos_clean(x, w_c)
 *         / (|NN_dark| * |NN_clean|)
 *
 * where |NN| is the Euclidean norm of all k similarities of the list. No
 * common neighbor, or a zero norm, scores 0. A zero-vector list throws
 * NotEmbeddable.
 */
double ccla_score(const NeighborList& dark, const NeighborList& clean, const Vocabulary& vocab);

/// Neighbor indexes of a dark and a clean embedding over one vocabulary.
class CclaModel {
 public:
  /// Throws MismatchError when the embeddings use different vocabularies.
  CclaModel(const EmbeddingMatrix& dark, const EmbeddingMatrix& clean, std::size_t k, unsigned threads = 1);

  const NeighborIndex& dark_neighbors() const noexcept { return dark_index_; }
  const NeighborIndex& clean_neighbors() const noexcept { return clean_index_; }
  const Vocabulary& vocab() const noexcept { return *dark_->vocab; }
  std::size_t k() const noexcept { return dark_index_.k(); }

  std::vector<WordId> common_neighbors(WordId w_dark, WordId w_clean) const;
  double score(WordId w_dark, WordId w_clean) const;

  /// Clean candidates: embeddable words with clean frequency >= the floor.
  /// Scores are negated phi, so the best match comes first.
  RankedMapping rank(WordId query, std::uint64_t min_clean_freq = 5) const;
  RankedMapping rank(std::string_view query, std::uint64_t min_clean_freq = 5) const;

 private:
  const EmbeddingMatrix* dark_;
  const EmbeddingMatrix* clean_;
  NeighborIndex dark_index_;
  NeighborIndex clean_index_;
};

/// One-shot convenience over CclaModel. Throws UnknownWord or NotEmbeddable.
RankedMapping rank_by_ccla(std::string_view query, const EmbeddingMatrix& dark, const EmbeddingMatrix& clean,
                           std::size_t k, std::uint64_t min_clean_freq = 5);

}  // namespace jargon
