#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "jargon/context_model.hpp"
#include "jargon/corpus.hpp"
#include "jargon/ranking.hpp"
#include "jargon/vocabulary.hpp"

namespace jargon {

/// Symmetric co-occurrence counts within +-window tokens of one document.
/// Throws InvalidArgument when window is 0.
SparseCounts build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab, std::size_t window,
                                unsigned threads = 1);

/// Row-compressed real matrix; same layout as SparseCounts.
struct SparseMatrix {
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<WordId> columns;
  std::vector<double> values;

  std::size_t rows() const noexcept { return offsets.size() - 1; }
  std::size_t nnz() const noexcept { return columns.size(); }
};

/// max(0, ln(p(u,v) / (p(u) p(v)))) with probabilities from the matrix
/// margins. Only positive entries are stored. Throws InvalidArgument when
/// the matrix has no counts.
SparseMatrix ppmi_transform(const SparseCounts& cooc);

struct EmbeddingMatrix {
  std::shared_ptr<const Vocabulary> vocab;
  CorpusSide side = CorpusSide::dark;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::size_t window = 0;
  /// Row-major, vocab->size() rows of `dim` values.
  std::vector<double> data;
  /// Per-word occurrences in the corpus the embedding was built from.
  std::vector<std::uint64_t> frequencies;

  std::size_t rows() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(WordId w) const { return {data.data() + std::size_t{w} * dim, dim}; }
  /// False for all-zero rows (the word never co-occurred with anything).
  bool embeddable(WordId w) const;
};

/// Rank-d truncated SVD, word vector = U_d * Sigma_d^(1/2). Uses a seeded
/// randomized range finder unless d is close to the matrix size, in which
/// case the decomposition is exact. Component signs are fixed so the
/// largest-magnitude entry of each left singular vector is positive.
/// Throws InvalidArgument when d is 0 or exceeds the row count.
std::vector<double> factorize(const SparseMatrix& ppmi, std::size_t d, std::uint64_t seed);

/// Full pipeline for one corpus: co-occurrence, PPMI, factorization.
EmbeddingMatrix build_embedding(const Corpus& corpus, std::shared_ptr<const Vocabulary> vocab, CorpusSide side,
                                std::size_t window, std::size_t d, std::uint64_t seed, unsigned threads = 1);

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
/// Throws InvalidArgument on a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct Neighbor {
  WordId word = 0;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
  WordId query = 0;
  /// Descending similarity, exact ties by ascending word bytes.
  std::vector<Neighbor> entries;
  /// Set when the query has a zero vector; entries is then empty.
  bool zero_vector = false;

  /// Euclidean norm of the similarities.
  double norm() const;
};

/// Top-k by cosine over all other words with nonzero vectors, by exhaustive
/// scan.
NeighborList nearest_neighbors(WordId w, const EmbeddingMatrix& emb, std::size_t k);

/// Precomputed neighbor lists for every word; entries equal
/// nearest_neighbors exactly.
class NeighborIndex {
 public:
  NeighborIndex(const EmbeddingMatrix& emb, std::size_t k, unsigned threads = 1);

  const NeighborList& operator[](WordId w) const { return lists_.at(w); }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return lists_.size(); }

 private:
  std::size_t k_;
  std::vector<NeighborList> lists_;
};

}  // namespace jargon
