#pragma once

#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/ranking.hpp"
#include "jargon/vocabulary.hpp"

namespace jargon {

/// Row-compressed non-negative integer matrix indexed by WordId. Columns
/// within a row are strictly increasing.
struct SparseCounts {
  std::vector<std::size_t> offsets{0};
  std::vector<WordId> columns;
  std::vector<std::uint64_t> values;

  std::size_t rows() const noexcept { return offsets.size() - 1; }
  std::size_t nnz() const noexcept { return columns.size(); }
  std::span<const WordId> row_columns(WordId row) const {
    return {columns.data() + offsets[row], offsets[row + 1] - offsets[row]};
  }
  std::span<const std::uint64_t> row_values(WordId row) const {
    return {values.data() + offsets[row], offsets[row + 1] - offsets[row]};
  }
  /// 0 when the entry is not stored.
  std::uint64_t at(WordId row, WordId column) const;

  bool operator==(const SparseCounts&) const = default;
};

/// Counts every ordered (center, neighbor) pair of in-vocabulary tokens at
/// distance 1..window inside one document. Out-of-vocabulary tokens keep
/// their positions but are never counted. The result has vocab.size() rows.
SparseCounts scan_windows(const Corpus& corpus, const Vocabulary& vocab, std::size_t window, unsigned threads = 1);

struct ContextCounts {
  std::shared_ptr<const Vocabulary> vocab;
  std::size_t window = 0;
  SparseCounts counts;
  /// Row sums of `counts`.
  std::vector<std::uint64_t> totals;
  /// In-vocabulary occurrences of each word in the corpus.
  std::vector<std::uint64_t> occurrences;
};

/// Throws InvalidArgument when window is 0.
ContextCounts build_context_counts(const Corpus& corpus, std::shared_ptr<const Vocabulary> vocab, std::size_t window,
                                   unsigned threads = 1);

struct Smoothing {
  enum class Kind : std::uint8_t { laplace = 0, dirichlet = 1 };
  Kind kind = Kind::laplace;
  /// alpha for laplace, mu for dirichlet.
  double param = 1.0;

  static Smoothing laplace(double alpha) { return {Kind::laplace, alpha}; }
  static Smoothing dirichlet(double mu) { return {Kind::dirichlet, mu}; }
  /// Throws InvalidArgument for a non-positive or non-finite parameter.
  void validate() const;

  bool operator==(const Smoothing&) const = default;
};

std::string_view to_string(Smoothing::Kind kind);
Smoothing::Kind parse_smoothing_kind(std::string_view name);

/**
 * Smoothed context distributions of every vocabulary word for one corpus.
 * Both smoothing families share one form:
 *
 *   P(v|w) = (c(v,w) + m * bg(v)) / (total(w) + m)
 *
 * laplace: m = alpha * |V|, bg uniform; dirichlet: m = mu, bg the
 * add-one smoothed collection model of all context counts. Only the counts
 * are stored; probabilities are evaluated on demand.
 */
class ContextDistribution {
 public:
  ContextDistribution(std::shared_ptr<const ContextCounts> counts, Smoothing smoothing, CorpusSide side);

  const ContextCounts& counts() const noexcept { return *counts_; }
  std::shared_ptr<const ContextCounts> counts_ptr() const noexcept { return counts_; }
  const Vocabulary& vocab() const noexcept { return *counts_->vocab; }
  const Smoothing& smoothing() const noexcept { return smoothing_; }
  CorpusSide side() const noexcept { return side_; }
  std::size_t size() const noexcept { return background_.size(); }

  double mass() const noexcept { return mass_; }
  std::span<const double> background() const noexcept { return background_; }
  bool uniform_background() const noexcept { return smoothing_.kind == Smoothing::Kind::laplace; }

  double probability(WordId w, WordId v) const;
  std::vector<double> dense(WordId w) const;

 private:
  std::shared_ptr<const ContextCounts> counts_;
  Smoothing smoothing_;
  CorpusSide side_;
  double mass_ = 0.0;
  std::vector<double> background_;
};

ContextDistribution smooth(std::shared_ptr<const ContextCounts> counts, Smoothing smoothing,
                           CorpusSide side = CorpusSide::dark);

/// Dense KL(p || q) in nats. Throws InvalidArgument on a length mismatch or
/// a non-positive entry.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// KL(P(.|p_word, p_model) || P(.|q_word, q_model)), summing only over the
/// union of the two sparse supports plus closed-form background terms.
/// Both models must share a vocabulary (MismatchError otherwise).
double kl_divergence(const ContextDistribution& p_model, WordId p_word, const ContextDistribution& q_model,
                     WordId q_word);

/// Scores dark queries against every admitted clean candidate. Clean-side
/// quantities are precomputed once, so one query costs a single pass over
/// the clean counts. Read-only after construction; safe to share.
class KlRanker {
 public:
  /// Throws MismatchError when the models differ in vocabulary or smoothing
  /// family.
  KlRanker(const ContextDistribution& dark, const ContextDistribution& clean, std::uint64_t min_clean_freq = 5,
           double log_base = std::numbers::e);

  /// Candidates in WordId order with their scores, unsorted.
  std::vector<ScoredWord> score(WordId query) const;
  RankedMapping rank(WordId query) const;
  RankedMapping rank(std::string_view query) const;
  /// Same value as rank(query).self_rank without sorting.
  std::optional<std::size_t> self_rank(WordId query) const;

  const std::vector<WordId>& candidates() const noexcept { return candidates_; }
  const Vocabulary& vocab() const noexcept { return dark_->vocab(); }

 private:
  const ContextDistribution* dark_;
  const ContextDistribution* clean_;
  std::vector<WordId> candidates_;
  std::vector<double> log_norm_;        // per candidate: ln m - ln(T + m)
  std::vector<std::size_t> offsets_;    // per candidate into columns_/delta_
  std::vector<WordId> columns_;
  std::vector<double> delta_;           // ln(1 + c / (m * bg))
  std::vector<double> log_background_;
  double scale_ = 1.0;
};

/// Throws UnknownWord when the query is not in the vocabulary.
RankedMapping rank_by_kl(std::string_view query, const ContextDistribution& dark, const ContextDistribution& clean,
                         std::uint64_t min_clean_freq = 5, double log_base = std::numbers::e);

struct DetectedWord {
  WordId word = 0;
  std::optional<std::size_t> self_rank;

  bool operator==(const DetectedWord&) const = default;
};

/**
 * Dark-side words (dark occurrences >= min_freq) whose own surface form is
 * missing from their clean candidate list or ranks below self_rank_threshold.
 * Missing self ranks come first, then descending self_rank, then ascending
 * word bytes; the list is cut at max_results.
 */
std::vector<DetectedWord> detect_candidates(const ContextDistribution& dark, const ContextDistribution& clean,
                                            std::size_t self_rank_threshold, std::size_t max_results,
                                            std::uint64_t min_freq = 5, unsigned threads = 1);

}  // namespace jargon
