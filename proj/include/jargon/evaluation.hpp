#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jargon/context_model.hpp"
#include "jargon/corpus.hpp"
#include "jargon/ranking.hpp"
#include "jargon/vocabulary.hpp"

namespace jargon {

enum class Method : std::uint8_t { kl, ccla };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Seed of one simulation stage ("split", "inject") from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

/// Documents go to the first split through a seeded shuffle; the first
/// split gets round(fraction * n) documents. Both splits keep the input
/// order. Throws InvalidArgument when fraction is outside (0, 1) or either
/// split would be empty.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed);

struct Injection {
  Corpus corpus;
  /// Selected words, ascending byte order, without the marker.
  std::vector<std::string> selected;
};

/// Picks n words with freq >= min_freq (undashed only) by seeded sampling
/// without replacement and rewrites each of their occurrences in `corpus`
/// to the dashed form. Throws InvalidArgument when fewer than n words are
/// eligible.
Injection inject_dark_words(const Corpus& corpus, const FrequencyTable& freq, std::size_t n, std::uint64_t min_freq,
                            std::uint64_t seed);

/// Removes leading dash markers from every token so that only injected
/// tokens carry one; tokens left empty are dropped.
Corpus strip_dash_markers(const Corpus& corpus);

/// 1 / rank of target, 0 when target is not a candidate.
double reciprocal_rank(const RankedMapping& ranked, WordId target);
/// Throws InvalidArgument on an empty list.
double mean_reciprocal_rank(std::span<const double> reciprocal_ranks);

struct SimulationConfig {
  std::uint64_t seed = 1;
  std::size_t n_dark_words = 500;
  std::uint64_t min_word_freq = 5;
  double split_fraction = 0.5;
  std::vector<Method> methods{Method::kl, Method::ccla};

  std::size_t vocab_size = 10000;
  std::size_t window = 10;
  Smoothing smoothing = Smoothing::laplace(1.0);
  std::size_t embedding_dim = 300;
  std::size_t embedding_window = 10;
  std::uint64_t embedding_seed = 1;
  std::size_t neighborhood = 100;
  std::uint64_t min_clean_freq = 5;
  /// Candidates echoed per query record.
  std::size_t top_candidates = 5;
  /// Test-only: both sides are the whole corpus instead of a random split.
  bool mirror = false;
  unsigned threads = 1;

  /// Throws InvalidArgument naming the first bad field.
  void validate() const;
};

struct QueryRecord {
  std::string query;
  std::string target;
  bool dashed = false;
  std::optional<std::size_t> rank;
  double reciprocal_rank = 0.0;
  std::vector<std::pair<std::string, double>> top;
};

struct MethodResult {
  Method method = Method::kl;
  double mrr_all = 0.0;
  std::optional<double> mrr_dark;
  std::size_t candidate_count = 0;
  /// Expected MRR of a uniformly random ordering of the candidates.
  double random_mrr = 0.0;
  /// Sorted by query bytes.
  std::vector<QueryRecord> records;
};

struct SimulationReport {
  SimulationConfig config;
  std::string source;
  std::size_t dark_documents = 0;
  std::size_t clean_documents = 0;
  std::size_t vocab_size = 0;
  std::vector<std::string> selected;
  std::vector<MethodResult> methods;

  const MethodResult* find(Method method) const;
};

/// Clean-clean simulation: split, inject, build the joint vocabulary with
/// every selected word forced in both forms, build each method's models on
/// (split 1, split 2), and score every pseudo-dark word that passes
/// min_word_freq. Errors are prefixed with the failing stage.
SimulationReport run_clean_clean(const SimulationConfig& config, const Corpus& clean_corpus);

/// Pretty-printed JSON; identical reports give identical bytes.
std::string report_to_json(const SimulationReport& report);
/// "method<TAB>mrr_all<TAB>mrr_dark" plus one row per method.
std::string report_to_tsv(const SimulationReport& report);

struct MappingRow {
  std::string dark_word;
  std::vector<std::pair<std::string, double>> clean;
  std::optional<std::size_t> self_rank;
};

struct MappingReport {
  std::size_t top_m = 3;
  std::vector<MappingRow> rows;
};

struct DetectConfig {
  std::size_t self_rank_threshold = 10;
  std::size_t max_results = 100;
  std::size_t top_m = 3;
  std::uint64_t min_freq = 5;
  unsigned threads = 1;
};

/// Mapping rows for detect_candidates order, from prebuilt models.
MappingReport make_mapping_report(const ContextDistribution& dark, const ContextDistribution& clean,
                                  const DetectConfig& config);

struct DarkCleanConfig {
  std::size_t vocab_size = 10000;
  std::size_t window = 10;
  Smoothing smoothing = Smoothing::laplace(1.0);
  DetectConfig detect;
};

/// Builds KL models over both corpora and reports the detected words.
MappingReport run_dark_clean(const Corpus& dark, const Corpus& clean, const DarkCleanConfig& config);

/// Header "dark_word, clean_word_1..m, score_1..m, self_rank", tab
/// separated; an absent self rank prints as NA.
std::string mapping_to_tsv(const MappingReport& report);

}  // namespace jargon
