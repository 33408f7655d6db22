#include "jargon/ccla.hpp"

#include <algorithm>
#include <cmath>

#include "jargon/error.hpp"

namespace jargon {

std::vector<WordId> common_neighbors(const NeighborList& dark, const NeighborList& clean) {
  std::vector<WordId> a;
  std::vector<WordId> b;
  for (const auto& e : dark.entries) a.push_back(e.word);
  for (const auto& e : clean.entries) b.push_back(e.word);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<WordId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

double ccla_score(const NeighborList& dark, const NeighborList& clean, const Vocabulary& vocab) {
  if (dark.zero_vector) throw NotEmbeddable(vocab.word(dark.query));
  if (clean.zero_vector) throw NotEmbeddable(vocab.word(clean.query));
  const double denom = dark.norm() * clean.norm();
  if (denom == 0.0) return 0.0;
  double numerator = 0.0;
  for (const auto& d : dark.entries) {
    for (const auto& c : clean.entries) {
      if (c.word == d.word) {
        numerator += d.similarity * c.similarity;
        break;
      }
    }
  }
  return numerator / denom;
}

CclaModel::CclaModel(const EmbeddingMatrix& dark, const EmbeddingMatrix& clean, std::size_t k, unsigned threads)
    : dark_(&dark), clean_(&clean), dark_index_(dark, k, threads), clean_index_(clean, k, threads) {
  if (!dark.vocab || !clean.vocab || dark.vocab->fingerprint() != clean.vocab->fingerprint() ||
      dark.rows() != clean.rows()) {
    throw MismatchError("dark and clean embeddings were built over different vocabularies");
  }
  if (k == 0) throw InvalidArgument("neighborhood size must be >= 1");
}

std::vector<WordId> CclaModel::common_neighbors(WordId w_dark, WordId w_clean) const {
  return jargon::common_neighbors(dark_index_[w_dark], clean_index_[w_clean]);
}

double CclaModel::score(WordId w_dark, WordId w_clean) const {
  return ccla_score(dark_index_[w_dark], clean_index_[w_clean], vocab());
}

RankedMapping CclaModel::rank(WordId query, std::uint64_t min_clean_freq) const {
  const NeighborList& nd = dark_index_[query];
  if (nd.zero_vector) throw NotEmbeddable(vocab().word(query));
  const double norm_d = nd.norm();

  // Similarity of each dark neighbor to the query, keyed by word.
  std::vector<double> dark_sim(vocab().size(), 0.0);
  std::vector<char> in_dark(vocab().size(), 0);
  for (const auto& e : nd.entries) {
    dark_sim[e.word] = e.similarity;
    in_dark[e.word] = 1;
  }

  std::vector<ScoredWord> scored;
  for (WordId c = 0; c < clean_index_.size(); ++c) {
    const NeighborList& nc = clean_index_[c];
    if (nc.zero_vector || clean_->frequencies[c] < min_clean_freq || clean_->frequencies[c] == 0) continue;
    const double denom = norm_d * nc.norm();
    double numerator = 0.0;
    for (const auto& e : nc.entries) {
      if (in_dark[e.word]) numerator += dark_sim[e.word] * e.similarity;
    }
    const double phi = denom == 0.0 ? 0.0 : numerator / denom;
    scored.push_back({c, -phi});
  }
  return make_ranking(vocab().word(query), std::move(scored), vocab());
}

RankedMapping CclaModel::rank(std::string_view query, std::uint64_t min_clean_freq) const {
  return rank(vocab().id(query), min_clean_freq);
}

RankedMapping rank_by_ccla(std::string_view query, const EmbeddingMatrix& dark, const EmbeddingMatrix& clean,
                           std::size_t k, std::uint64_t min_clean_freq) {
  const WordId id = dark.vocab->id(query);
  if (!dark.embeddable(id)) throw NotEmbeddable(std::string(query));
  return CclaModel(dark, clean, k).rank(id, min_clean_freq);
}

}  // namespace jargon
