#include "jargon/ranking.hpp"

#include <algorithm>

namespace jargon {

std::string_view to_string(CorpusSide side) {
  return side == CorpusSide::dark ? "dark" : "clean";
}

std::optional<std::size_t> RankedMapping::rank_of(WordId word) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].word == word) return i + 1;
  }
  return std::nullopt;
}

RankedMapping make_ranking(std::string query, std::vector<ScoredWord> scored, const Vocabulary& vocab) {
  std::sort(scored.begin(), scored.end(),
            [&](const ScoredWord& a, const ScoredWord& b) { return ranks_before(a, b, vocab); });
  RankedMapping out{std::move(query), std::move(scored), std::nullopt};
  if (auto self = vocab.find(out.query)) out.self_rank = out.rank_of(*self);
  return out;
}

}  // namespace jargon
