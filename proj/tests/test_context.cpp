#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "jargon/context_model.hpp"
#include "jargon/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jargon;

namespace {

std::shared_ptr<const Vocabulary> vocab_of(const std::vector<const Corpus*>& corpora, std::size_t n) {
  return std::make_shared<const Vocabulary>(build_vocab(count_frequencies(corpora), n));
}

std::shared_ptr<const ContextCounts> counts_of(const Corpus& c, std::shared_ptr<const Vocabulary> v,
                                               std::size_t k) {
  return std::make_shared<const ContextCounts>(build_context_counts(c, std::move(v), k));
}

}  // namespace

TEST_CASE("window counts: small worked case") {
  const Corpus c = test::make_corpus({{"a", "b", "a", "oov", "c"}, {"c", "a"}});
  const auto vocab = std::make_shared<const Vocabulary>(
      build_vocab(count_frequencies(test::make_corpus({{"a", "a", "a", "b", "c", "c"}})), 3));
  const auto cc = build_context_counts(c, vocab, 2);
  const WordId a = vocab->id("a"), b = vocab->id("b"), cw = vocab->id("c");
  // doc 0, k=2: a(0): b, a; b(1): a, a; a(2): a, b, c(dist 2 via oov); c(4): a
  CHECK(cc.counts.at(a, a) == 2);
  CHECK(cc.counts.at(a, b) == 2);
  CHECK(cc.counts.at(a, cw) == 2);
  CHECK(cc.counts.at(b, a) == 2);
  CHECK(cc.counts.at(cw, a) == 2);
  CHECK(cc.counts.at(cw, b) == 0);
  CHECK(cc.occurrences[a] == 3);
  CHECK(cc.occurrences[cw] == 2);
  CHECK(cc.totals[a] == 6);
  CHECK_THROWS_AS(build_context_counts(c, vocab, 0), InvalidArgument);
}

TEST_CASE("window counts equal the brute-force oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = test::random_corpus(rng, 20, 50, 20);
    const auto vocab = vocab_of({&c}, rng() % 20 + 1);
    for (std::size_t k : {1, 2, 3, 10}) {
      const auto cc = build_context_counts(c, vocab, k, trial % 3 + 1);
      REQUIRE(oracle::to_pairs(cc.counts) == oracle::window_counts(c, *vocab, k));
      for (WordId w = 0; w < vocab->size(); ++w) {
        const auto vals = cc.counts.row_values(w);
        CHECK(cc.totals[w] == std::accumulate(vals.begin(), vals.end(), std::uint64_t{0}));
      }
    }
  }
}

TEST_CASE("dense kl worked examples") {
  const std::vector<double> half{0.5, 0.5}, skew{0.25, 0.75}, rev{0.75, 0.25};
  CHECK(kl_divergence(half, half) == 0.0);
  CHECK(kl_divergence(half, skew) == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(kl_divergence(rev, half) == doctest::Approx(0.130812).epsilon(1e-6));
  CHECK(kl_divergence(half, skew) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  const std::vector<double> three{0.2, 0.3, 0.5}, zero{0.0, 1.0};
  CHECK_THROWS_AS(kl_divergence(half, three), InvalidArgument);
  CHECK_THROWS_AS(kl_divergence(half, zero), InvalidArgument);
}

TEST_CASE("smoothing validation") {
  CHECK_THROWS_AS(Smoothing::laplace(0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(Smoothing::dirichlet(-1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(Smoothing::laplace(std::nan("")).validate(), InvalidArgument);
  CHECK(parse_smoothing_kind("dirichlet") == Smoothing::Kind::dirichlet);
  CHECK_THROWS_AS(parse_smoothing_kind("kneser-ney"), InvalidArgument);
}

TEST_CASE("smoothed distributions match the formulas and normalize") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Corpus c = test::random_corpus(rng, 15, 40, 25);
    const auto vocab = vocab_of({&c}, 20);
    const auto cc = counts_of(c, vocab, 3);
    for (Smoothing s : {Smoothing::laplace(1.0), Smoothing::laplace(0.05), Smoothing::dirichlet(7.0)}) {
      const ContextDistribution d(cc, s, CorpusSide::dark);
      for (WordId w = 0; w < vocab->size(); ++w) {
        const auto p = d.dense(w);
        const auto ref = oracle::smoothed(*cc, s, w);
        double sum = 0.0;
        for (std::size_t v = 0; v < p.size(); ++v) {
          CHECK(p[v] > 0.0);
          CHECK(p[v] == doctest::Approx(ref[v]).epsilon(1e-12));
          CHECK(d.probability(w, static_cast<WordId>(v)) == doctest::Approx(p[v]).epsilon(1e-14));
          sum += p[v];
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("sparse kl and ranker scores equal the dense oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Corpus dark = test::random_corpus(rng, 12, 40, 30);
    const Corpus clean = test::random_corpus(rng, 12, 40, 30);
    const auto vocab = vocab_of({&dark, &clean}, 25);
    const auto dc = counts_of(dark, vocab, trial % 4 + 1);
    const auto cc = counts_of(clean, vocab, trial % 4 + 1);
    const Smoothing s = trial % 2 ? Smoothing::dirichlet(5.0 + trial) : Smoothing::laplace(0.1 * (trial + 1));
    const ContextDistribution pd(dc, s, CorpusSide::dark), pc(cc, s, CorpusSide::clean);
    const KlRanker ranker(pd, pc, 0);
    REQUIRE(ranker.candidates().size() > 0);
    for (WordId q = 0; q < vocab->size(); ++q) {
      const auto p = oracle::smoothed(*dc, s, q);
      std::map<WordId, double> fast;
      for (const auto& sw : ranker.score(q)) fast[sw.word] = sw.score;
      for (WordId w : ranker.candidates()) {
        const double ref = oracle::kl(p, oracle::smoothed(*cc, s, w));
        CHECK(std::abs(kl_divergence(pd, q, pc, w) - ref) < 1e-10);
        CHECK(std::abs(fast.at(w) - std::max(0.0, ref)) < 1e-10);
      }
      // Self divergence is zero on one model.
      CHECK(std::abs(kl_divergence(pd, q, pd, q)) < 1e-12);
    }
  }
}

TEST_CASE("rank order is invariant to the log base") {
  std::mt19937_64 rng(23);
  const Corpus dark = test::random_corpus(rng, 20, 50, 40);
  const Corpus clean = test::random_corpus(rng, 20, 50, 40);
  const auto vocab = vocab_of({&dark, &clean}, 40);
  const ContextDistribution pd(counts_of(dark, vocab, 3), Smoothing::laplace(1.0), CorpusSide::dark);
  const ContextDistribution pc(counts_of(clean, vocab, 3), Smoothing::laplace(1.0), CorpusSide::clean);
  const KlRanker nats(pd, pc, 1), bits(pd, pc, 1, 2.0);
  for (WordId q = 0; q < vocab->size(); ++q) {
    const auto a = nats.rank(q), b = bits.rank(q);
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      CHECK(a.candidates[i].word == b.candidates[i].word);
      CHECK(b.candidates[i].score == doctest::Approx(a.candidates[i].score / std::log(2.0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("ranker candidates, ties and errors") {
  const Corpus dark = test::make_corpus({{"a", "b", "c", "a", "b", "c"}});
  const Corpus clean = test::make_corpus({{"a", "b", "c", "a", "b", "c", "d"}});
  const auto vocab = vocab_of({&dark, &clean}, 10);
  const ContextDistribution pd(counts_of(dark, vocab, 1), Smoothing::laplace(1.0), CorpusSide::dark);
  const ContextDistribution pc(counts_of(clean, vocab, 1), Smoothing::laplace(1.0), CorpusSide::clean);

  const KlRanker floor2(pd, pc, 2);
  CHECK(floor2.candidates().size() == 3);  // d occurs once on the clean side
  const KlRanker floor0(pd, pc, 0);
  CHECK(floor0.candidates().size() == 4);

  const auto r = rank_by_kl("a", pd, pc, 0);
  CHECK(r.query == "a");
  for (std::size_t i = 1; i < r.candidates.size(); ++i) CHECK(ranks_before(r.candidates[i - 1], r.candidates[i], *vocab));
  CHECK(r.self_rank == r.rank_of(vocab->id("a")));
  CHECK(floor0.self_rank(vocab->id("a")) == r.self_rank);
  CHECK_THROWS_AS(rank_by_kl("zzz", pd, pc), UnknownWord);

  const ContextDistribution dirichlet(counts_of(clean, vocab, 1), Smoothing::dirichlet(10.0), CorpusSide::clean);
  CHECK_THROWS_AS(KlRanker(pd, dirichlet), MismatchError);
  const auto other_vocab = vocab_of({&dark}, 10);
  const ContextDistribution foreign(counts_of(dark, other_vocab, 1), Smoothing::laplace(1.0), CorpusSide::clean);
  CHECK_THROWS_AS(kl_divergence(pd, 0, foreign, 0), MismatchError);
}

TEST_CASE("mirror corpora map words to themselves") {
  const auto raw = test::line_documents(test::data_dir() / "canterbury");
  const std::vector<RawDocument> some(raw.begin(), raw.begin() + 3000);
  const Corpus c = preprocess_corpus(some, PipelineConfig::defaults(), "mirror");
  const auto vocab = vocab_of({&c}, 500);
  const auto cc = counts_of(c, vocab, 10);
  const ContextDistribution pd(cc, Smoothing::laplace(1.0), CorpusSide::dark);
  const ContextDistribution pc(cc, Smoothing::laplace(1.0), CorpusSide::clean);
  const KlRanker ranker(pd, pc, 5);

  // Words whose count rows duplicate another word's can tie with it.
  std::map<std::vector<std::uint64_t>, int> seen;
  for (WordId w = 0; w < vocab->size(); ++w) {
    const auto v = cc->counts.row_values(w);
    const auto cols = cc->counts.row_columns(w);
    std::vector<std::uint64_t> key(cols.begin(), cols.end());
    key.insert(key.end(), v.begin(), v.end());
    ++seen[key];
  }
  std::size_t checked = 0;
  for (WordId w = 0; w < vocab->size(); ++w) {
    if (cc->occurrences[w] < 5) continue;
    const auto v = cc->counts.row_values(w);
    const auto cols = cc->counts.row_columns(w);
    std::vector<std::uint64_t> key(cols.begin(), cols.end());
    key.insert(key.end(), v.begin(), v.end());
    if (seen[key] > 1) continue;
    CHECK(ranker.rank(w).candidates.front().word == w);
    ++checked;
  }
  CHECK(checked > 400);
}

TEST_CASE("detect_candidates ordering and floor") {
  // "bank" means money on the dark side and river on the clean side.
  std::vector<std::vector<std::string>> dark_docs, clean_docs;
  for (int i = 0; i < 20; ++i) {
    dark_docs.push_back({"bank", "money", "loan", "cash"});
    dark_docs.push_back({"river", "water", "fish", "boat"});
    dark_docs.push_back({"vault", "money", "loan", "cash"});
    clean_docs.push_back({"bank", "water", "shore", "boat"});
    clean_docs.push_back({"river", "water", "fish", "boat"});
    clean_docs.push_back({"vault", "money", "loan", "cash"});
  }
  dark_docs.push_back({"rare", "money"});
  const Corpus dark = test::make_corpus(dark_docs), clean = test::make_corpus(clean_docs);
  const auto vocab = vocab_of({&dark, &clean}, 50);
  const ContextDistribution pd(counts_of(dark, vocab, 3), Smoothing::laplace(1.0), CorpusSide::dark);
  const ContextDistribution pc(counts_of(clean, vocab, 3), Smoothing::laplace(1.0), CorpusSide::clean);

  const auto found = detect_candidates(pd, pc, 1, 10, 5);
  REQUIRE_FALSE(found.empty());
  std::set<std::string> words;
  for (const auto& d : found) words.insert(vocab->word(d.word));
  CHECK(words.count("bank"));
  CHECK_FALSE(words.count("river"));
  CHECK_FALSE(words.count("vault"));
  CHECK_FALSE(words.count("rare"));
  for (const auto& d : found) {
    if (d.self_rank) CHECK(*d.self_rank > 1);
  }
  for (std::size_t i = 1; i < found.size(); ++i) {
    const auto& a = found[i - 1];
    const auto& b = found[i];
    if (a.self_rank && b.self_rank) CHECK(*a.self_rank >= *b.self_rank);
    CHECK(!(a.self_rank && !b.self_rank));
  }
  CHECK(detect_candidates(pd, pc, 1, 1, 5).size() == 1);
  CHECK(detect_candidates(pd, pc, 1, 10, 5, 3) == found);
}
