#include <doctest.h>

#include <cmath>
#include <random>

#include "jargon/ccla.hpp"
#include "jargon/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jargon;

namespace {

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
  for (auto& r : rows) {
    if (rng() % 10 == 0) continue;
    for (auto& x : r) x = g(rng);
  }
  return rows;
}

}  // namespace

TEST_CASE("phi is bounded and equals the dense evaluation") {
  std::mt19937_64 rng(99);
  std::size_t compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng() % 28 + 3, d = rng() % 8 + 1, k = rng() % 10 + 1;
    const auto vocab = test::numbered_vocab(n);
    const auto dark = test::embedding_from_rows(vocab, random_rows(rng, n, d));
    const auto clean = test::embedding_from_rows(vocab, random_rows(rng, n, d));
    const CclaModel model(dark, clean, k);
    for (WordId wd = 0; wd < n; ++wd) {
      if (!dark.embeddable(wd)) {
        CHECK_THROWS_AS(model.rank(wd, 0), NotEmbeddable);
        continue;
      }
      const auto ranked = model.rank(wd, 0);
      for (const auto& c : ranked.candidates) {
        const double phi = model.score(wd, c.word);
        CHECK(std::abs(phi) <= 1.0 + 1e-9);
        CHECK(std::abs(phi - oracle::phi(dark, clean, wd, c.word, k)) < 1e-9);
        CHECK(std::abs(-c.score - phi) < 1e-12);
        ++compared;
      }
    }
  }
  CHECK(compared > 10000);
}

TEST_CASE("identical embeddings score one against themselves") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng() % 20 + 3, d = rng() % 6 + 2;
    const auto vocab = test::numbered_vocab(n);
    const auto e = test::embedding_from_rows(vocab, random_rows(rng, n, d));
    const CclaModel model(e, e, rng() % 8 + 1);
    for (WordId w = 0; w < n; ++w) {
      if (!e.embeddable(w) || model.dark_neighbors()[w].entries.empty()) continue;
      CHECK(std::abs(model.score(w, w) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("common neighbors and degenerate cases") {
  NeighborList a{0, {{1, 0.9}, {3, 0.5}, {2, 0.1}}, false};
  NeighborList b{0, {{2, 0.8}, {4, 0.7}, {1, 0.6}}, false};
  CHECK(common_neighbors(a, b) == std::vector<WordId>{1, 2});

  const auto vocab = test::numbered_vocab(5);
  NeighborList none{0, {{4, 0.5}}, false};
  NeighborList other{1, {{3, 0.5}}, false};
  CHECK(ccla_score(none, other, *vocab) == 0.0);
  const double expected = (0.9 * 0.6 + 0.1 * 0.8) / (a.norm() * b.norm());
  CHECK(ccla_score(a, b, *vocab) == doctest::Approx(expected).epsilon(1e-14));
  NeighborList zero{2, {}, true};
  CHECK_THROWS_AS(ccla_score(zero, b, *vocab), NotEmbeddable);
  CHECK(NeighborList{0, {{1, 0.6}, {2, 0.8}}, false}.norm() == doctest::Approx(1.0));
}

TEST_CASE("ccla ranking floor, ordering and vocabulary checks") {
  std::mt19937_64 rng(12);
  const std::size_t n = 12;
  const auto vocab = test::numbered_vocab(n);
  auto dark = test::embedding_from_rows(vocab, random_rows(rng, n, 4));
  auto clean = test::embedding_from_rows(vocab, random_rows(rng, n, 4));
  clean.frequencies[vocab->id("w3")] = 2;
  dark.data.assign(dark.data.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) dark.data[i * 4 + i % 4] = 1.0 + static_cast<double>(i);
  const CclaModel model(dark, clean, 5);
  const auto r = model.rank("w0", 5);
  for (const auto& c : r.candidates) CHECK(c.word != vocab->id("w3"));
  for (std::size_t i = 1; i < r.candidates.size(); ++i) CHECK(ranks_before(r.candidates[i - 1], r.candidates[i], *vocab));
  CHECK(rank_by_ccla("w0", dark, clean, 5).candidates == r.candidates);
  CHECK_THROWS_AS(rank_by_ccla("nope", dark, clean, 5), UnknownWord);

  const auto other = test::embedding_from_rows(test::numbered_vocab(n + 1), random_rows(rng, n + 1, 4));
  CHECK_THROWS_AS(CclaModel(dark, other, 5), MismatchError);
}

TEST_CASE("mirror corpus ranks every embeddable word first") {
  const auto raw = test::line_documents(test::data_dir() / "canterbury");
  const std::vector<RawDocument> some(raw.begin(), raw.begin() + 3000);
  const Corpus c = preprocess_corpus(some, PipelineConfig::defaults(), "mirror");
  const auto vocab = std::make_shared<const Vocabulary>(build_vocab(count_frequencies(c), 400));
  const auto dark = build_embedding(c, vocab, CorpusSide::dark, 5, 50, 1);
  const auto clean = build_embedding(c, vocab, CorpusSide::clean, 5, 50, 1);
  CHECK(dark.data == clean.data);
  const CclaModel model(dark, clean, 20);
  std::size_t top1 = 0, total = 0;
  for (WordId w = 0; w < vocab->size(); ++w) {
    if (!dark.embeddable(w)) continue;
    CHECK(std::abs(model.score(w, w) - 1.0) < 1e-9);
    if (clean.frequencies[w] < 5) continue;
    ++total;
    if (model.rank(w, 5).candidates.front().word == w) ++top1;
  }
  CHECK(static_cast<double>(top1) >= 0.95 * static_cast<double>(total));
}
