#include <doctest.h>

#include <json.hpp>
#include <map>
#include <random>

#include "jargon/error.hpp"
#include "jargon/evaluation.hpp"
#include "support.hpp"

using namespace jargon;

namespace {

Corpus desk_corpus(std::size_t lines) {
  const auto raw = test::line_documents(test::data_dir() / "canterbury");
  const std::vector<RawDocument> some(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(lines));
  return preprocess_corpus(some, PipelineConfig::defaults(), "canterbury");
}

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.seed = 3;
  cfg.n_dark_words = 15;
  cfg.min_word_freq = 5;
  cfg.vocab_size = 400;
  cfg.window = 5;
  cfg.embedding_dim = 30;
  cfg.embedding_window = 5;
  cfg.neighborhood = 20;
  return cfg;
}

RankedMapping ranking_of(std::vector<WordId> order) {
  RankedMapping r;
  for (std::size_t i = 0; i < order.size(); ++i) r.candidates.push_back({order[i], static_cast<double>(i)});
  return r;
}

}  // namespace

TEST_CASE("mean reciprocal rank worked examples") {
  const std::vector<double> ranks{1.0, 1.0 / 2, 1.0 / 4};
  CHECK(mean_reciprocal_rank(ranks) == doctest::Approx(0.583333).epsilon(1e-6));
  CHECK(mean_reciprocal_rank(ranks) == (1.0 + 0.5 + 0.25) / 3.0);
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(mean_reciprocal_rank(ones) == 1.0);
  const std::vector<double> tenth{0.1};
  CHECK(mean_reciprocal_rank(tenth) == doctest::Approx(0.1));
  CHECK_THROWS_AS(mean_reciprocal_rank(std::vector<double>{}), InvalidArgument);

  const auto r = ranking_of({4, 2, 9});
  CHECK(reciprocal_rank(r, 4) == 1.0);
  CHECK(reciprocal_rank(r, 9) == doctest::Approx(1.0 / 3));
  CHECK(reciprocal_rank(r, 7) == 0.0);
  const std::vector<double> with_absent{1.0, reciprocal_rank(r, 7)};
  CHECK(mean_reciprocal_rank(with_absent) == 0.5);
}

TEST_CASE("mrr bounds and monotonicity") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> rr(rng() % 20 + 1);
    std::vector<std::size_t> ranks(rr.size());
    for (std::size_t i = 0; i < rr.size(); ++i) {
      ranks[i] = rng() % 50 + 1;
      rr[i] = 1.0 / static_cast<double>(ranks[i]);
    }
    const double m = mean_reciprocal_rank(rr);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    const std::size_t i = rng() % rr.size();
    auto worse = rr;
    worse[i] = 1.0 / static_cast<double>(ranks[i] + 1);
    CHECK(mean_reciprocal_rank(worse) < m);
  }
}

TEST_CASE("split partitions documents") {
  const Corpus c = desk_corpus(501);
  for (double f : {0.5, 0.1, 0.9}) {
    const auto [a, b] = split_corpus(c, f, 42);
    CHECK(a.docs.size() == static_cast<std::size_t>(std::llround(f * 501)));
    CHECK(a.docs.size() + b.docs.size() == c.docs.size());
    std::vector<std::string> ids;
    for (const auto* part : {&a, &b}) {
      for (std::size_t i = 0; i < part->docs.size(); ++i) {
        ids.push_back(part->docs[i].id);
        if (i > 0) CHECK(part->docs[i - 1].id != part->docs[i].id);
      }
    }
    std::vector<std::string> original;
    for (const auto& d : c.docs) original.push_back(d.id);
    std::sort(ids.begin(), ids.end());
    std::sort(original.begin(), original.end());
    CHECK(ids == original);
  }
  CHECK(split_corpus(c, 0.5, 42) == split_corpus(c, 0.5, 42));
  CHECK_FALSE(split_corpus(c, 0.5, 42).first == split_corpus(c, 0.5, 43).first);
  CHECK_THROWS_AS(split_corpus(c, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(split_corpus(c, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(split_corpus(test::make_corpus({{"a"}}), 0.5, 1), InvalidArgument);
}

TEST_CASE("injection rewrites only selected words") {
  const Corpus c = desk_corpus(800);
  const auto freq = count_frequencies(c);
  const auto inj = inject_dark_words(c, freq, 25, 10, 77);
  REQUIRE(inj.selected.size() == 25);
  CHECK(std::is_sorted(inj.selected.begin(), inj.selected.end()));
  const std::set<std::string> chosen(inj.selected.begin(), inj.selected.end());
  for (const auto& w : inj.selected) CHECK(freq.count(w) >= 10);
  CHECK(inj.corpus.token_count() == c.token_count());
  for (std::size_t d = 0; d < c.docs.size(); ++d) {
    for (std::size_t t = 0; t < c.docs[d].tokens.size(); ++t) {
      const auto& before = c.docs[d].tokens[t];
      const auto& after = inj.corpus.docs[d].tokens[t];
      CHECK(after == (chosen.count(before) ? "_" + before : before));
    }
  }
  CHECK(inject_dark_words(c, freq, 25, 10, 77).selected == inj.selected);
  CHECK(inject_dark_words(c, freq, 25, 10, 78).selected != inj.selected);
  CHECK_THROWS_AS(inject_dark_words(c, freq, 100000, 10, 1), InvalidArgument);
}

TEST_CASE("strip_dash_markers") {
  const Corpus c = test::make_corpus({{"_a", "b", "__c", "_", "d_"}});
  CHECK(strip_dash_markers(c).docs[0].tokens == std::vector<std::string>{"a", "b", "c", "d_"});
}

TEST_CASE("clean-clean simulation is deterministic and well formed") {
  const Corpus c = desk_corpus(3000);
  SimulationConfig cfg = small_config();
  const auto report = run_clean_clean(cfg, c);
  cfg.threads = 4;
  const auto threaded = run_clean_clean(cfg, c);
  CHECK(report_to_json(report) == report_to_json(run_clean_clean(small_config(), c)));
  CHECK(report_to_tsv(threaded) == report_to_tsv(report));

  CHECK(report.selected.size() == 15);
  CHECK(report.dark_documents + report.clean_documents == c.docs.size());
  REQUIRE(report.methods.size() == 2);
  for (const auto& m : report.methods) {
    CHECK(m.mrr_all >= 0.0);
    CHECK(m.mrr_all <= 1.0);
    REQUIRE(m.mrr_dark.has_value());
    CHECK(*m.mrr_dark >= 0.0);
    CHECK(m.random_mrr > 0.0);
    CHECK(m.random_mrr < 0.1);
    std::size_t dashed = 0;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      const auto& r = m.records[i];
      if (i > 0) CHECK(m.records[i - 1].query < r.query);
      if (r.dashed) {
        ++dashed;
        CHECK(r.query == "_" + r.target);
      } else {
        CHECK(r.query == r.target);
      }
      CHECK(r.reciprocal_rank == (r.rank ? 1.0 / static_cast<double>(*r.rank) : 0.0));
      CHECK(r.top.size() <= 5);
    }
    CHECK(dashed > 0);
    CHECK(dashed <= 15);
  }
  CHECK(report.find(Method::kl) == &report.methods[0]);

  const auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j["format"] == "jargon-simulation-report");
  CHECK(j["config"]["seed"] == 3);
  CHECK(j["methods"][0]["method"] == "kl");
  CHECK(j["methods"][1]["records"].size() == report.methods[1].records.size());

  const std::string tsv = report_to_tsv(report);
  CHECK(tsv.rfind("method\tmrr_all\tmrr_dark\nkl\t", 0) == 0);
}

TEST_CASE("mirror simulation identifies dashed words") {
  const Corpus c = desk_corpus(3000);
  SimulationConfig cfg = small_config();
  cfg.mirror = true;
  cfg.methods = {Method::kl};
  const auto report = run_clean_clean(cfg, c);
  CHECK(report.dark_documents == c.docs.size());
  CHECK(*report.methods[0].mrr_dark >= 0.95);
}

TEST_CASE("simulation errors name the stage") {
  SimulationConfig cfg = small_config();
  cfg.n_dark_words = 100000;
  try {
    run_clean_clean(cfg, desk_corpus(200));
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("inject") != std::string::npos);
  }
  cfg = small_config();
  cfg.split_fraction = 1.5;
  CHECK_THROWS_AS(run_clean_clean(cfg, desk_corpus(200)), InvalidArgument);
  CHECK(parse_method("ccla") == Method::ccla);
  CHECK_THROWS_AS(parse_method("svm"), InvalidArgument);
}

TEST_CASE("mapping report tsv") {
  MappingReport m;
  m.top_m = 2;
  m.rows.push_back({"rat", {{"trojan", 0.5}, {"malware", 0.75}}, std::nullopt});
  m.rows.push_back({"bank", {{"river", 0.25}}, 7});
  const std::string tsv = mapping_to_tsv(m);
  std::istringstream in(tsv);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "dark_word\tclean_word_1\tclean_word_2\tscore_1\tscore_2\tself_rank");
  CHECK(row1 == "rat\ttrojan\tmalware\t0.5\t0.75\tNA");
  CHECK(row2.rfind("bank\triver\t", 0) == 0);
  CHECK(row2.substr(row2.size() - 2) == "\t7");
}

TEST_CASE("dark-clean run finds a shifted word") {
  std::vector<std::vector<std::string>> dark_docs, clean_docs;
  for (int i = 0; i < 20; ++i) {
    dark_docs.push_back({"rat", "download", "install", "remote"});
    dark_docs.push_back({"mouse", "cheese", "cat", "trap"});
    clean_docs.push_back({"rat", "cheese", "cat", "trap"});
    clean_docs.push_back({"mouse", "cheese", "cat", "trap"});
    clean_docs.push_back({"trojan", "download", "install", "remote"});
  }
  DarkCleanConfig cfg;
  cfg.window = 3;
  cfg.detect.self_rank_threshold = 1;
  const auto report = run_dark_clean(test::make_corpus(dark_docs), test::make_corpus(clean_docs), cfg);
  const auto it = std::find_if(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.dark_word == "rat"; });
  REQUIRE(it != report.rows.end());
  REQUIRE_FALSE(it->clean.empty());
  CHECK(it->clean.front().first == "trojan");
}
