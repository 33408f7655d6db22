#include "jargon/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <memory>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "jargon/ccla.hpp"
#include "jargon/embedding.hpp"
#include "jargon/error.hpp"
#include "jargon/hashing.hpp"
#include "jargon/kv_file.hpp"
#include "jargon/parallel.hpp"

namespace jargon {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  Fingerprinter fp;
  fp.add_u64(seed);
  fp.add_field(label);
  return fp.value();
}

namespace {

// Uniform in [0, n) by rejection, independent of the standard library's
// distribution implementations.
std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % n;
}

template <class T>
void shuffle_prefix(std::vector<T>& items, std::size_t count, std::mt19937_64& engine) {
  for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
    const std::size_t j = i + bounded(engine, items.size() - i);
    std::swap(items[i], items[j]);
  }
}

template <class Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  const auto tag = [&](const std::exception& e) { return "[" + std::string(name) + "] " + e.what(); };
  try {
    return fn();
  } catch (const UnknownWord&) {
    throw;
  } catch (const NotEmbeddable&) {
    throw;
  } catch (const IoError& e) {
    throw IoError(tag(e));
  } catch (const FormatError& e) {
    throw FormatError(tag(e));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(tag(e));
  } catch (const MismatchError& e) {
    throw MismatchError(tag(e));
  } catch (const StaleWorkspace& e) {
    throw StaleWorkspace(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

std::vector<std::pair<std::string, double>> top_of(const RankedMapping& ranked, std::size_t m,
                                                   const Vocabulary& vocab) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < std::min(m, ranked.candidates.size()); ++i) {
    out.emplace_back(vocab.word(ranked.candidates[i].word), ranked.candidates[i].score);
  }
  return out;
}

double harmonic_mean_rank(std::size_t n) {
  if (n == 0) return 0.0;
  double h = 0.0;
  for (std::size_t r = n; r >= 1; --r) h += 1.0 / static_cast<double>(r);
  return h / static_cast<double>(n);
}

MethodResult summarize(Method method, std::vector<QueryRecord> records, std::size_t candidates) {
  MethodResult out;
  out.method = method;
  out.candidate_count = candidates;
  out.random_mrr = harmonic_mean_rank(candidates);
  std::vector<double> all;
  std::vector<double> dark;
  for (const auto& r : records) {
    all.push_back(r.reciprocal_rank);
    if (r.dashed) dark.push_back(r.reciprocal_rank);
  }
  if (all.empty()) throw InvalidArgument("no query word passes the frequency floor");
  out.mrr_all = mean_reciprocal_rank(all);
  if (!dark.empty()) out.mrr_dark = mean_reciprocal_rank(dark);
  out.records = std::move(records);
  return out;
}

std::string format_score(double value) {
  return format_double(value);
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::kl ? "kl" : "ccla";
}

Method parse_method(std::string_view name) {
  if (name == "kl" || name == "KL") return Method::kl;
  if (name == "ccla" || name == "CCLA") return Method::ccla;
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected kl or ccla)");
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split fraction must be in (0, 1)");
  const std::size_t n = corpus.docs.size();
  const auto first_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (first_size == 0 || first_size == n) {
    throw InvalidArgument("split of " + std::to_string(n) + " documents at fraction " + format_double(fraction) +
                          " leaves a split empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 engine(seed);
  shuffle_prefix(order, first_size, engine);
  std::vector<char> in_first(n, 0);
  for (std::size_t i = 0; i < first_size; ++i) in_first[order[i]] = 1;

  std::pair<Corpus, Corpus> out;
  out.first.provenance = out.second.provenance = corpus.provenance;
  out.first.provenance.source += "#split1";
  out.second.provenance.source += "#split2";
  for (std::size_t i = 0; i < n; ++i) (in_first[i] ? out.first : out.second).docs.push_back(corpus.docs[i]);
  return out;
}

Injection inject_dark_words(const Corpus& corpus, const FrequencyTable& freq, std::size_t n, std::uint64_t min_freq,
                            std::uint64_t seed) {
  std::vector<std::string> eligible;
  for (const auto& [word, count] : freq.counts) {
    if (count >= min_freq && count > 0 && !is_dashed(word)) eligible.push_back(word);
  }
  if (eligible.size() < n) {
    throw InvalidArgument("cannot inject " + std::to_string(n) + " dark words: only " +
                          std::to_string(eligible.size()) + " words have frequency >= " + std::to_string(min_freq));
  }
  std::sort(eligible.begin(), eligible.end());
  std::mt19937_64 engine(seed);
  shuffle_prefix(eligible, n, engine);
  eligible.resize(n);
  std::sort(eligible.begin(), eligible.end());

  Injection out{corpus, eligible};
  const std::set<std::string> chosen(eligible.begin(), eligible.end());
  for (auto& doc : out.corpus.docs) {
    for (auto& token : doc.tokens) {
      if (chosen.count(token)) token.insert(token.begin(), kDashMarker);
    }
  }
  return out;
}

Corpus strip_dash_markers(const Corpus& corpus) {
  Corpus out;
  out.provenance = corpus.provenance;
  out.docs.reserve(corpus.docs.size());
  for (const auto& doc : corpus.docs) {
    Document d{doc.id, {}};
    d.tokens.reserve(doc.tokens.size());
    for (const auto& token : doc.tokens) {
      const auto start = token.find_first_not_of(kDashMarker);
      if (start == std::string::npos) continue;
      d.tokens.push_back(token.substr(start));
    }
    out.docs.push_back(std::move(d));
  }
  return out;
}

double reciprocal_rank(const RankedMapping& ranked, WordId target) {
  const auto rank = ranked.rank_of(target);
  return rank ? 1.0 / static_cast<double>(*rank) : 0.0;
}

double mean_reciprocal_rank(std::span<const double> reciprocal_ranks) {
  if (reciprocal_ranks.empty()) throw InvalidArgument("mean_reciprocal_rank of an empty list");
  double sum = 0.0;
  for (double r : reciprocal_ranks) sum += r;
  return sum / static_cast<double>(reciprocal_ranks.size());
}

void SimulationConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument("simulation config: " + what); };
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) fail("split_fraction must be in (0, 1)");
  if (methods.empty()) fail("no method selected");
  if (vocab_size == 0) fail("vocab_size must be >= 1");
  if (window == 0) fail("window must be >= 1");
  if (embedding_window == 0) fail("embedding_window must be >= 1");
  if (embedding_dim == 0) fail("embedding_dim must be >= 1");
  if (neighborhood == 0) fail("neighborhood must be >= 1");
  smoothing.validate();
}

const MethodResult* SimulationReport::find(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

SimulationReport run_clean_clean(const SimulationConfig& config, const Corpus& clean_corpus) {
  stage("config", [&] { config.validate(); });
  SimulationReport report;
  report.config = config;
  report.source = clean_corpus.provenance.source;

  const Corpus base = strip_dash_markers(clean_corpus);
  auto [split1, split2] = stage("split", [&] {
    if (config.mirror) {
      if (base.docs.empty()) throw InvalidArgument("corpus has no documents");
      return std::make_pair(base, base);
    }
    return split_corpus(base, config.split_fraction, derive_seed(config.seed, "split"));
  });

  Injection injected = stage("inject", [&] {
    return inject_dark_words(split1, count_frequencies(split1), config.n_dark_words, config.min_word_freq,
                             derive_seed(config.seed, "inject"));
  });
  const Corpus& dark = injected.corpus;
  const Corpus& clean = split2;
  report.selected = injected.selected;
  report.dark_documents = dark.docs.size();
  report.clean_documents = clean.docs.size();

  const auto vocab = stage("vocabulary", [&] {
    std::set<std::string> forced;
    for (const auto& w : injected.selected) {
      forced.insert(w);
      forced.insert(std::string(1, kDashMarker) + w);
    }
    const Corpus* both[] = {&dark, &clean};
    return std::make_shared<const Vocabulary>(build_vocab(count_frequencies(both), config.vocab_size, forced));
  });
  report.vocab_size = vocab->size();

  // Query population: every vocabulary word frequent enough on the dark side.
  std::vector<std::uint64_t> dark_freq(vocab->size(), 0);
  for (const auto& doc : dark.docs) {
    for (const auto& token : doc.tokens) {
      if (auto id = vocab->find(token)) ++dark_freq[*id];
    }
  }
  std::vector<WordId> queries;
  for (WordId w = 0; w < vocab->size(); ++w) {
    if (dark_freq[w] >= config.min_word_freq && dark_freq[w] > 0) queries.push_back(w);
  }
  std::sort(queries.begin(), queries.end(),
            [&](WordId a, WordId b) { return vocab->lexical_rank(a) < vocab->lexical_rank(b); });

  const auto make_records = [&](auto&& rank_one) {
    std::vector<QueryRecord> records(queries.size());
    parallel_for(queries.size(), config.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        QueryRecord& r = records[i];
        r.query = vocab->word(queries[i]);
        r.dashed = is_dashed(r.query);
        r.target = r.dashed ? r.query.substr(1) : r.query;
        const WordId target = vocab->id(r.target);
        if (auto ranked = rank_one(queries[i])) {
          r.rank = ranked->rank_of(target);
          r.reciprocal_rank = reciprocal_rank(*ranked, target);
          r.top = top_of(*ranked, config.top_candidates, *vocab);
        }
      }
    });
    return records;
  };

  for (Method method : config.methods) {
    if (method == Method::kl) {
      report.methods.push_back(stage("kl", [&] {
        auto dark_counts = std::make_shared<const ContextCounts>(
            build_context_counts(dark, vocab, config.window, config.threads));
        auto clean_counts = std::make_shared<const ContextCounts>(
            build_context_counts(clean, vocab, config.window, config.threads));
        const auto dark_model = smooth(dark_counts, config.smoothing, CorpusSide::dark);
        const auto clean_model = smooth(clean_counts, config.smoothing, CorpusSide::clean);
        const KlRanker ranker(dark_model, clean_model, config.min_clean_freq);
        auto records = make_records([&](WordId q) { return std::optional<RankedMapping>(ranker.rank(q)); });
        return summarize(method, std::move(records), ranker.candidates().size());
      }));
    } else {
      report.methods.push_back(stage("ccla", [&] {
        const auto dark_emb = build_embedding(dark, vocab, CorpusSide::dark, config.embedding_window,
                                              config.embedding_dim, config.embedding_seed, config.threads);
        const auto clean_emb = build_embedding(clean, vocab, CorpusSide::clean, config.embedding_window,
                                               config.embedding_dim, config.embedding_seed, config.threads);
        const CclaModel model(dark_emb, clean_emb, config.neighborhood, config.threads);
        std::size_t candidates = 0;
        for (WordId w = 0; w < vocab->size(); ++w) {
          if (clean_emb.frequencies[w] >= config.min_clean_freq && clean_emb.frequencies[w] > 0 &&
              clean_emb.embeddable(w)) {
            ++candidates;
          }
        }
        // A query without a dark-side vector has no ranking and scores 0.
        auto records = make_records([&](WordId q) -> std::optional<RankedMapping> {
          if (!dark_emb.embeddable(q)) return std::nullopt;
          return model.rank(q, config.min_clean_freq);
        });
        return summarize(method, std::move(records), candidates);
      }));
    }
  }
  return report;
}

std::string report_to_json(const SimulationReport& report) {
  using nlohmann::ordered_json;
  const auto& c = report.config;
  ordered_json config = {
      {"seed", c.seed},
      {"n_dark_words", c.n_dark_words},
      {"min_word_freq", c.min_word_freq},
      {"split_fraction", c.split_fraction},
      {"methods", ordered_json::array()},
      {"vocab_size", c.vocab_size},
      {"window", c.window},
      {"smoothing", {{"kind", std::string(to_string(c.smoothing.kind))}, {"param", c.smoothing.param}}},
      {"embedding_dim", c.embedding_dim},
      {"embedding_window", c.embedding_window},
      {"embedding_seed", c.embedding_seed},
      {"neighborhood", c.neighborhood},
      {"min_clean_freq", c.min_clean_freq},
      {"top_candidates", c.top_candidates},
      {"mirror", c.mirror},
  };
  for (Method m : c.methods) config["methods"].push_back(std::string(to_string(m)));

  ordered_json methods = ordered_json::array();
  for (const auto& m : report.methods) {
    ordered_json records = ordered_json::array();
    for (const auto& r : m.records) {
      ordered_json top = ordered_json::array();
      for (const auto& [word, score] : r.top) top.push_back({{"word", word}, {"score", score}});
      records.push_back({
          {"query", r.query},
          {"target", r.target},
          {"dashed", r.dashed},
          {"rank", r.rank ? ordered_json(*r.rank) : ordered_json(nullptr)},
          {"reciprocal_rank", r.reciprocal_rank},
          {"top", std::move(top)},
      });
    }
    methods.push_back({
        {"method", std::string(to_string(m.method))},
        {"mrr_all", m.mrr_all},
        {"mrr_dark", m.mrr_dark ? ordered_json(*m.mrr_dark) : ordered_json(nullptr)},
        {"queries", m.records.size()},
        {"dark_queries", std::count_if(m.records.begin(), m.records.end(), [](const QueryRecord& r) { return r.dashed; })},
        {"candidate_count", m.candidate_count},
        {"random_mrr", m.random_mrr},
        {"records", std::move(records)},
    });
  }

  ordered_json doc = {
      {"format", "jargon-simulation-report"},
      {"version", 1},
      {"config", std::move(config)},
      {"source", report.source},
      {"dark_documents", report.dark_documents},
      {"clean_documents", report.clean_documents},
      {"vocab_size", report.vocab_size},
      {"selected_words", report.selected},
      {"methods", std::move(methods)},
  };
  return doc.dump(2) + "\n";
}

std::string report_to_tsv(const SimulationReport& report) {
  std::ostringstream out;
  out << "method\tmrr_all\tmrr_dark\n";
  for (const auto& m : report.methods) {
    out << to_string(m.method) << '\t' << format_score(m.mrr_all) << '\t'
        << (m.mrr_dark ? format_score(*m.mrr_dark) : std::string("NA")) << '\n';
  }
  return out.str();
}

MappingReport make_mapping_report(const ContextDistribution& dark, const ContextDistribution& clean,
                                  const DetectConfig& config) {
  if (config.top_m == 0) throw InvalidArgument("top_m must be >= 1");
  const auto detected = detect_candidates(dark, clean, config.self_rank_threshold, config.max_results,
                                          config.min_freq, config.threads);
  const KlRanker ranker(dark, clean, config.min_freq);
  MappingReport report;
  report.top_m = config.top_m;
  report.rows.resize(detected.size());
  parallel_for(detected.size(), config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ranked = ranker.rank(detected[i].word);
      report.rows[i] = {ranked.query, top_of(ranked, config.top_m, dark.vocab()), detected[i].self_rank};
    }
  });
  return report;
}

MappingReport run_dark_clean(const Corpus& dark, const Corpus& clean, const DarkCleanConfig& config) {
  if (dark.docs.empty() || clean.docs.empty()) throw InvalidArgument("both corpora must contain documents");
  const auto vocab = stage("vocabulary", [&] {
    const Corpus* both[] = {&dark, &clean};
    return std::make_shared<const Vocabulary>(build_vocab(count_frequencies(both), config.vocab_size));
  });
  return stage("detect", [&] {
    auto dark_counts = std::make_shared<const ContextCounts>(
        build_context_counts(dark, vocab, config.window, config.detect.threads));
    auto clean_counts = std::make_shared<const ContextCounts>(
        build_context_counts(clean, vocab, config.window, config.detect.threads));
    return make_mapping_report(smooth(dark_counts, config.smoothing, CorpusSide::dark),
                               smooth(clean_counts, config.smoothing, CorpusSide::clean), config.detect);
  });
}

std::string mapping_to_tsv(const MappingReport& report) {
  std::ostringstream out;
  out << "dark_word";
  for (std::size_t i = 1; i <= report.top_m; ++i) out << "\tclean_word_" << i;
  for (std::size_t i = 1; i <= report.top_m; ++i) out << "\tscore_" << i;
  out << "\tself_rank\n";
  for (const auto& row : report.rows) {
    out << row.dark_word;
    for (std::size_t i = 0; i < report.top_m; ++i) out << '\t' << (i < row.clean.size() ? row.clean[i].first : "");
    for (std::size_t i = 0; i < report.top_m; ++i) {
      out << '\t' << (i < row.clean.size() ? format_score(row.clean[i].second) : "");
    }
    out << '\t' << (row.self_rank ? std::to_string(*row.self_rank) : "NA") << '\n';
  }
  return out.str();
}

}  // namespace jargon
