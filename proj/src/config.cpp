#include "jargon/config.hpp"

#include <algorithm>
#include <cmath>

#include "jargon/error.hpp"
#include "jargon/stopwords.hpp"

namespace jargon {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kKnownKeys = {
    "corpus.dark",          "corpus.dark_format",        "corpus.clean",
    "corpus.clean_format",  "corpus.workspace",          "pipeline.lowercase",
    "pipeline.strip_punctuation", "pipeline.stopwords",  "pipeline.stemmer",
    "pipeline.min_token_length", "vocabulary.size",      "context.window",
    "context.smoothing",    "context.alpha",             "context.mu",
    "context.min_clean_freq", "embedding.dim",           "embedding.window",
    "embedding.seed",       "embedding.neighborhood",    "simulation.seed",
    "simulation.n_dark_words", "simulation.min_word_freq", "simulation.split_fraction",
    "simulation.methods",   "simulation.top_candidates", "simulation.mirror",
    "simulation.report_dir", "detect.threshold",         "detect.max_results",
    "detect.top_m",         "run.threads",
};

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  const fs::path p(value);
  return p.is_absolute() ? p.lexically_normal() : (base / p).lexically_normal();
}

std::uint64_t non_negative(const KvDocument& doc, const std::string& key, std::uint64_t fallback) {
  const auto v = doc.get_int(key);
  if (!v) return fallback;
  if (*v < 0) throw InvalidArgument(key + " must be >= 0");
  return static_cast<std::uint64_t>(*v);
}

std::size_t positive(const KvDocument& doc, const std::string& key, std::size_t fallback) {
  const auto v = doc.get_int(key);
  if (!v) return fallback;
  if (*v < 1) throw InvalidArgument(key + " must be >= 1");
  return static_cast<std::size_t>(*v);
}

}  // namespace

void RunConfig::validate() const {
  pipeline.validate();
  smoothing.validate();
  if (vocab_size == 0) throw InvalidArgument("vocabulary.size must be >= 1");
  if (window == 0) throw InvalidArgument("context.window must be >= 1");
  if (embedding_dim == 0) throw InvalidArgument("embedding.dim must be >= 1");
  if (embedding_window == 0) throw InvalidArgument("embedding.window must be >= 1");
  if (neighborhood == 0) throw InvalidArgument("embedding.neighborhood must be >= 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InvalidArgument("simulation.split_fraction must be in (0, 1)");
  }
  if (methods.empty()) throw InvalidArgument("simulation.methods must not be empty");
  if (detect_top_m == 0) throw InvalidArgument("detect.top_m must be >= 1");
}

SimulationConfig RunConfig::simulation() const {
  SimulationConfig s;
  s.seed = simulation_seed;
  s.n_dark_words = n_dark_words;
  s.min_word_freq = min_word_freq;
  s.split_fraction = split_fraction;
  s.methods = methods;
  s.vocab_size = vocab_size;
  s.window = window;
  s.smoothing = smoothing;
  s.embedding_dim = embedding_dim;
  s.embedding_window = embedding_window;
  s.embedding_seed = embedding_seed;
  s.neighborhood = neighborhood;
  s.min_clean_freq = min_clean_freq;
  s.top_candidates = top_candidates;
  s.mirror = mirror;
  s.threads = threads;
  return s;
}

DetectConfig RunConfig::detect() const {
  DetectConfig d;
  d.self_rank_threshold = detect_threshold;
  d.max_results = detect_max_results;
  d.top_m = detect_top_m;
  d.min_freq = min_clean_freq;
  d.threads = threads;
  return d;
}

RunConfig run_config_from_kv(const KvDocument& doc, const fs::path& base_dir) {
  doc.require_known_keys(kKnownKeys);
  RunConfig c;

  c.dark.path = resolve(base_dir, doc.get_string("corpus.dark").value_or(""));
  c.clean.path = resolve(base_dir, doc.get_string("corpus.clean").value_or(""));
  c.dark.format = parse_corpus_format(doc.get_string("corpus.dark_format").value_or("jsonl"));
  c.clean.format = parse_corpus_format(doc.get_string("corpus.clean_format").value_or("jsonl"));
  c.workspace = resolve(base_dir, doc.get_string("corpus.workspace").value_or(""));

  c.pipeline.lowercase = doc.get_bool("pipeline.lowercase").value_or(true);
  c.pipeline.strip_punctuation = doc.get_bool("pipeline.strip_punctuation").value_or(true);
  c.pipeline.stemmer = parse_stemmer_kind(doc.get_string("pipeline.stemmer").value_or("english_snowball"));
  c.pipeline.min_token_length = positive(doc, "pipeline.min_token_length", 1);
  // "default", "none", a file path, or an inline list.
  if (doc.contains("pipeline.stopwords")) {
    const auto& value = doc.values().at("pipeline.stopwords");
    if (const auto* list = std::get_if<KvDocument::StringList>(&value)) {
      c.pipeline.stopwords = std::set<std::string>(list->begin(), list->end());
    } else {
      const std::string name = doc.get_string("pipeline.stopwords").value();
      if (name == "default") {
        c.pipeline.stopwords = default_stopwords();
      } else if (name == "none") {
        c.pipeline.stopwords.clear();
      } else {
        c.pipeline.stopwords = load_stopwords(resolve(base_dir, name));
      }
    }
  }

  c.vocab_size = positive(doc, "vocabulary.size", c.vocab_size);
  c.window = positive(doc, "context.window", c.window);
  const auto kind = parse_smoothing_kind(doc.get_string("context.smoothing").value_or("laplace"));
  if (kind == Smoothing::Kind::laplace) {
    if (doc.contains("context.mu")) throw InvalidArgument("context.mu only applies to dirichlet smoothing");
    c.smoothing = Smoothing::laplace(doc.get_double("context.alpha").value_or(1.0));
  } else {
    if (doc.contains("context.alpha")) throw InvalidArgument("context.alpha only applies to laplace smoothing");
    c.smoothing = Smoothing::dirichlet(doc.get_double("context.mu").value_or(1000.0));
  }
  c.min_clean_freq = non_negative(doc, "context.min_clean_freq", c.min_clean_freq);

  c.embedding_dim = positive(doc, "embedding.dim", c.embedding_dim);
  c.embedding_window = positive(doc, "embedding.window", c.window);
  c.embedding_seed = non_negative(doc, "embedding.seed", c.embedding_seed);
  c.neighborhood = positive(doc, "embedding.neighborhood", c.neighborhood);

  c.simulation_seed = non_negative(doc, "simulation.seed", c.simulation_seed);
  c.n_dark_words = non_negative(doc, "simulation.n_dark_words", c.n_dark_words);
  c.min_word_freq = non_negative(doc, "simulation.min_word_freq", c.min_word_freq);
  c.split_fraction = doc.get_double("simulation.split_fraction").value_or(c.split_fraction);
  if (auto methods = doc.get_string_list("simulation.methods")) {
    c.methods.clear();
    for (const auto& m : *methods) {
      const Method parsed = parse_method(m);
      if (std::find(c.methods.begin(), c.methods.end(), parsed) == c.methods.end()) c.methods.push_back(parsed);
    }
  }
  c.top_candidates = non_negative(doc, "simulation.top_candidates", c.top_candidates);
  c.mirror = doc.get_bool("simulation.mirror").value_or(false);
  c.report_dir = resolve(base_dir, doc.get_string("simulation.report_dir").value_or(""));

  c.detect_threshold = non_negative(doc, "detect.threshold", c.detect_threshold);
  c.detect_max_results = non_negative(doc, "detect.max_results", c.detect_max_results);
  c.detect_top_m = positive(doc, "detect.top_m", c.detect_top_m);

  c.threads = static_cast<unsigned>(non_negative(doc, "run.threads", c.threads));
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  const KvDocument doc = KvDocument::load(path);
  const fs::path base = fs::absolute(path).parent_path();
  return run_config_from_kv(doc, base);
}

KvDocument run_config_to_kv(const RunConfig& c) {
  KvDocument doc;
  const auto i64 = [](std::uint64_t v) { return KvDocument::Value(static_cast<std::int64_t>(v)); };
  doc.set("corpus.dark", c.dark.path.string());
  doc.set("corpus.dark_format", std::string(to_string(c.dark.format)));
  doc.set("corpus.clean", c.clean.path.string());
  doc.set("corpus.clean_format", std::string(to_string(c.clean.format)));
  doc.set("corpus.workspace", c.workspace.string());

  doc.set("pipeline.lowercase", c.pipeline.lowercase);
  doc.set("pipeline.strip_punctuation", c.pipeline.strip_punctuation);
  doc.set("pipeline.stemmer", std::string(to_string(c.pipeline.stemmer)));
  doc.set("pipeline.min_token_length", i64(c.pipeline.min_token_length));
  if (c.pipeline.stopwords == default_stopwords()) {
    doc.set("pipeline.stopwords", std::string("default"));
  } else {
    doc.set("pipeline.stopwords", KvDocument::StringList(c.pipeline.stopwords.begin(), c.pipeline.stopwords.end()));
  }

  doc.set("vocabulary.size", i64(c.vocab_size));
  doc.set("context.window", i64(c.window));
  doc.set("context.smoothing", std::string(to_string(c.smoothing.kind)));
  doc.set(c.smoothing.kind == Smoothing::Kind::laplace ? "context.alpha" : "context.mu", c.smoothing.param);
  doc.set("context.min_clean_freq", i64(c.min_clean_freq));

  doc.set("embedding.dim", i64(c.embedding_dim));
  doc.set("embedding.window", i64(c.embedding_window));
  doc.set("embedding.seed", i64(c.embedding_seed));
  doc.set("embedding.neighborhood", i64(c.neighborhood));

  doc.set("simulation.seed", i64(c.simulation_seed));
  doc.set("simulation.n_dark_words", i64(c.n_dark_words));
  doc.set("simulation.min_word_freq", i64(c.min_word_freq));
  doc.set("simulation.split_fraction", c.split_fraction);
  KvDocument::StringList methods;
  for (Method m : c.methods) methods.emplace_back(to_string(m));
  doc.set("simulation.methods", methods);
  doc.set("simulation.top_candidates", i64(c.top_candidates));
  doc.set("simulation.mirror", c.mirror);
  doc.set("simulation.report_dir", c.report_dir.string());

  doc.set("detect.threshold", i64(c.detect_threshold));
  doc.set("detect.max_results", i64(c.detect_max_results));
  doc.set("detect.top_m", i64(c.detect_top_m));
  doc.set("run.threads", i64(c.threads));
  return doc;
}

}  // namespace jargon
