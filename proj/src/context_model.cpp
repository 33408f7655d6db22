#include "jargon/context_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jargon/error.hpp"
#include "jargon/parallel.hpp"

namespace jargon {

namespace {

// Open-addressing counter keyed by (center << 32 | neighbor). Keys are
// offset by one so 0 marks an empty slot.
class PairCounter {
 public:
  PairCounter() { rehash(1 << 12); }

  void add(WordId center, WordId neighbor) {
    const std::uint64_t key = ((std::uint64_t{center} << 32) | neighbor) + 1;
    std::size_t slot = mix(key) & mask_;
    for (;;) {
      if (keys_[slot] == key) {
        ++values_[slot];
        return;
      }
      if (keys_[slot] == 0) break;
      slot = (slot + 1) & mask_;
    }
    keys_[slot] = key;
    values_[slot] = 1;
    if (++size_ * 2 > keys_.size()) rehash(keys_.size() * 2);
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] != 0) fn(keys_[i] - 1, values_[i]);
    }
  }

  std::size_t size() const noexcept { return size_; }

 private:
  static std::uint64_t mix(std::uint64_t x) noexcept {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
  }

  void rehash(std::size_t capacity) {
    std::vector<std::uint64_t> old_keys(capacity, 0);
    std::vector<std::uint64_t> old_values(capacity, 0);
    old_keys.swap(keys_);
    old_values.swap(values_);
    mask_ = capacity - 1;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == 0) continue;
      std::size_t slot = mix(old_keys[i]) & mask_;
      while (keys_[slot] != 0) slot = (slot + 1) & mask_;
      keys_[slot] = old_keys[i];
      values_[slot] = old_values[i];
    }
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> values_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

constexpr WordId kNoWord = static_cast<WordId>(-1);

void ensure_same_vocab(const ContextDistribution& a, const ContextDistribution& b) {
  if (a.vocab().fingerprint() != b.vocab().fingerprint() || a.size() != b.size()) {
    throw MismatchError("context models were built over different vocabularies");
  }
}

}  // namespace

std::uint64_t SparseCounts::at(WordId row, WordId column) const {
  const auto cols = row_columns(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), column);
  if (it == cols.end() || *it != column) return 0;
  return values[offsets[row] + static_cast<std::size_t>(it - cols.begin())];
}

SparseCounts scan_windows(const Corpus& corpus, const Vocabulary& vocab, std::size_t window, unsigned threads) {
  const std::size_t n_docs = corpus.docs.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n_docs));
  std::vector<PairCounter> shards(workers);
  const std::size_t chunk = n_docs == 0 ? 0 : (n_docs + workers - 1) / workers;

  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t first, std::size_t last) {
    std::vector<WordId> ids;
    for (std::size_t s = first; s < last; ++s) {
      PairCounter& counter = shards[s];
      const std::size_t begin = s * chunk;
      const std::size_t end = std::min(n_docs, begin + chunk);
      for (std::size_t d = begin; d < end; ++d) {
        const auto& tokens = corpus.docs[d].tokens;
        ids.resize(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) ids[i] = vocab.find(tokens[i]).value_or(kNoWord);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (ids[i] == kNoWord) continue;
          const std::size_t lo = i >= window ? i - window : 0;
          const std::size_t hi = std::min(ids.size(), i + window + 1);
          for (std::size_t j = lo; j < hi; ++j) {
            if (j != i && ids[j] != kNoWord) counter.add(ids[i], ids[j]);
          }
        }
      }
    }
  });

  std::size_t total = 0;
  for (const auto& shard : shards) total += shard.size();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;
  entries.reserve(total);
  for (const auto& shard : shards) {
    shard.for_each([&](std::uint64_t key, std::uint64_t count) { entries.emplace_back(key, count); });
  }
  std::sort(entries.begin(), entries.end());

  SparseCounts out;
  out.offsets.assign(vocab.size() + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    const std::uint64_t key = entries[i].first;
    std::uint64_t count = 0;
    for (; i < entries.size() && entries[i].first == key; ++i) count += entries[i].second;
    const auto row = static_cast<WordId>(key >> 32);
    out.columns.push_back(static_cast<WordId>(key & 0xffffffffULL));
    out.values.push_back(count);
    ++out.offsets[row + 1];
  }
  std::partial_sum(out.offsets.begin(), out.offsets.end(), out.offsets.begin());
  return out;
}

ContextCounts build_context_counts(const Corpus& corpus, std::shared_ptr<const Vocabulary> vocab, std::size_t window,
                                   unsigned threads) {
  if (window == 0) throw InvalidArgument("context window must be >= 1");
  if (!vocab) throw InvalidArgument("no vocabulary");
  ContextCounts out;
  out.window = window;
  out.counts = scan_windows(corpus, *vocab, window, threads);
  out.totals.assign(vocab->size(), 0);
  out.occurrences.assign(vocab->size(), 0);
  for (WordId w = 0; w < vocab->size(); ++w) {
    for (auto c : out.counts.row_values(w)) out.totals[w] += c;
  }
  for (const auto& doc : corpus.docs) {
    for (const auto& token : doc.tokens) {
      if (auto id = vocab->find(token)) ++out.occurrences[*id];
    }
  }
  out.vocab = std::move(vocab);
  return out;
}

void Smoothing::validate() const {
  if (!(param > 0.0) || !std::isfinite(param)) {
    throw InvalidArgument(std::string(kind == Kind::laplace ? "laplace alpha" : "dirichlet mu") +
                          " must be a positive number");
  }
}

std::string_view to_string(Smoothing::Kind kind) {
  return kind == Smoothing::Kind::laplace ? "laplace" : "dirichlet";
}

Smoothing::Kind parse_smoothing_kind(std::string_view name) {
  if (name == "laplace") return Smoothing::Kind::laplace;
  if (name == "dirichlet") return Smoothing::Kind::dirichlet;
  throw InvalidArgument("unknown smoothing '" + std::string(name) + "' (expected laplace or dirichlet)");
}

ContextDistribution::ContextDistribution(std::shared_ptr<const ContextCounts> counts, Smoothing smoothing,
                                         CorpusSide side)
    : counts_(std::move(counts)), smoothing_(smoothing), side_(side) {
  if (!counts_ || !counts_->vocab) throw InvalidArgument("context distribution needs counts and a vocabulary");
  smoothing_.validate();
  const std::size_t n = counts_->vocab->size();
  if (counts_->counts.rows() != n || counts_->totals.size() != n) {
    throw MismatchError("context counts do not match the vocabulary size");
  }
  if (n == 0) throw InvalidArgument("empty vocabulary");
  if (smoothing_.kind == Smoothing::Kind::laplace) {
    mass_ = smoothing_.param * static_cast<double>(n);
    background_.assign(n, 1.0 / static_cast<double>(n));
  } else {
    mass_ = smoothing_.param;
    std::vector<std::uint64_t> column_sums(n, 0);
    std::uint64_t grand = 0;
    for (std::size_t i = 0; i < counts_->counts.nnz(); ++i) {
      column_sums[counts_->counts.columns[i]] += counts_->counts.values[i];
      grand += counts_->counts.values[i];
    }
    background_.resize(n);
    const double denom = static_cast<double>(grand) + static_cast<double>(n);
    for (std::size_t v = 0; v < n; ++v) background_[v] = (static_cast<double>(column_sums[v]) + 1.0) / denom;
  }
}

double ContextDistribution::probability(WordId w, WordId v) const {
  const double c = static_cast<double>(counts_->counts.at(w, v));
  return (c + mass_ * background_.at(v)) / (static_cast<double>(counts_->totals.at(w)) + mass_);
}

std::vector<double> ContextDistribution::dense(WordId w) const {
  const double denom = static_cast<double>(counts_->totals.at(w)) + mass_;
  std::vector<double> p(background_.size());
  for (std::size_t v = 0; v < p.size(); ++v) p[v] = mass_ * background_[v] / denom;
  const auto cols = counts_->counts.row_columns(w);
  const auto vals = counts_->counts.row_values(w);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    p[cols[i]] = (static_cast<double>(vals[i]) + mass_ * background_[cols[i]]) / denom;
  }
  return p;
}

ContextDistribution smooth(std::shared_ptr<const ContextCounts> counts, Smoothing smoothing, CorpusSide side) {
  return ContextDistribution(std::move(counts), smoothing, side);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("kl_divergence: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !(q[i] > 0.0)) throw InvalidArgument("kl_divergence: zero entry (unsmoothed input?)");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double kl_divergence(const ContextDistribution& p_model, WordId p_word, const ContextDistribution& q_model,
                     WordId q_word) {
  ensure_same_vocab(p_model, q_model);
  const auto& pc = p_model.counts();
  const auto& qc = q_model.counts();
  const double mp = p_model.mass();
  const double mq = q_model.mass();
  const double dp = static_cast<double>(pc.totals.at(p_word)) + mp;
  const double dq = static_cast<double>(qc.totals.at(q_word)) + mq;
  const double lambda_p = mp / dp;
  const double lambda_q = mq / dq;
  const auto bg_p = p_model.background();
  const auto bg_q = q_model.background();

  // Start from the all-background sum, then correct it on the support.
  double background_div = 0.0;
  const bool same_background = (p_model.uniform_background() && q_model.uniform_background()) ||
                               std::equal(bg_p.begin(), bg_p.end(), bg_q.begin(), bg_q.end());
  if (!same_background) {
    for (std::size_t v = 0; v < bg_p.size(); ++v) background_div += bg_p[v] * std::log(bg_p[v] / bg_q[v]);
  }
  double sum = lambda_p * std::log(lambda_p / lambda_q) + lambda_p * background_div;

  const auto pcols = pc.counts.row_columns(p_word);
  const auto pvals = pc.counts.row_values(p_word);
  const auto qcols = qc.counts.row_columns(q_word);
  const auto qvals = qc.counts.row_values(q_word);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pcols.size() || j < qcols.size()) {
    WordId v;
    double cp = 0.0;
    double cq = 0.0;
    if (j == qcols.size() || (i < pcols.size() && pcols[i] < qcols[j])) {
      v = pcols[i];
      cp = static_cast<double>(pvals[i++]);
    } else if (i == pcols.size() || qcols[j] < pcols[i]) {
      v = qcols[j];
      cq = static_cast<double>(qvals[j++]);
    } else {
      v = pcols[i];
      cp = static_cast<double>(pvals[i++]);
      cq = static_cast<double>(qvals[j++]);
    }
    const double bp = mp * bg_p[v] / dp;
    const double bq = mq * bg_q[v] / dq;
    const double p = (cp + mp * bg_p[v]) / dp;
    const double q = (cq + mq * bg_q[v]) / dq;
    sum += p * std::log(p / q) - bp * std::log(bp / bq);
  }
  return sum;
}

KlRanker::KlRanker(const ContextDistribution& dark, const ContextDistribution& clean, std::uint64_t min_clean_freq,
                   double log_base)
    : dark_(&dark), clean_(&clean) {
  ensure_same_vocab(dark, clean);
  if (dark.smoothing().kind != clean.smoothing().kind) {
    throw MismatchError("dark and clean models use different smoothing families");
  }
  if (!(log_base > 0.0) || log_base == 1.0) throw InvalidArgument("log base must be positive and != 1");
  scale_ = 1.0 / std::log(log_base);

  const auto& cc = clean.counts();
  const auto bg = clean.background();
  const double m = clean.mass();
  log_background_.resize(bg.size());
  for (std::size_t v = 0; v < bg.size(); ++v) log_background_[v] = std::log(bg[v]);

  offsets_.push_back(0);
  for (WordId w = 0; w < cc.occurrences.size(); ++w) {
    if (cc.occurrences[w] < min_clean_freq || cc.occurrences[w] == 0) continue;
    candidates_.push_back(w);
    log_norm_.push_back(std::log(m) - std::log(static_cast<double>(cc.totals[w]) + m));
    const auto cols = cc.counts.row_columns(w);
    const auto vals = cc.counts.row_values(w);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      columns_.push_back(cols[i]);
      delta_.push_back(std::log1p(static_cast<double>(vals[i]) / (m * bg[cols[i]])));
    }
    offsets_.push_back(columns_.size());
  }
}

std::vector<ScoredWord> KlRanker::score(WordId query) const {
  const std::vector<double> p = dark_->dense(query);
  double neg_entropy = 0.0;
  double background_cross = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    neg_entropy += p[v] * std::log(p[v]);
    background_cross += p[v] * log_background_[v];
  }
  std::vector<ScoredWord> out(candidates_.size());
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    double dot = 0.0;
    for (std::size_t i = offsets_[c]; i < offsets_[c + 1]; ++i) dot += p[columns_[i]] * delta_[i];
    const double kl = neg_entropy - (log_norm_[c] + background_cross + dot);
    out[c] = {candidates_[c], std::max(0.0, kl) * scale_};
  }
  return out;
}

RankedMapping KlRanker::rank(WordId query) const {
  return make_ranking(vocab().word(query), score(query), vocab());
}

RankedMapping KlRanker::rank(std::string_view query) const {
  return rank(vocab().id(query));
}

std::optional<std::size_t> KlRanker::self_rank(WordId query) const {
  const auto scored = score(query);
  const auto self = std::find_if(scored.begin(), scored.end(), [&](const ScoredWord& s) { return s.word == query; });
  if (self == scored.end()) return std::nullopt;
  std::size_t before = 0;
  for (const auto& s : scored) {
    if (ranks_before(s, *self, vocab())) ++before;
  }
  return before + 1;
}

RankedMapping rank_by_kl(std::string_view query, const ContextDistribution& dark, const ContextDistribution& clean,
                         std::uint64_t min_clean_freq, double log_base) {
  const WordId id = dark.vocab().id(query);
  return KlRanker(dark, clean, min_clean_freq, log_base).rank(id);
}

std::vector<DetectedWord> detect_candidates(const ContextDistribution& dark, const ContextDistribution& clean,
                                            std::size_t self_rank_threshold, std::size_t max_results,
                                            std::uint64_t min_freq, unsigned threads) {
  const KlRanker ranker(dark, clean, min_freq);
  std::vector<WordId> queries;
  const auto& occurrences = dark.counts().occurrences;
  for (WordId w = 0; w < occurrences.size(); ++w) {
    if (occurrences[w] >= min_freq) queries.push_back(w);
  }
  std::vector<std::optional<std::size_t>> ranks(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) ranks[i] = ranker.self_rank(queries[i]);
  });

  std::vector<DetectedWord> out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!ranks[i] || *ranks[i] > self_rank_threshold) out.push_back({queries[i], ranks[i]});
  }
  const auto& vocab = dark.vocab();
  std::sort(out.begin(), out.end(), [&](const DetectedWord& a, const DetectedWord& b) {
    if (a.self_rank.has_value() != b.self_rank.has_value()) return !a.self_rank.has_value();
    if (a.self_rank && *a.self_rank != *b.self_rank) return *a.self_rank > *b.self_rank;
    return vocab.lexical_rank(a.word) < vocab.lexical_rank(b.word);
  });
  if (out.size() > max_results) out.resize(max_results);
  return out;
}

}  // namespace jargon
