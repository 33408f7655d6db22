#include "jargon/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "jargon/error.hpp"
#include "jargon/hashing.hpp"

namespace jargon {

namespace {

constexpr std::string_view kVocabMagic = "jargon-vocab";
constexpr std::string_view kVocabVersion = "v1";

std::uint64_t parse_u64(std::string_view text, const std::string& where) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError(where + ": expected an unsigned integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return parts;
}

}  // namespace

std::uint64_t FrequencyTable::count(const std::string& word) const {
  auto it = counts.find(word);
  return it == counts.end() ? 0 : it->second;
}

FrequencyTable count_frequencies(std::span<const Corpus* const> corpora) {
  FrequencyTable table;
  if (corpora.empty()) return table;
  const std::uint64_t expected = corpora.front()->provenance.pipeline_fingerprint;
  for (const Corpus* corpus : corpora) {
    if (corpus->provenance.pipeline_fingerprint != expected) {
      throw MismatchError("corpora were preprocessed with different pipeline configs ('" +
                          corpora.front()->provenance.source + "' vs '" + corpus->provenance.source + "')");
    }
    for (const auto& doc : corpus->docs) {
      for (const auto& token : doc.tokens) ++table.counts[token];
      table.total += doc.tokens.size();
    }
  }
  return table;
}

FrequencyTable count_frequencies(const Corpus& corpus) {
  const Corpus* one[] = {&corpus};
  return count_frequencies(one);
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> frequencies, std::size_t n,
                       std::set<std::string> forced)
    : words_(std::move(words)), frequencies_(std::move(frequencies)), forced_(std::move(forced)), n_(n) {
  if (words_.size() != frequencies_.size()) throw InvalidArgument("vocabulary words/frequencies size mismatch");
  Fingerprinter fp;
  fp.add_u64(words_.size());
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw InvalidArgument("duplicate vocabulary word '" + words_[i] + "'");
    }
    fp.add_field(words_[i]);
  }
  fingerprint_ = fp.value();

  std::vector<WordId> order(words_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<WordId>(i);
  std::sort(order.begin(), order.end(), [&](WordId a, WordId b) { return words_[a] < words_[b]; });
  lexical_rank_.resize(words_.size());
  for (std::size_t r = 0; r < order.size(); ++r) lexical_rank_[order[r]] = static_cast<std::uint32_t>(r);
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::id(std::string_view word) const {
  if (auto found = find(word)) return *found;
  throw UnknownWord(std::string(word));
}

Vocabulary build_vocab(const FrequencyTable& freq, std::size_t n, const std::set<std::string>& forced) {
  if (n == 0) throw InvalidArgument("vocabulary size N must be >= 1");
  using Entry = std::pair<const std::string*, std::uint64_t>;
  const auto by_rank = [](const Entry& a, const Entry& b) {
    return a.second != b.second ? a.second > b.second : *a.first < *b.first;
  };

  std::vector<Entry> entries;
  entries.reserve(freq.counts.size());
  for (const auto& [word, count] : freq.counts) {
    if (count > 0) entries.emplace_back(&word, count);
  }
  const std::size_t keep = std::min(n, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(), by_rank);
  entries.resize(keep);

  std::set<std::string> top;
  for (const auto& e : entries) top.insert(*e.first);
  std::vector<Entry> extra;
  for (const auto& word : forced) {
    if (!top.count(word)) extra.emplace_back(&word, freq.count(word));
  }
  std::sort(extra.begin(), extra.end(), by_rank);

  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(entries.size() + extra.size());
  for (const auto* list : {&entries, &extra}) {
    for (const auto& [word, count] : *list) {
      words.push_back(*word);
      counts.push_back(count);
    }
  }
  return Vocabulary(std::move(words), std::move(counts), n, forced);
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path, std::uint64_t build_fingerprint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write vocabulary: " + path.string());
  out << kVocabMagic << '\t' << kVocabVersion << "\tN=" << vocab.configured_size() << "\tcount=" << vocab.size()
      << "\tbuild=" << to_hex(build_fingerprint) << '\n';
  for (WordId i = 0; i < vocab.size(); ++i) {
    const auto& w = vocab.word(i);
    out << w << '\t' << vocab.frequency(i);
    if (vocab.forced().count(w)) out << "\tforced";
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Vocabulary load_vocabulary(const std::filesystem::path& path, std::uint64_t* build_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read vocabulary: " + path.string());
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw FormatError(where + ": empty vocabulary file");
  const auto header = split_tabs(line);
  if (header.size() != 5 || header[0] != kVocabMagic) throw FormatError(where + ": not a vocabulary file");
  if (header[1] != kVocabVersion) throw FormatError(where + ": unsupported vocabulary version " + std::string(header[1]));
  if (!header[2].starts_with("N=") || !header[3].starts_with("count=") || !header[4].starts_with("build=")) {
    throw FormatError(where + ": malformed vocabulary header");
  }
  const std::uint64_t n = parse_u64(header[2].substr(2), where);
  const std::uint64_t count = parse_u64(header[3].substr(6), where);
  const std::uint64_t build = from_hex(header[4].substr(6));

  std::vector<std::string> words;
  std::vector<std::uint64_t> freqs;
  std::set<std::string> forced;
  words.reserve(count);
  freqs.reserve(count);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string at = where + ":" + std::to_string(line_no);
    const auto parts = split_tabs(line);
    if (parts.size() < 2 || parts.size() > 3 || parts[0].empty()) throw FormatError(at + ": malformed entry");
    if (parts.size() == 3) {
      if (parts[2] != "forced") throw FormatError(at + ": unknown flag '" + std::string(parts[2]) + "'");
      forced.emplace(parts[0]);
    }
    words.emplace_back(parts[0]);
    freqs.push_back(parse_u64(parts[1], at));
  }
  if (words.size() != count) {
    throw FormatError(where + ": header says " + std::to_string(count) + " entries, found " +
                      std::to_string(words.size()));
  }
  if (build_fingerprint) *build_fingerprint = build;
  return Vocabulary(std::move(words), std::move(freqs), n, std::move(forced));
}

}  // namespace jargon
