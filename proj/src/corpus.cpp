#include "jargon/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_map>

#include "jargon/error.hpp"
#include "jargon/hashing.hpp"
#include "jargon/parallel.hpp"
#include "jargon/stemmer.hpp"
#include "jargon/stopwords.hpp"
#include "jargon/utf8.hpp"

namespace jargon {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

std::vector<RawDocument> load_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus file: " + path.string());
  std::vector<RawDocument> docs;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": malformed jsonl line: " + e.what());
    }
    if (!obj.is_object()) throw FormatError(where + ": malformed jsonl line: expected an object");
    const auto id = obj.find("id");
    const auto text = obj.find("text");
    if (id == obj.end() || !id->is_string()) {
      throw FormatError(where + ": malformed jsonl line: missing string field \"id\"");
    }
    if (text == obj.end() || !text->is_string()) {
      throw FormatError(where + ": malformed jsonl line: missing string field \"text\"");
    }
    RawDocument doc{id->get<std::string>(), text->get<std::string>()};
    auto [it, inserted] = seen.emplace(doc.id, line_no);
    if (!inserted) {
      throw FormatError(where + ": duplicate document id \"" + doc.id + "\" (first seen on line " +
                        std::to_string(it->second) + ")");
    }
    docs.push_back(std::move(doc));
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return docs;
}

std::vector<RawDocument> load_plain_dir(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory: " + root.string());
  std::vector<std::pair<std::string, fs::path>> files;
  fs::recursive_directory_iterator it(root, ec), end;
  if (ec) throw IoError("cannot list directory " + root.string() + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot list directory " + root.string() + ": " + ec.message());
    if (it->is_regular_file()) {
      files.emplace_back(fs::relative(it->path(), root).generic_string(), it->path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  docs.reserve(files.size());
  for (auto& [id, path] : files) {
    docs.push_back({id, read_file(path)});
  }
  return docs;
}

char32_t to_lower(char32_t c) noexcept {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0xC0) return c;
  if ((c >= 0xC0 && c <= 0xDE && c != 0xD7)) return c + 32;                // Latin-1
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x138 && c != 0x149 && c != 0x178) {
    // Latin Extended-A alternates upper/lower pairs
    const bool even_upper = !((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E));
    if (even_upper ? (c % 2 == 0) : (c % 2 == 1)) return c + 1;
    return c;
  }
  if (c == 0x178) return 0xFF;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;                // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 32;                              // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

// Strips non-word code points from both ends; the first keep_prefix code
// points are left alone.
void strip_boundaries(std::u32string& token, std::size_t keep_prefix) {
  std::size_t first = keep_prefix;
  std::size_t last = token.size();
  while (first < last && !utf8::is_word_char(token[first])) ++first;
  while (last > first && !utf8::is_word_char(token[last - 1])) --last;
  token = token.substr(0, keep_prefix) + token.substr(first, last - first);
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.stopwords = default_stopwords();
  return cfg;
}

void PipelineConfig::validate() const {
  if (min_token_length < 1) throw InvalidArgument("min_token_length must be >= 1");
}

std::uint64_t PipelineConfig::fingerprint() const {
  Fingerprinter fp;
  fp.add_field("pipeline-v1");
  fp.add_u64(lowercase ? 1 : 0);
  fp.add_u64(strip_punctuation ? 1 : 0);
  fp.add_field(to_string(stemmer));
  fp.add_u64(min_token_length);
  fp.add_u64(stopwords.size());
  for (const auto& w : stopwords) fp.add_field(w);
  return fp.value();
}

std::size_t Corpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.tokens.size();
  return n;
}

std::vector<RawDocument> load_corpus(const fs::path& path, CorpusFormat format) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("corpus path does not exist: " + path.string());
  switch (format) {
    case CorpusFormat::jsonl:
      return load_jsonl(path);
    case CorpusFormat::plain_dir:
      return load_plain_dir(path);
  }
  throw InvalidArgument("unknown corpus format");
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "plain_dir") return CorpusFormat::plain_dir;
  throw InvalidArgument("unknown corpus format '" + std::string(name) + "' (expected jsonl or plain_dir)");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::jsonl ? "jsonl" : "plain_dir";
}

std::string_view to_string(StemmerKind kind) {
  return kind == StemmerKind::none ? "none" : "english_snowball";
}

StemmerKind parse_stemmer_kind(std::string_view name) {
  if (name == "none") return StemmerKind::none;
  if (name == "english_snowball") return StemmerKind::english_snowball;
  throw InvalidArgument("unknown stemmer '" + std::string(name) + "' (expected none or english_snowball)");
}

std::uint64_t content_fingerprint(std::span<const RawDocument> docs) {
  Fingerprinter fp;
  fp.add_u64(docs.size());
  for (const auto& d : docs) {
    fp.add_field(d.id);
    fp.add_field(d.text);
  }
  return fp.value();
}

bool is_dashed(std::string_view token) noexcept {
  return !token.empty() && token.front() == kDashMarker;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const std::u32string cps = utf8::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_whitespace(cps[i])) ++i;
    const std::size_t start = i;
    while (i < cps.size() && !utf8::is_whitespace(cps[i])) ++i;
    if (i > start) tokens.push_back(utf8::encode(std::u32string_view(cps).substr(start, i - start)));
  }
  return tokens;
}

Document preprocess(const RawDocument& doc, const PipelineConfig& cfg) {
  Document out{doc.id, {}};
  for (const auto& raw : tokenize(doc.text)) {
    std::u32string token = utf8::decode(raw);
    if (cfg.lowercase) {
      std::transform(token.begin(), token.end(), token.begin(), to_lower);
    }
    const bool dashed = !token.empty() && token.front() == static_cast<char32_t>(kDashMarker);
    const std::size_t prefix = dashed ? 1 : 0;
    if (cfg.strip_punctuation) strip_boundaries(token, prefix);
    if (token.size() <= prefix) continue;

    std::string word = utf8::encode(token);
    if (cfg.stopwords.count(word)) continue;
    if (cfg.stemmer == StemmerKind::english_snowball) {
      word = dashed ? std::string(1, kDashMarker) + stem_english(std::string_view(word).substr(1))
                    : stem_english(word);
    }
    // The marker does not count towards the length, so "w" and "_w" filter alike.
    const std::size_t length = utf8::decode(word).size() - prefix;
    if (length == 0 || length < cfg.min_token_length) continue;
    out.tokens.push_back(std::move(word));
  }
  return out;
}

Corpus preprocess_corpus(std::span<const RawDocument> docs, const PipelineConfig& cfg, std::string source,
                         unsigned threads) {
  cfg.validate();
  Corpus corpus;
  corpus.provenance = {std::move(source), cfg.fingerprint()};
  corpus.docs.resize(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) corpus.docs[i] = preprocess(docs[i], cfg);
  });
  return corpus;
}

}  // namespace jargon
