#include "jargon/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "jargon/error.hpp"
#include "jargon/hashing.hpp"

namespace jargon {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kContextMagic{"JRGNCTX\0", 8};
constexpr std::string_view kEmbeddingMagic{"JRGNEMB\0", 8};
constexpr std::uint32_t kFormatVersion = 1;

class ByteWriter {
 public:
  void bytes(std::string_view b) { buf_.append(b); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  const std::string& data() const noexcept { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string data, std::string where) : data_(std::move(data)), where_(std::move(where)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = std::string_view(data_).substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  bool at_end() const noexcept { return pos_ == data_.size(); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  [[noreturn]] void fail(const std::string& what) const { throw FormatError(where_ + ": " + what); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated file");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(data_[pos_ + i])} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string data_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file, then rename over the target.
void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

ArtifactHeader read_header(ByteReader& in, std::string_view magic) {
  if (in.bytes(8) != magic) in.fail("bad magic, not a " + std::string(magic == kContextMagic ? "context" : "embedding") + " file");
  const std::uint32_t version = in.u32();
  if (version != kFormatVersion) in.fail("unsupported format version " + std::to_string(version));
  ArtifactHeader h;
  h.vocab_fingerprint = in.u64();
  h.build_fingerprint = in.u64();
  return h;
}

CorpusSide read_side(ByteReader& in) {
  const auto side = in.u8();
  if (side > 1) in.fail("bad corpus side tag");
  return static_cast<CorpusSide>(side);
}

void check_vocab(const ArtifactHeader& h, const Vocabulary& vocab, const fs::path& path) {
  if (h.vocab_fingerprint != vocab.fingerprint()) {
    throw MismatchError(path.string() + " was built over a different vocabulary");
  }
}

std::uint64_t vocab_file_build(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const auto pos = line.rfind("\tbuild=");
  if (pos == std::string::npos) throw FormatError(path.string() + ": not a vocabulary file");
  return from_hex(std::string_view(line).substr(pos + 7));
}

std::uint64_t artifact_build(const fs::path& path) {
  if (path.extension() == ".tsv") return vocab_file_build(path);
  return read_artifact_header(path).build_fingerprint;
}

// Exclusive workspace lock, released on scope exit.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(fs::path path) : path_(std::move(path)) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        throw IoError("workspace is locked by another build (remove " + path_.string() + " if no build is running)");
      }
      throw IoError("cannot create lock file " + path_.string() + ": " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~WorkspaceLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  fs::path path_;
};

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names = {Workspace::kVocab, Workspace::kDarkContext, Workspace::kCleanContext,
                                                 Workspace::kDarkEmbedding, Workspace::kCleanEmbedding};
  return names;
}

std::optional<std::map<std::string, std::uint64_t>> read_manifest(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_all(path));
    if (doc.at("format") != "jargon-workspace") return std::nullopt;
    std::map<std::string, std::uint64_t> out;
    for (const auto& [name, entry] : doc.at("artifacts").items()) {
      out[name] = from_hex(entry.at("fingerprint").get<std::string>());
    }
    return out;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  } catch (const FormatError&) {
    return std::nullopt;
  }
}

template <class Fn>
auto as_stale(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const MismatchError& e) {
    throw StaleWorkspace(e.what());
  } catch (const FormatError& e) {
    throw StaleWorkspace(e.what());
  }
}

template <class Fn>
auto in_stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  const auto tag = [&](const std::exception& e) { return "[" + std::string(name) + "] " + e.what(); };
  try {
    return fn();
  } catch (const IoError& e) {
    throw IoError(tag(e));
  } catch (const FormatError& e) {
    throw FormatError(tag(e));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(tag(e));
  } catch (const MismatchError& e) {
    throw MismatchError(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

}  // namespace

void save_context(const ContextDistribution& model, const fs::path& path, std::uint64_t build_fingerprint) {
  const auto& c = model.counts();
  ByteWriter out;
  out.bytes(kContextMagic);
  out.u32(kFormatVersion);
  out.u64(model.vocab().fingerprint());
  out.u64(build_fingerprint);
  out.u64(c.window);
  out.u8(static_cast<std::uint8_t>(model.smoothing().kind));
  out.u8(static_cast<std::uint8_t>(model.side()));
  out.f64(model.smoothing().param);
  out.u64(model.size());
  for (WordId w = 0; w < model.size(); ++w) {
    const auto cols = c.counts.row_columns(w);
    const auto vals = c.counts.row_values(w);
    out.u32(w);
    out.u64(c.totals[w]);
    out.u64(c.occurrences[w]);
    out.u64(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out.u32(cols[i]);
      out.u64(vals[i]);
    }
  }
  write_atomic(path, out.data());
}

ContextDistribution load_context(const fs::path& path, std::shared_ptr<const Vocabulary> vocab,
                                 std::uint64_t* build_fingerprint) {
  if (!vocab) throw InvalidArgument("no vocabulary");
  ByteReader in(read_all(path), path.string());
  const ArtifactHeader header = read_header(in, kContextMagic);
  check_vocab(header, *vocab, path);
  auto counts = std::make_shared<ContextCounts>();
  counts->window = in.u64();
  const auto kind = in.u8();
  if (kind > 1) in.fail("bad smoothing tag");
  const CorpusSide side = read_side(in);
  const Smoothing smoothing{static_cast<Smoothing::Kind>(kind), in.f64()};
  const std::uint64_t n = in.u64();
  if (n != vocab->size()) in.fail("row count does not match the vocabulary");

  counts->totals.resize(n);
  counts->occurrences.resize(n);
  counts->counts.offsets.assign(n + 1, 0);
  for (std::uint64_t w = 0; w < n; ++w) {
    if (in.u32() != w) in.fail("rows out of order");
    counts->totals[w] = in.u64();
    counts->occurrences[w] = in.u64();
    const std::uint64_t entries = in.u64();
    if (entries > n || entries * 12 > in.remaining()) in.fail("bad entry count");
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < entries; ++i) {
      const std::uint32_t col = in.u32();
      if (col >= n || (i > 0 && col <= counts->counts.columns.back())) in.fail("bad column id");
      counts->counts.columns.push_back(col);
      counts->counts.values.push_back(in.u64());
      sum += counts->counts.values.back();
    }
    if (sum != counts->totals[w]) in.fail("row total does not match its entries");
    counts->counts.offsets[w + 1] = counts->counts.columns.size();
  }
  if (!in.at_end()) in.fail("trailing bytes");
  counts->vocab = std::move(vocab);
  if (build_fingerprint) *build_fingerprint = header.build_fingerprint;
  return ContextDistribution(std::move(counts), smoothing, side);
}

void save_embedding(const EmbeddingMatrix& emb, const fs::path& path, std::uint64_t build_fingerprint) {
  ByteWriter out;
  out.bytes(kEmbeddingMagic);
  out.u32(kFormatVersion);
  out.u64(emb.vocab->fingerprint());
  out.u64(build_fingerprint);
  out.u64(emb.dim);
  out.u64(emb.seed);
  out.u64(emb.window);
  out.u8(static_cast<std::uint8_t>(emb.side));
  out.u64(emb.rows());
  for (double v : emb.data) out.f64(v);
  for (std::size_t r = 0; r < emb.rows(); ++r) out.u64(r < emb.frequencies.size() ? emb.frequencies[r] : 0);
  write_atomic(path, out.data());
}

EmbeddingMatrix load_embedding(const fs::path& path, std::shared_ptr<const Vocabulary> vocab,
                               std::uint64_t* build_fingerprint) {
  if (!vocab) throw InvalidArgument("no vocabulary");
  ByteReader in(read_all(path), path.string());
  const ArtifactHeader header = read_header(in, kEmbeddingMagic);
  check_vocab(header, *vocab, path);
  EmbeddingMatrix emb;
  emb.dim = in.u64();
  emb.seed = in.u64();
  emb.window = in.u64();
  emb.side = read_side(in);
  const std::uint64_t rows = in.u64();
  if (rows != vocab->size()) in.fail("row count does not match the vocabulary");
  if (emb.dim == 0 || rows * emb.dim * 8 + rows * 8 != in.remaining()) in.fail("size does not match the header");
  emb.data.resize(rows * emb.dim);
  for (auto& v : emb.data) v = in.f64();
  emb.frequencies.resize(rows);
  for (auto& f : emb.frequencies) f = in.u64();
  emb.vocab = std::move(vocab);
  if (build_fingerprint) *build_fingerprint = header.build_fingerprint;
  return emb;
}

ArtifactHeader read_artifact_header(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read " + path.string());
  std::string head(28, '\0');
  file.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(file.gcount()));
  ByteReader in(head, path.string());
  const auto magic = head.substr(0, std::min<std::size_t>(8, head.size()));
  return read_header(in, magic == kEmbeddingMagic ? kEmbeddingMagic : kContextMagic);
}

fs::path resolve_workspace(const fs::path& fallback) {
  if (const char* env = std::getenv(kWorkspaceEnv); env && *env) return fs::path(env);
  return fallback;
}

std::vector<Workspace::BuildStatus> Workspace::build(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.dark.path.empty() || config.clean.path.empty()) {
    throw InvalidArgument("config must name both corpus.dark and corpus.clean");
  }
  if (dir_.empty()) throw InvalidArgument("no workspace directory (set corpus.workspace or " +
                                          std::string(kWorkspaceEnv) + ")");
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create workspace " + dir_.string() + ": " + ec.message());
  const WorkspaceLock lock(dir_ / kLock);

  const auto [dark_raw, clean_raw] = in_stage("ingest", [&] {
    return std::make_pair(load_corpus(config.dark.path, config.dark.format),
                          load_corpus(config.clean.path, config.clean.format));
  });

  Fingerprinter vfp;
  vfp.add_field("vocab-v1");
  vfp.add_u64(content_fingerprint(dark_raw)).add_field(to_string(config.dark.format));
  vfp.add_u64(content_fingerprint(clean_raw)).add_field(to_string(config.clean.format));
  vfp.add_u64(config.pipeline.fingerprint()).add_u64(config.vocab_size);
  const std::uint64_t vocab_fp = vfp.value();
  const auto ctx_fp = [&](CorpusSide side) {
    Fingerprinter fp;
    fp.add_field("ctx-v1").add_u64(vocab_fp).add_field(to_string(side)).add_u64(config.window);
    fp.add_field(to_string(config.smoothing.kind)).add_field(format_double(config.smoothing.param));
    return fp.value();
  };
  const auto emb_fp = [&](CorpusSide side) {
    Fingerprinter fp;
    fp.add_field("emb-v1").add_u64(vocab_fp).add_field(to_string(side)).add_u64(config.embedding_window);
    fp.add_u64(config.embedding_dim).add_u64(config.embedding_seed);
    return fp.value();
  };
  const std::map<std::string, std::uint64_t> expected = {
      {kVocab, vocab_fp},
      {kDarkContext, ctx_fp(CorpusSide::dark)},
      {kCleanContext, ctx_fp(CorpusSide::clean)},
      {kDarkEmbedding, emb_fp(CorpusSide::dark)},
      {kCleanEmbedding, emb_fp(CorpusSide::clean)},
  };

  const auto manifest = read_manifest(dir_ / kManifest);
  const auto up_to_date = [&](const std::string& name) {
    if (!manifest) return false;
    const auto it = manifest->find(name);
    if (it == manifest->end() || it->second != expected.at(name)) return false;
    try {
      return artifact_build(dir_ / name) == expected.at(name);
    } catch (const Error&) {
      return false;
    }
  };

  std::optional<std::pair<Corpus, Corpus>> corpora;
  const auto preprocessed = [&]() -> const std::pair<Corpus, Corpus>& {
    if (!corpora) {
      corpora = in_stage("preprocess", [&] {
        return std::make_pair(preprocess_corpus(dark_raw, config.pipeline, config.dark.path.string(), config.threads),
                              preprocess_corpus(clean_raw, config.pipeline, config.clean.path.string(),
                                                config.threads));
      });
    }
    return *corpora;
  };

  std::vector<BuildStatus> statuses;
  const auto report = [&](const std::string& name, bool rebuilt) {
    statuses.push_back({name, rebuilt});
    log << name << '\t' << (rebuilt ? "built" : "up to date") << '\n';
  };

  std::shared_ptr<const Vocabulary> vocab;
  if (up_to_date(kVocab)) {
    vocab = std::make_shared<const Vocabulary>(load_vocabulary(dir_ / kVocab));
    report(kVocab, false);
  } else {
    vocab = in_stage("vocabulary", [&] {
      const auto& [dark, clean] = preprocessed();
      const Corpus* both[] = {&dark, &clean};
      auto v = std::make_shared<const Vocabulary>(build_vocab(count_frequencies(both), config.vocab_size));
      save_vocabulary(*v, dir_ / kVocab, vocab_fp);
      return v;
    });
    report(kVocab, true);
  }

  for (const CorpusSide side : {CorpusSide::dark, CorpusSide::clean}) {
    const std::string name = side == CorpusSide::dark ? kDarkContext : kCleanContext;
    if (up_to_date(name)) {
      report(name, false);
      continue;
    }
    in_stage("context", [&] {
      const Corpus& corpus = side == CorpusSide::dark ? preprocessed().first : preprocessed().second;
      auto counts = std::make_shared<const ContextCounts>(
          build_context_counts(corpus, vocab, config.window, config.threads));
      save_context(smooth(counts, config.smoothing, side), dir_ / name, expected.at(name));
    });
    report(name, true);
  }

  for (const CorpusSide side : {CorpusSide::dark, CorpusSide::clean}) {
    const std::string name = side == CorpusSide::dark ? kDarkEmbedding : kCleanEmbedding;
    if (up_to_date(name)) {
      report(name, false);
      continue;
    }
    in_stage("embedding", [&] {
      const Corpus& corpus = side == CorpusSide::dark ? preprocessed().first : preprocessed().second;
      const auto emb = build_embedding(corpus, vocab, side, config.embedding_window, config.embedding_dim,
                                       config.embedding_seed, config.threads);
      save_embedding(emb, dir_ / name, expected.at(name));
    });
    report(name, true);
  }

  write_atomic(dir_ / kConfigSnapshot, run_config_to_kv(config).serialize());
  nlohmann::ordered_json doc;
  doc["format"] = "jargon-workspace";
  doc["version"] = 1;
  doc["tool_version"] = JARGON_VERSION;
  doc["config_fingerprint"] = to_hex(fingerprint(run_config_to_kv(config).serialize()));
  doc["artifacts"] = nlohmann::ordered_json::object();
  for (const auto& name : artifact_names()) doc["artifacts"][name] = {{"fingerprint", to_hex(expected.at(name))}};
  write_atomic(dir_ / kManifest, doc.dump(2) + "\n");
  return statuses;
}

std::map<std::string, std::uint64_t> Workspace::verify() const {
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) throw StaleWorkspace("workspace does not exist: " + dir_.string());
  const auto manifest = read_manifest(dir_ / kManifest);
  if (!manifest) throw StaleWorkspace("workspace has no valid manifest (run build): " + dir_.string());
  for (const auto& name : artifact_names()) {
    const auto it = manifest->find(name);
    if (it == manifest->end()) throw StaleWorkspace("manifest does not list " + name);
    const fs::path path = dir_ / name;
    if (!fs::exists(path, ec)) throw StaleWorkspace("missing artifact " + path.string());
    std::uint64_t actual = 0;
    try {
      actual = artifact_build(path);
    } catch (const Error& e) {
      throw StaleWorkspace(std::string("unreadable artifact: ") + e.what());
    }
    if (actual != it->second) throw StaleWorkspace(path.string() + " does not match the manifest (rebuild)");
  }
  return *manifest;
}

std::shared_ptr<const Vocabulary> Workspace::load_vocab() const {
  verify();
  return as_stale([&] { return std::make_shared<const Vocabulary>(load_vocabulary(dir_ / kVocab)); });
}

std::pair<ContextDistribution, ContextDistribution> Workspace::load_contexts(
    std::shared_ptr<const Vocabulary> vocab) const {
  verify();
  return as_stale([&] {
    return std::make_pair(load_context(dir_ / kDarkContext, vocab), load_context(dir_ / kCleanContext, vocab));
  });
}

std::pair<EmbeddingMatrix, EmbeddingMatrix> Workspace::load_embeddings(std::shared_ptr<const Vocabulary> vocab) const {
  verify();
  return as_stale([&] {
    return std::make_pair(load_embedding(dir_ / kDarkEmbedding, vocab),
                          load_embedding(dir_ / kCleanEmbedding, vocab));
  });
}

RunConfig Workspace::load_config() const {
  const fs::path path = dir_ / kConfigSnapshot;
  std::error_code ec;
  if (!fs::exists(path, ec)) throw StaleWorkspace("workspace has no config snapshot (run build)");
  return load_run_config(path);
}

}  // namespace jargon
