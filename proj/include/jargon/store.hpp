#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "jargon/config.hpp"
#include "jargon/context_model.hpp"
#include "jargon/embedding.hpp"
#include "jargon/vocabulary.hpp"

namespace jargon {

/// Identity shared by every binary artifact header.
struct ArtifactHeader {
  std::uint64_t vocab_fingerprint = 0;
  std::uint64_t build_fingerprint = 0;
};

/**
 * Context index, little-endian:
 *   "JRGNCTX\0", u32 version, u64 vocab fingerprint, u64 build fingerprint,
 *   u64 window, u8 smoothing kind, u8 side, f64 smoothing param, u64 |V|,
 *   then per word: u32 id, u64 total, u64 occurrences, u64 n,
 *   n x (u32 id, u64 count).
 */
void save_context(const ContextDistribution& model, const std::filesystem::path& path,
                  std::uint64_t build_fingerprint = 0);
/// Throws MismatchError when the file was built over another vocabulary,
/// FormatError on corrupt or truncated data.
ContextDistribution load_context(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab,
                                 std::uint64_t* build_fingerprint = nullptr);

/**
 * Embedding file, little-endian:
 *   "JRGNEMB\0", u32 version, u64 vocab fingerprint, u64 build fingerprint,
 *   u64 d, u64 seed, u64 window, u8 side, u64 rows, rows x d f64,
 *   rows x u64 corpus frequency.
 */
void save_embedding(const EmbeddingMatrix& emb, const std::filesystem::path& path,
                    std::uint64_t build_fingerprint = 0);
EmbeddingMatrix load_embedding(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab,
                               std::uint64_t* build_fingerprint = nullptr);

/// Reads only the header of a context or embedding file.
ArtifactHeader read_artifact_header(const std::filesystem::path& path);

/// Environment variable that overrides the workspace directory.
inline constexpr const char* kWorkspaceEnv = "JARGON_WORKSPACE";

/**
 * Directory of build artifacts: vocab.tsv, dark.ctx, clean.ctx, dark.emb,
 * clean.emb, plus manifest.json and a snapshot of the config. The manifest
 * records each artifact's build fingerprint; an artifact whose inputs
 * changed gets a new fingerprint and is rebuilt.
 */
class Workspace {
 public:
  static constexpr const char* kVocab = "vocab.tsv";
  static constexpr const char* kDarkContext = "dark.ctx";
  static constexpr const char* kCleanContext = "clean.ctx";
  static constexpr const char* kDarkEmbedding = "dark.emb";
  static constexpr const char* kCleanEmbedding = "clean.emb";
  static constexpr const char* kManifest = "manifest.json";
  static constexpr const char* kConfigSnapshot = "config.toml";
  static constexpr const char* kLock = ".lock";

  explicit Workspace(std::filesystem::path dir) : dir_(std::move(dir)) {}
  const std::filesystem::path& dir() const noexcept { return dir_; }

  struct BuildStatus {
    std::string artifact;
    bool rebuilt = false;
  };
  /// Builds whatever is missing or stale. Holds the workspace lock for the
  /// duration; a concurrent build fails with IoError. Progress goes to `log`.
  std::vector<BuildStatus> build(const RunConfig& config, std::ostream& log);

  /// Artifact name -> build fingerprint. Throws StaleWorkspace when the
  /// manifest is missing or an artifact is absent or disagrees with it.
  std::map<std::string, std::uint64_t> verify() const;

  /// Loaders; each verifies first and converts mismatches to StaleWorkspace.
  std::shared_ptr<const Vocabulary> load_vocab() const;
  std::pair<ContextDistribution, ContextDistribution> load_contexts(std::shared_ptr<const Vocabulary> vocab) const;
  std::pair<EmbeddingMatrix, EmbeddingMatrix> load_embeddings(std::shared_ptr<const Vocabulary> vocab) const;
  /// The config snapshot written by the last build.
  RunConfig load_config() const;

 private:
  std::filesystem::path dir_;
};

/// Workspace directory: the environment override if set, else `fallback`.
std::filesystem::path resolve_workspace(const std::filesystem::path& fallback);

}  // namespace jargon
