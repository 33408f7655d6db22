#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "jargon/context_model.hpp"
#include "jargon/corpus.hpp"
#include "jargon/evaluation.hpp"
#include "jargon/kv_file.hpp"

namespace jargon {

struct CorpusSource {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::jsonl;

  bool operator==(const CorpusSource&) const = default;
};

/// Everything `build`, `simulate` and `detect` need. Paths are absolute
/// once loaded: relative entries resolve against the config file's
/// directory.
struct RunConfig {
  CorpusSource dark;
  CorpusSource clean;
  std::filesystem::path workspace;
  PipelineConfig pipeline = PipelineConfig::defaults();

  std::size_t vocab_size = 10000;
  std::size_t window = 10;
  Smoothing smoothing = Smoothing::laplace(1.0);
  std::uint64_t min_clean_freq = 5;

  std::size_t embedding_dim = 300;
  std::size_t embedding_window = 10;
  std::uint64_t embedding_seed = 1;
  std::size_t neighborhood = 100;

  std::uint64_t simulation_seed = 1;
  std::size_t n_dark_words = 500;
  std::uint64_t min_word_freq = 5;
  double split_fraction = 0.5;
  std::vector<Method> methods{Method::kl, Method::ccla};
  std::size_t top_candidates = 5;
  bool mirror = false;
  /// Where `simulate` writes its reports; defaults to <workspace>/reports.
  std::filesystem::path report_dir;

  std::size_t detect_threshold = 10;
  std::size_t detect_max_results = 100;
  std::size_t detect_top_m = 3;

  unsigned threads = 1;

  /// Throws InvalidArgument naming the first bad field.
  void validate() const;
  SimulationConfig simulation() const;
  DetectConfig detect() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; unknown keys are a FormatError.
RunConfig run_config_from_kv(const KvDocument& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical document; run_config_from_kv(run_config_to_kv(c), any) == c.
KvDocument run_config_to_kv(const RunConfig& config);

}  // namespace jargon
