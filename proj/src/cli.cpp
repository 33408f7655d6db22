#include "jargon/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <optional>

#include "jargon/ccla.hpp"
#include "jargon/config.hpp"
#include "jargon/error.hpp"
#include "jargon/evaluation.hpp"
#include "jargon/kv_file.hpp"
#include "jargon/store.hpp"

namespace jargon {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string workspace;
  std::string word;
  std::string method = "kl";
  std::size_t top = 10;
  std::optional<std::uint64_t> min_clean_freq;
  std::size_t threshold = 10;
  std::size_t max_results = 100;
  std::optional<std::size_t> top_m;
  std::optional<std::uint64_t> seed;
  std::string output;
  bool mirror = false;
  unsigned threads = 0;
  bool threads_set = false;
};

fs::path workspace_dir(const Options& o) {
  const fs::path dir = resolve_workspace(o.workspace);
  if (dir.empty()) throw StaleWorkspace("no workspace given (use --workspace or " + std::string(kWorkspaceEnv) + ")");
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

// Query words are stored in normalized form; a raw surface word is run
// through the workspace pipeline when it is not found verbatim.
WordId lookup_word(const Vocabulary& vocab, const std::string& word, const RunConfig& config) {
  if (auto id = vocab.find(word)) return *id;
  PipelineConfig pipeline = config.pipeline;
  pipeline.stopwords.clear();
  const Document doc = preprocess({"query", word}, pipeline);
  if (doc.tokens.size() == 1) {
    if (auto id = vocab.find(doc.tokens.front())) return *id;
  }
  throw UnknownWord(word);
}

int cmd_build(const Options& o, std::ostream& out) {
  RunConfig config = load_run_config(o.config);
  config.workspace = resolve_workspace(config.workspace);
  if (o.threads_set) config.threads = o.threads;
  Workspace(config.workspace).build(config, out);
  return kExitOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const Workspace ws(workspace_dir(o));
  const auto vocab = ws.load_vocab();
  const RunConfig config = ws.load_config();
  const std::uint64_t floor = o.min_clean_freq.value_or(config.min_clean_freq);
  const WordId query = lookup_word(*vocab, o.word, config);
  const Method method = parse_method(o.method);

  RankedMapping ranked;
  if (method == Method::kl) {
    const auto [dark, clean] = ws.load_contexts(vocab);
    ranked = KlRanker(dark, clean, floor).rank(query);
  } else {
    const auto [dark, clean] = ws.load_embeddings(vocab);
    if (!dark.embeddable(query)) throw NotEmbeddable(vocab->word(query));
    ranked = CclaModel(dark, clean, config.neighborhood, config.threads).rank(query, floor);
  }
  for (std::size_t i = 0; i < std::min(o.top, ranked.candidates.size()); ++i) {
    out << (i + 1) << '\t' << vocab->word(ranked.candidates[i].word) << '\t'
        << format_double(ranked.candidates[i].score) << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(o.config);
  config.workspace = resolve_workspace(config.workspace);
  if (o.threads_set) config.threads = o.threads;
  if (o.mirror) config.mirror = true;
  if (o.seed) config.simulation_seed = *o.seed;
  if (config.clean.path.empty()) throw InvalidArgument("config must name corpus.clean");

  fs::path report_dir = o.output.empty() ? config.report_dir : fs::path(o.output);
  if (report_dir.empty()) report_dir = config.workspace.empty() ? fs::path("reports") : config.workspace / "reports";

  const auto raw = load_corpus(config.clean.path, config.clean.format);
  const Corpus corpus = preprocess_corpus(raw, config.pipeline, config.clean.path.filename().string(), config.threads);
  const SimulationReport report = run_clean_clean(config.simulation(), corpus);

  std::error_code ec;
  fs::create_directories(report_dir, ec);
  if (ec) throw IoError("cannot create report directory " + report_dir.string() + ": " + ec.message());
  write_file(report_dir / "simulation_report.json", report_to_json(report));
  write_file(report_dir / "simulation_summary.tsv", report_to_tsv(report));
  out << report_to_tsv(report);
  err << "reports written to " << report_dir.string() << '\n';
  return kExitOk;
}

int cmd_detect(const Options& o, std::ostream& out) {
  const Workspace ws(workspace_dir(o));
  const auto vocab = ws.load_vocab();
  const RunConfig config = ws.load_config();
  const auto [dark, clean] = ws.load_contexts(vocab);
  DetectConfig detect = config.detect();
  detect.self_rank_threshold = o.threshold;
  detect.max_results = o.max_results;
  if (o.top_m) detect.top_m = *o.top_m;
  if (o.min_clean_freq) detect.min_freq = *o.min_clean_freq;
  if (o.threads_set) detect.threads = o.threads;
  const std::string tsv = mapping_to_tsv(make_mapping_report(dark, clean, detect));
  if (!o.output.empty()) write_file(o.output, tsv);
  out << tsv;
  return kExitOk;
}

}  // namespace

const char* version_string() noexcept {
  return JARGON_VERSION;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Map dark-corpus jargon to clean-corpus words by context distributions and embeddings", "jargon"};
  app.set_version_flag("--version", std::string("jargon ") + JARGON_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "Ingest both corpora and build every workspace artifact");
  build->add_option("--config", o.config, "Config file")->required();

  auto* rank = app.add_subcommand("rank", "Rank clean candidates for one dark word");
  rank->add_option("--workspace", o.workspace, "Workspace directory (or $JARGON_WORKSPACE)");
  rank->add_option("--word", o.word, "Query word")->required();
  rank->add_option("--method", o.method, "kl or ccla")->check(CLI::IsMember({"kl", "ccla"}));
  rank->add_option("--top", o.top, "Rows to print")->check(CLI::PositiveNumber);
  rank->add_option("--min-clean-freq", o.min_clean_freq, "Candidate frequency floor");

  auto* simulate = app.add_subcommand("simulate", "Run the clean-clean simulation and write reports");
  simulate->add_option("--config", o.config, "Config file")->required();
  simulate->add_option("--output", o.output, "Report directory");
  simulate->add_option("--seed", o.seed, "Override simulation.seed");
  simulate->add_flag("--mirror", o.mirror, "Use the whole corpus on both sides (testing)");

  auto* detect = app.add_subcommand("detect", "List dark words whose own form ranks poorly on the clean side");
  detect->add_option("--workspace", o.workspace, "Workspace directory (or $JARGON_WORKSPACE)");
  detect->add_option("--threshold", o.threshold, "Report words with self rank above this");
  detect->add_option("--max", o.max_results, "Maximum rows");
  detect->add_option("--top", o.top_m, "Clean words per row")->check(CLI::PositiveNumber);
  detect->add_option("--min-freq", o.min_clean_freq, "Frequency floor on both sides");
  detect->add_option("--output", o.output, "Also write the TSV here");

  for (auto* sub : {build, rank, simulate, detect}) {
    sub->add_option_function<unsigned>(
        "--threads",
        [&](unsigned t) {
          o.threads = t;
          o.threads_set = true;
        },
        "Worker threads (0 = all cores)");
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  if (!argv.empty()) argv.pop_back();
  try {
    app.parse(std::move(argv));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "jargon " << JARGON_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*build) return cmd_build(o, out);
    if (*rank) return cmd_rank(o, out);
    if (*simulate) return cmd_simulate(o, out, err);
    if (*detect) return cmd_detect(o, out);
  } catch (const UnknownWord& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitUnknownWord;
  } catch (const NotEmbeddable& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitUnknownWord;
  } catch (const StaleWorkspace& e) {
    err << "jargon: stale workspace: " << e.what() << '\n';
    return kExitStaleWorkspace;
  } catch (const IoError& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "jargon: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace jargon
