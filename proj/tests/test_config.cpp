#include <doctest.h>

#include "jargon/config.hpp"
#include "jargon/error.hpp"
#include "jargon/hashing.hpp"
#include "jargon/kv_file.hpp"
#include "support.hpp"

using namespace jargon;

TEST_CASE("kv grammar") {
  const auto doc = KvDocument::parse(R"(# top comment
name = "x \"q\" \\ \n"
[a]
n = -42
f = 0.25   # trailing comment
e = 1e3
yes = true
list = ["p", "q r"]
)");
  CHECK(doc.get_string("name") == "x \"q\" \\ \n");
  CHECK(doc.get_int("a.n") == -42);
  CHECK(doc.get_double("a.f") == 0.25);
  CHECK(doc.get_double("a.e") == 1000.0);
  CHECK(doc.get_double("a.n") == -42.0);
  CHECK(doc.get_bool("a.yes") == true);
  CHECK(doc.get_string_list("a.list") == KvDocument::StringList{"p", "q r"});
  CHECK_FALSE(doc.get_string("a.missing").has_value());
  CHECK_THROWS_AS(doc.get_int("a.f"), FormatError);
  CHECK_THROWS_AS(doc.get_string("a.n"), FormatError);
  CHECK(KvDocument::parse(doc.serialize()) == doc);
  CHECK(KvDocument::parse(doc.serialize()).serialize() == doc.serialize());

  for (const char* bad : {"x = ", "[sec", "x = \"open", "x = [1, 2]", "x = maybe", "= 3", "x = 1\nx = 2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(KvDocument::parse(bad), FormatError);
  }
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("hex fingerprints") {
  CHECK(to_hex(0xabcULL) == "0000000000000abc");
  CHECK(from_hex(to_hex(0xdeadbeefcafef00dULL)) == 0xdeadbeefcafef00dULL);
  CHECK(fingerprint("") == 0xcbf29ce484222325ULL);
  Fingerprinter a, b;
  a.add_field("ab").add_field("c");
  b.add_field("a").add_field("bc");
  CHECK(a.value() != b.value());
}

TEST_CASE("run config defaults and overrides") {
  test::TempDir dir;
  test::write_text(dir / "run.toml", R"([corpus]
dark = "d.jsonl"
clean = "/abs/c"
clean_format = "plain_dir"
workspace = "ws"

[pipeline]
stopwords = ["foo", "bar"]
stemmer = "none"

[context]
smoothing = "dirichlet"
mu = 250

[embedding]
dim = 64

[simulation]
methods = ["ccla", "kl", "ccla"]
mirror = true
)");
  const RunConfig c = load_run_config(dir / "run.toml");
  CHECK(c.dark.path == (dir.path() / "d.jsonl").lexically_normal());
  CHECK(c.clean.path == "/abs/c");
  CHECK(c.clean.format == CorpusFormat::plain_dir);
  CHECK(c.workspace == (dir.path() / "ws").lexically_normal());
  CHECK(c.pipeline.stopwords == std::set<std::string>{"bar", "foo"});
  CHECK(c.pipeline.stemmer == StemmerKind::none);
  CHECK(c.smoothing == Smoothing::dirichlet(250.0));
  CHECK(c.embedding_dim == 64);
  CHECK(c.embedding_window == c.window);
  CHECK(c.methods == std::vector<Method>{Method::ccla, Method::kl});
  CHECK(c.mirror);
  CHECK(c.vocab_size == 10000);
  CHECK(c.neighborhood == 100);

  const RunConfig back = run_config_from_kv(run_config_to_kv(c), "/elsewhere");
  CHECK(back == c);

  const SimulationConfig s = c.simulation();
  CHECK(s.smoothing == c.smoothing);
  CHECK(s.mirror);
  CHECK(c.detect().top_m == 3);
}

TEST_CASE("run config rejects bad values") {
  const auto parse = [](const std::string& text) {
    return run_config_from_kv(KvDocument::parse(text), "/base");
  };
  CHECK_NOTHROW(parse(""));
  CHECK(parse("").pipeline == PipelineConfig::defaults());
  CHECK(parse("[pipeline]\nstopwords = \"none\"\n").pipeline.stopwords.empty());
  CHECK_THROWS_AS(parse("[context]\nwindwo = 3\n"), FormatError);
  CHECK_THROWS_AS(parse("[context]\nwindow = 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[context]\nalpha = -1.0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[context]\nmu = 10.0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[context]\nsmoothing = \"dirichlet\"\nalpha = 1.0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[vocabulary]\nsize = 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[simulation]\nsplit_fraction = 1.0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[simulation]\nmethods = []\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[simulation]\nmethods = [\"lda\"]\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[corpus]\ndark_format = \"csv\"\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("[vocabulary]\nsize = \"big\"\n"), FormatError);
  CHECK_THROWS_AS(parse("[pipeline]\nstopwords = \"missing-file.txt\"\n"), IoError);
  CHECK_THROWS_AS(load_run_config("/definitely/not/here.toml"), IoError);
}
