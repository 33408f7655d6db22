#include "jargon/stopwords.hpp"

#include <fstream>
#include <sstream>
#include <string_view>

#include "jargon/error.hpp"

namespace jargon {

namespace {

constexpr std::string_view kDefaultList =
#include "stopwords_data.inc"
    ;

std::set<std::string> parse_list(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    words.insert(line.substr(first));
  }
  return words;
}

}  // namespace

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = [] {
    std::istringstream in{std::string(kDefaultList)};
    return parse_list(in);
  }();
  return words;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stopword file: " + path.string());
  return parse_list(in);
}

}  // namespace jargon
