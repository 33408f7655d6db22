#pragma once

#include <filesystem>
#include <set>
#include <string>

namespace jargon {

/// The built-in 318-word English stopword list (data/stopwords_en.txt).
const std::set<std::string>& default_stopwords();

/// One word per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace jargon
