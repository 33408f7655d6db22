#pragma once

#include <string>
#include <string_view>

namespace jargon {

/**
 * English Snowball stemmer (Porter2, current published revision).
 *
 * Input is UTF-8; the algorithm runs on code points, so non-ASCII letters
 * count as single non-vowel characters exactly as in the reference
 * implementation. Words are expected to be lowercased already.
 */
std::string stem_english(std::string_view word);

}  // namespace jargon
