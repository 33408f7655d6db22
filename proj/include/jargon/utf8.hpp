#pragma once

#include <string>
#include <string_view>

namespace jargon::utf8 {

/// Decodes UTF-8. Bytes that are not part of a valid sequence decode to
/// U+DC80..U+DCFF (one code point per byte) and re-encode to the same byte,
/// so decode/encode round-trips arbitrary input.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);

/// Unicode White_Space property.
bool is_whitespace(char32_t c) noexcept;

/// Letters and digits for the purposes of boundary punctuation stripping.
/// ASCII is classified exactly; non-ASCII code points count as word
/// characters unless they fall in a known punctuation or symbol block.
bool is_word_char(char32_t c) noexcept;

}  // namespace jargon::utf8
