#include "jargon/stemmer.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "jargon/utf8.hpp"

namespace jargon {

namespace {

using Text = std::u32string;
using TextView = std::u32string_view;

bool is_vowel(char32_t c) noexcept {
  return c == U'a' || c == U'e' || c == U'i' || c == U'o' || c == U'u' || c == U'y';
}

// Vowels plus w, x, Y: letters that stop a short-syllable ending.
bool is_vowel_wxy(char32_t c) noexcept {
  return is_vowel(c) || c == U'w' || c == U'x' || c == U'Y';
}

bool is_valid_li(char32_t c) noexcept {
  switch (c) {
    case U'c': case U'd': case U'e': case U'g': case U'h':
    case U'k': case U'm': case U'n': case U'r': case U't':
      return true;
    default:
      return false;
  }
}

bool ends_with(TextView text, std::size_t end, TextView suffix) noexcept {
  return end >= suffix.size() && text.substr(end - suffix.size(), suffix.size()) == suffix;
}

struct Rule {
  TextView suffix;
  int code;
};

/// Longest rule whose suffix ends the first `end` characters; nullptr if none.
template <std::size_t N>
const Rule* longest_suffix(TextView text, std::size_t end, const std::array<Rule, N>& rules) noexcept {
  const Rule* best = nullptr;
  for (const auto& rule : rules) {
    if (ends_with(text, end, rule.suffix) && (!best || rule.suffix.size() > best->suffix.size())) {
      best = &rule;
    }
  }
  return best;
}

struct Word {
  Text text;
  std::size_t p1 = 0;
  std::size_t p2 = 0;
  bool y_found = false;

  void replace_suffix(std::size_t start, TextView with) {
    text.replace(start, text.size() - start, with);
  }
};

// A short syllable ends at `end`: consonant-vowel-consonant (last not w, x, Y),
// or vowel-consonant at the start of the word, or the word part is "past".
bool short_syllable_before(TextView w, std::size_t end) noexcept {
  if (end >= 3 && !is_vowel_wxy(w[end - 1]) && is_vowel(w[end - 2]) && !is_vowel(w[end - 3])) {
    return true;
  }
  if (end == 2 && !is_vowel(w[1]) && is_vowel(w[0])) {
    return true;
  }
  return ends_with(w, end, U"past");
}

bool has_vowel(TextView w, std::size_t begin, std::size_t end) noexcept {
  return std::any_of(w.begin() + static_cast<std::ptrdiff_t>(begin),
                     w.begin() + static_cast<std::ptrdiff_t>(end), is_vowel);
}

bool exception1(Text& w) {
  struct Exception {
    TextView word;
    TextView stem;
  };
  static constexpr std::array<Exception, 15> kExceptions{{
      {U"andes", U"andes"},  {U"atlas", U"atlas"}, {U"bias", U"bias"},
      {U"cosmos", U"cosmos"}, {U"early", U"earli"}, {U"gently", U"gentl"},
      {U"howe", U"howe"},    {U"idly", U"idl"},     {U"news", U"news"},
      {U"only", U"onli"},    {U"singly", U"singl"}, {U"skies", U"sky"},
      {U"skis", U"ski"},     {U"sky", U"sky"},      {U"ugly", U"ugli"},
  }};
  for (const auto& e : kExceptions) {
    if (w == e.word) {
      w = Text(e.stem);
      return true;
    }
  }
  return false;
}

void prelude(Word& s) {
  auto& w = s.text;
  if (!w.empty() && w.front() == U'\'') {
    w.erase(0, 1);
  }
  if (!w.empty() && w.front() == U'y') {
    w.front() = U'Y';
    s.y_found = true;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (is_vowel(w[i]) && w[i + 1] == U'y') {
      w[i + 1] = U'Y';
      s.y_found = true;
    }
  }
}

// Position just past the first vowel-then-non-vowel pair at or after `from`,
// or npos.
std::size_t region_start(TextView w, std::size_t from) noexcept {
  std::size_t i = from;
  while (i < w.size() && !is_vowel(w[i])) ++i;
  if (i == w.size()) return TextView::npos;
  ++i;
  while (i < w.size() && is_vowel(w[i])) ++i;
  if (i == w.size()) return TextView::npos;
  return i + 1;
}

void mark_regions(Word& s) {
  static constexpr std::array<TextView, 9> kPrefixes{
      U"arsen", U"commun", U"emerg", U"gener", U"inter", U"later", U"organ", U"past", U"univers"};
  const TextView w = s.text;
  s.p1 = s.p2 = w.size();

  std::size_t p1 = TextView::npos;
  std::size_t longest = 0;
  for (auto prefix : kPrefixes) {
    if (w.starts_with(prefix) && prefix.size() > longest) longest = prefix.size();
  }
  p1 = longest > 0 ? longest : region_start(w, 0);
  if (p1 == TextView::npos) return;
  s.p1 = p1;
  const std::size_t p2 = region_start(w, p1);
  if (p2 != TextView::npos) s.p2 = p2;
}

void step_1a(Word& s) {
  auto& w = s.text;
  for (TextView apostrophe : {TextView(U"'s'"), TextView(U"'s"), TextView(U"'")}) {
    if (ends_with(w, w.size(), apostrophe)) {
      w.resize(w.size() - apostrophe.size());
      break;
    }
  }

  if (ends_with(w, w.size(), U"sses")) {
    s.replace_suffix(w.size() - 4, U"ss");
  } else if (ends_with(w, w.size(), U"ied") || ends_with(w, w.size(), U"ies")) {
    const std::size_t start = w.size() - 3;
    s.replace_suffix(start, start >= 2 ? U"i" : U"ie");
  } else if (ends_with(w, w.size(), U"ss") || ends_with(w, w.size(), U"us")) {
    // unchanged
  } else if (ends_with(w, w.size(), U"s")) {
    const std::size_t start = w.size() - 1;
    // The letter right before the s does not count.
    if (start >= 1 && has_vowel(w, 0, start - 1)) {
      w.pop_back();
    }
  }
}

void step_1b(Word& s) {
  static constexpr std::array<Rule, 6> kSuffixes{{
      {U"ed", 2}, {U"eed", 1}, {U"ing", 3}, {U"edly", 2}, {U"eedly", 1}, {U"ingly", 2}}};
  auto& w = s.text;
  const Rule* rule = longest_suffix(w, w.size(), kSuffixes);
  if (!rule) return;
  const std::size_t start = w.size() - rule->suffix.size();

  if (rule->code == 1) {
    if (start >= s.p1) {
      const TextView head = TextView(w).substr(0, start);
      if (head != U"succ" && head != U"proc" && head != U"exc") {
        s.replace_suffix(start, U"ee");
      }
    }
    return;
  }

  if (rule->code == 3) {
    static constexpr std::array<Rule, 7> kIngStems{{
        {U"even", 2}, {U"cann", 2}, {U"inn", 2}, {U"earr", 2}, {U"herr", 2}, {U"out", 2}, {U"y", 1}}};
    if (const Rule* stem = longest_suffix(w, start, kIngStems)) {
      const TextView head = TextView(w).substr(0, start);
      if (stem->code == 1) {
        // consonant + "ying" as the whole word: dying -> die
        if (start == 2 && !is_vowel(w[0])) {
          s.replace_suffix(1, U"ie");
          return;
        }
      } else if (head == stem->suffix) {
        return;
      }
    }
  }

  if (!has_vowel(w, 0, start)) return;
  w.resize(start);

  static constexpr std::array<Rule, 12> kEndings{{
      {U"bb", 2}, {U"dd", 2}, {U"ff", 2}, {U"gg", 2}, {U"bl", 1}, {U"mm", 2},
      {U"nn", 2}, {U"pp", 2}, {U"rr", 2}, {U"at", 1}, {U"tt", 2}, {U"iz", 1}}};
  const Rule* ending = longest_suffix(w, w.size(), kEndings);
  if (!ending) {
    if (w.size() == s.p1 && short_syllable_before(w, w.size())) {
      w.push_back(U'e');
    }
    return;
  }
  if (ending->code == 1) {
    w.push_back(U'e');
    return;
  }
  const std::size_t double_start = w.size() - 2;
  const bool short_double = double_start == 1 &&
                            (w[0] == U'a' || w[0] == U'e' || w[0] == U'o');
  if (!short_double) w.pop_back();
}

void step_1c(Word& s) {
  auto& w = s.text;
  if (w.size() < 3) return;
  const std::size_t last = w.size() - 1;
  if ((w[last] == U'y' || w[last] == U'Y') && !is_vowel(w[last - 1])) {
    w[last] = U'i';
  }
}

void step_2(Word& s) {
  static constexpr std::array<Rule, 25> kRules{{
      {U"anci", 3},    {U"enci", 2},    {U"ogi", 14},    {U"li", 16},     {U"bli", 12},
      {U"abli", 4},    {U"alli", 8},    {U"fulli", 9},   {U"lessli", 15}, {U"ousli", 10},
      {U"entli", 5},   {U"aliti", 8},   {U"biliti", 12}, {U"iviti", 11},  {U"tional", 1},
      {U"ational", 7}, {U"alism", 8},   {U"ation", 7},   {U"ization", 6}, {U"izer", 6},
      {U"ator", 7},    {U"iveness", 11}, {U"fulness", 9}, {U"ousness", 10}, {U"ogist", 13}}};
  static constexpr std::array<TextView, 16> kReplacements{
      U"", U"tion", U"ence", U"ance", U"able", U"ent", U"ize", U"ate",
      U"al", U"ful", U"ous", U"ive", U"ble", U"og", U"og", U"less"};
  auto& w = s.text;
  const Rule* rule = longest_suffix(w, w.size(), kRules);
  if (!rule) return;
  const std::size_t start = w.size() - rule->suffix.size();
  if (start < s.p1) return;
  switch (rule->code) {
    case 14:
      if (start > 0 && w[start - 1] == U'l') s.replace_suffix(start, U"og");
      break;
    case 16:
      if (start > 0 && is_valid_li(w[start - 1])) w.resize(start);
      break;
    default:
      s.replace_suffix(start, kReplacements[static_cast<std::size_t>(rule->code)]);
  }
}

void step_3(Word& s) {
  static constexpr std::array<Rule, 9> kRules{{
      {U"icate", 4}, {U"ative", 6}, {U"alize", 3}, {U"iciti", 4}, {U"ical", 4},
      {U"tional", 1}, {U"ational", 2}, {U"ful", 5}, {U"ness", 5}}};
  auto& w = s.text;
  const Rule* rule = longest_suffix(w, w.size(), kRules);
  if (!rule) return;
  const std::size_t start = w.size() - rule->suffix.size();
  if (start < s.p1) return;
  switch (rule->code) {
    case 1: s.replace_suffix(start, U"tion"); break;
    case 2: s.replace_suffix(start, U"ate"); break;
    case 3: s.replace_suffix(start, U"al"); break;
    case 4: s.replace_suffix(start, U"ic"); break;
    case 5: w.resize(start); break;
    case 6:
      if (start >= s.p2) w.resize(start);
      break;
  }
}

void step_4(Word& s) {
  static constexpr std::array<Rule, 18> kRules{{
      {U"ic", 1},  {U"ance", 1}, {U"ence", 1}, {U"able", 1}, {U"ible", 1}, {U"ate", 1},
      {U"ive", 1}, {U"ize", 1},  {U"iti", 1},  {U"al", 1},   {U"ism", 1},  {U"ion", 2},
      {U"er", 1},  {U"ous", 1},  {U"ant", 1},  {U"ent", 1},  {U"ment", 1}, {U"ement", 1}}};
  auto& w = s.text;
  const Rule* rule = longest_suffix(w, w.size(), kRules);
  if (!rule) return;
  const std::size_t start = w.size() - rule->suffix.size();
  if (start < s.p2) return;
  if (rule->code == 2 && !(start > 0 && (w[start - 1] == U's' || w[start - 1] == U't'))) return;
  w.resize(start);
}

void step_5(Word& s) {
  auto& w = s.text;
  if (w.empty()) return;
  const std::size_t start = w.size() - 1;
  if (w.back() == U'e') {
    if (start >= s.p2 || (start >= s.p1 && !short_syllable_before(w, start))) {
      w.pop_back();
    }
  } else if (w.back() == U'l') {
    if (start >= s.p2 && start > 0 && w[start - 1] == U'l') w.pop_back();
  }
}

void postlude(Word& s) {
  if (!s.y_found) return;
  std::replace(s.text.begin(), s.text.end(), U'Y', U'y');
}

}  // namespace

std::string stem_english(std::string_view word) {
  Word s;
  s.text = utf8::decode(word);
  if (exception1(s.text) || s.text.size() < 3) {
    return utf8::encode(s.text);
  }
  prelude(s);
  mark_regions(s);
  step_1a(s);
  step_1b(s);
  step_1c(s);
  step_2(s);
  step_3(s);
  step_4(s);
  step_5(s);
  postlude(s);
  return utf8::encode(s.text);
}

}  // namespace jargon
