#include "jargon/kv_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "jargon/error.hpp"

namespace jargon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool is_bare_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), is_bare_key_char);
}

class LineParser {
 public:
  LineParser(std::string_view text, const std::string& source, std::size_t line)
      : text_(text), source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  std::string parse_string() {
    // caller checked the opening quote
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  KvDocument::Value parse_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') {
      ++pos_;
      KvDocument::StringList items;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return items;
      }
      for (;;) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '"') fail("arrays hold strings only");
        items.push_back(parse_string());
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_space();
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return items;
          }
          continue;
        }
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return items;
        }
        fail("expected ',' or ']' in array");
      }
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ' ' && text_[end] != '\t' && text_[end] != '#') ++end;
    const std::string_view token = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true") return true;
    if (token == "false") return false;
    const bool is_float = token.find_first_of(".eE") != std::string_view::npos ||
                          token == "inf" || token == "+inf" || token == "-inf" || token == "nan";
    if (is_float) {
      double value = 0;
      std::string_view digits = token;
      if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) fail("invalid float '" + std::string(token) + "'");
      return value;
    }
    std::int64_t value = 0;
    std::string_view digits = token;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      fail("invalid value '" + std::string(token) + "'");
    }
    return value;
  }

  std::size_t pos_ = 0;

 private:
  std::string_view text_;
  const std::string& source_;
  std::size_t line_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string render(const KvDocument::Value& value) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::string s = format_double(d);
      // keep the float type visible on re-parse
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const KvDocument::StringList& list) const {
      std::string out = "[";
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += quote(list[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, value);
}

template <class T>
const T* typed(const std::map<std::string, KvDocument::Value>& values, const std::string& key,
               const char* type_name, const std::string& source) {
  auto it = values.find(key);
  if (it == values.end()) return nullptr;
  if (const T* v = std::get_if<T>(&it->second)) return v;
  throw FormatError(source + ": key '" + key + "' must be " + type_name);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

KvDocument KvDocument::parse(std::string_view text, const std::string& source_name) {
  KvDocument doc;
  doc.source_ = source_name;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;

    LineParser p(raw, source_name, line_no);
    if (p.at_end_or_comment()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string_view line = trim(raw);
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) p.fail("unterminated section header");
      const std::string_view name = trim(line.substr(1, close - 1));
      if (!is_bare_key(name)) p.fail("invalid section name");
      const std::string_view rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') p.fail("trailing characters after section header");
      section = std::string(name);
    } else {
      const auto eq = raw.find('=');
      if (eq == std::string_view::npos) p.fail("expected 'key = value'");
      const std::string_view key = trim(raw.substr(0, eq));
      if (!is_bare_key(key)) p.fail("invalid key '" + std::string(key) + "'");
      const std::string full_key = section.empty() ? std::string(key) : section + "." + std::string(key);
      if (doc.values_.count(full_key)) p.fail("duplicate key '" + full_key + "'");
      p.pos_ = eq + 1;
      Value value = p.parse_value();
      if (!p.at_end_or_comment()) p.fail("trailing characters after value");
      doc.values_.emplace(full_key, std::move(value));
    }
    if (end == text.size()) break;
  }
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string KvDocument::serialize() const {
  std::map<std::string, std::vector<std::pair<std::string, const Value*>>> sections;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      sections[""].emplace_back(key, &value);
    } else {
      sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), &value);
    }
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections) {
    if (!name.empty()) {
      if (!first) out << '\n';
      out << '[' << name << "]\n";
    }
    first = false;
    for (const auto& [key, value] : entries) {
      out << key << " = " << render(*value) << '\n';
    }
  }
  return out.str();
}

std::optional<std::string> KvDocument::get_string(const std::string& key) const {
  if (const auto* v = typed<std::string>(values_, key, "a string", source_)) return *v;
  return std::nullopt;
}

std::optional<std::int64_t> KvDocument::get_int(const std::string& key) const {
  if (const auto* v = typed<std::int64_t>(values_, key, "an integer", source_)) return *v;
  return std::nullopt;
}

std::optional<double> KvDocument::get_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw FormatError(source_ + ": key '" + key + "' must be a number");
}

std::optional<bool> KvDocument::get_bool(const std::string& key) const {
  if (const auto* v = typed<bool>(values_, key, "true or false", source_)) return *v;
  return std::nullopt;
}

std::optional<KvDocument::StringList> KvDocument::get_string_list(const std::string& key) const {
  if (const auto* v = typed<StringList>(values_, key, "an array of strings", source_)) return *v;
  return std::nullopt;
}

void KvDocument::require_known_keys(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw FormatError(source_ + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace jargon
