#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jargon {

/**
 * Key/value configuration text, a strict subset of TOML:
 *
 *   # comment
 *   [section]
 *   key = "string"          # basic string, escapes \" \\ \n \t
 *   key = 42                # integer
 *   key = 0.5               # float (needs '.', 'e' or 'E')
 *   key = true              # or false
 *   key = ["a", "b"]        # array of strings, single line
 *
 * Keys are addressed as "section.key"; keys before any header have no
 * prefix. Serialization is canonical: sections and keys sorted, floats in
 * shortest round-trip form, so parse(serialize(x)) == x and equal documents
 * serialize to identical bytes.
 */
class KvDocument {
 public:
  using StringList = std::vector<std::string>;
  using Value = std::variant<bool, std::int64_t, double, std::string, StringList>;

  static KvDocument parse(std::string_view text, const std::string& source_name = "<config>");
  static KvDocument load(const std::filesystem::path& path);

  std::string serialize() const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, Value>& values() const noexcept { return values_; }

  void set(const std::string& key, Value value) { values_[key] = std::move(value); }

  // Typed accessors. A present key of the wrong type is a FormatError.
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  /// Integers are accepted where a float is expected.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<StringList> get_string_list(const std::string& key) const;

  /// Throws FormatError naming the first key not in `known`.
  void require_known_keys(const std::vector<std::string>& known) const;

  bool operator==(const KvDocument& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, Value> values_;
  std::string source_ = "<config>";
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace jargon
