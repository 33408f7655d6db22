#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace jargon {

/// Incremental 64-bit FNV-1a. Stable across platforms and runs, which is all
/// the artifact fingerprints need.
class Fingerprinter {
 public:
  Fingerprinter& add(std::string_view bytes) noexcept;
  Fingerprinter& add_u64(std::uint64_t value) noexcept;
  /// Length-prefixed, so ("ab","c") and ("a","bc") differ.
  Fingerprinter& add_field(std::string_view bytes) noexcept;

  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fingerprint(std::string_view bytes) noexcept;

/// 16 lowercase hex digits.
std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view text);

}  // namespace jargon
