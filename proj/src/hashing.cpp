#include "jargon/hashing.hpp"

#include <charconv>

#include "jargon/error.hpp"

namespace jargon {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}

Fingerprinter& Fingerprinter::add(std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= kFnvPrime;
  }
  return *this;
}

Fingerprinter& Fingerprinter::add_u64(std::uint64_t value) noexcept {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= kFnvPrime;
  }
  return *this;
}

Fingerprinter& Fingerprinter::add_field(std::string_view bytes) noexcept {
  add_u64(bytes.size());
  return add(bytes);
}

std::uint64_t fingerprint(std::string_view bytes) noexcept {
  return Fingerprinter{}.add(bytes).value();
}

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xfU];
    value >>= 4;
  }
  return out;
}

std::uint64_t from_hex(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("invalid hex fingerprint: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace jargon
