#pragma once

#include <string>
#include <string_view>

namespace fdr::utf8 {

// Decodes UTF-8 into scalar values; each ill-formed byte becomes U+FFFD.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

// Length in bytes of the well-formed sequence starting at s[i], or 0.
std::size_t sequence_length(std::string_view s, std::size_t i) noexcept;

bool is_valid(std::string_view s) noexcept;

constexpr bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace fdr::utf8
