#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace boilerfield::detail {

void append_utf8(std::string& out, char32_t cp);

/// Decodes one code point at `pos`, advancing it. Returns nullopt on an
/// ill-formed sequence (pos is left unchanged).
std::optional<char32_t> next_code_point(std::string_view s, std::size_t& pos);

bool is_unicode_space(char32_t cp);

/// windows-1252 mapping for bytes 0x80..0x9F; identity elsewhere.
char32_t windows1252(unsigned char byte);

/// Longest named character reference that prefixes `s` (which starts just
/// after the '&'). Sets `length` to the consumed characters, including the
/// ';' when present.
std::optional<std::u32string_view> match_named_reference(std::string_view s, std::size_t& length);

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }
inline bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r'; }
inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string ascii_lowercase(std::string_view s);

}  // namespace boilerfield::detail
