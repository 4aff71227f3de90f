#include <algorithm>
#include <array>
#include <cstdio>

#include "boilerfield/dom.hpp"
#include "boilerfield/error.hpp"
#include "internal.hpp"

namespace boilerfield {
namespace detail {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::optional<char32_t> next_code_point(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  if (pos >= s.size()) return std::nullopt;
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return std::nullopt;
  }
  if (pos + len > s.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  pos += len;
  return cp;
}

bool is_unicode_space(char32_t cp) {
  // Unicode White_Space property.
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

char32_t windows1252(unsigned char byte) {
  static constexpr std::array<char32_t, 32> kHigh = {
      0x20AC, 0x0081, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
      0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x008D, 0x017D, 0x008F,
      0x0090, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
      0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x009D, 0x017E, 0x0178};
  if (byte >= 0x80 && byte <= 0x9F) return kHigh[byte - 0x80];
  return byte;
}

std::string ascii_lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

}  // namespace detail

bool is_valid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (!detail::next_code_point(s, pos)) return false;
  }
  return true;
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const std::size_t start = pos;
    const auto cp = detail::next_code_point(raw, pos);
    if (!cp) {
      // Ill-formed byte: keep it verbatim so the function stays total.
      pos = start + 1;
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(raw[start]);
      continue;
    }
    if (detail::is_unicode_space(*cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(raw.substr(start, pos - start));
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf.data(), 16);
}

namespace {

// Label from `<meta charset=...>` or `<meta http-equiv content="...; charset=...">`
// within the first 1024 bytes.
std::optional<std::string> sniff_meta_charset(std::string_view bytes) {
  const std::string head = detail::ascii_lowercase(bytes.substr(0, 1024));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    const std::size_t end = head.find('>', pos);
    const std::string_view tag =
        std::string_view(head).substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    const std::size_t at = tag.find("charset");
    if (at != std::string_view::npos) {
      std::size_t i = at + 7;
      while (i < tag.size() && detail::is_html_space(tag[i])) ++i;
      if (i < tag.size() && tag[i] == '=') {
        ++i;
        while (i < tag.size() && (detail::is_html_space(tag[i]) || tag[i] == '"' || tag[i] == '\'')) ++i;
        std::size_t j = i;
        while (j < tag.size() && !detail::is_html_space(tag[j]) && tag[j] != '"' && tag[j] != '\'' &&
               tag[j] != ';' && tag[j] != '/' && tag[j] != '>')
          ++j;
        if (j > i) return std::string(tag.substr(i, j - i));
      }
    }
    if (end == std::string::npos) break;
    pos = end;
  }
  return std::nullopt;
}

bool is_single_byte_western(std::string_view label) {
  static constexpr std::array<std::string_view, 12> kLabels = {
      "windows-1252", "cp1252",   "x-cp1252", "iso-8859-1", "iso8859-1", "latin1",
      "l1",           "us-ascii", "ascii",    "iso_8859-1", "cp819",     "ibm819"};
  return std::find(kLabels.begin(), kLabels.end(), label) != kLabels.end();
}

}  // namespace

std::string decode_document_bytes(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") {
    bytes.remove_prefix(3);
  } else if (const auto label = sniff_meta_charset(bytes); label && is_single_byte_western(*label)) {
    std::string out;
    out.reserve(bytes.size());
    for (const char c : bytes) detail::append_utf8(out, detail::windows1252(static_cast<unsigned char>(c)));
    return out;
  }
  if (!is_valid_utf8(bytes)) {
    std::size_t pos = 0;
    while (detail::next_code_point(bytes, pos)) {
    }
    throw IngestError(IngestError::Kind::Encoding,
                      "input is not valid UTF-8 (first bad byte at offset " + std::to_string(pos) + ")");
  }
  return std::string(bytes);
}

}  // namespace boilerfield
