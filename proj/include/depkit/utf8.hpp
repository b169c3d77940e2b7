#ifndef DEPKIT_UTF8_HPP
#define DEPKIT_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace depkit {

// Returns the byte offset of the first invalid UTF-8 sequence, or -1 if the
// whole string is valid. Rejects overlong encodings, surrogates and
// out-of-range code points.
inline long utf8_find_invalid(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = s[i];
    std::size_t len;
    std::uint32_t cp;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
      cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return static_cast<long>(i);
    }
    if (i + len > s.size()) return static_cast<long>(i);
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char b = s[i + k];
      if ((b & 0xc0) != 0x80) return static_cast<long>(i);
      cp = (cp << 6) | (b & 0x3f);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000))
      return static_cast<long>(i);  // overlong
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff))
      return static_cast<long>(i);
    i += len;
  }
  return -1;
}

inline bool utf8_valid(std::string_view s) { return utf8_find_invalid(s) < 0; }

// Splits a valid UTF-8 string into per-code-point chunks, each kept as the
// original byte sequence. Character vocabularies index these chunks.
inline std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = s[i];
    std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xe0) == 0xc0 ? 2
                                  : (b0 & 0xf0) == 0xe0   ? 3
                                                          : 4;
    if (i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace depkit

#endif
