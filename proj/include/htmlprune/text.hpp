// Copyright 2026 The htmlprune Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! \file
//! UTF-8 scanning, the word definition shared by every module, and a stable
//! hash used wherever results must not depend on the platform.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace htmlprune::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

struct Scalar {
  char32_t value;
  std::size_t length;  // bytes consumed; >= 1
  bool valid;
};

/// Decodes one scalar at `pos`. Invalid sequences consume one byte.
inline Scalar decode_utf8(std::string_view s, std::size_t pos) noexcept {
  auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(s[i]);
  };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) return {lead, 1, true};
  std::size_t need = 0;
  char32_t value = 0;
  char32_t min = 0;
  if ((lead & 0xE0) == 0xC0) {
    need = 1;
    value = lead & 0x1F;
    min = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    need = 2;
    value = lead & 0x0F;
    min = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    need = 3;
    value = lead & 0x07;
    min = 0x10000;
  } else {
    return {kReplacementChar, 1, false};
  }
  for (std::size_t i = 1; i <= need; ++i) {
    if (pos + i >= s.size()) return {kReplacementChar, 1, false};
    const unsigned char c = byte(pos + i);
    if ((c & 0xC0) != 0x80) return {kReplacementChar, 1, false};
    value = (value << 6) | (c & 0x3F);
  }
  if (value < min || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
    return {kReplacementChar, 1, false};
  }
  return {value, need + 1, true};
}

inline void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

/// Replaces every invalid UTF-8 sequence with U+FFFD.
inline std::string sanitize_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const Scalar sc = decode_utf8(s, pos);
    if (sc.valid) {
      out.append(s.substr(pos, sc.length));
    } else {
      append_utf8(out, kReplacementChar);
    }
    pos += sc.length;
  }
  return out;
}

/// Unicode White_Space property.
constexpr bool is_space(char32_t c) noexcept {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

/// Calls `fn(word)` for each maximal run of non-whitespace scalars.
template <typename Fn>
void for_each_word(std::string_view s, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < s.size()) {
    const Scalar sc = decode_utf8(s, pos);
    const bool space = sc.valid && is_space(sc.value);
    if (space) {
      if (start != std::string_view::npos) {
        fn(s.substr(start, pos - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += sc.length;
  }
  if (start != std::string_view::npos) fn(s.substr(start));
}

inline std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  for_each_word(s, [&](std::string_view) { ++n; });
  return n;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  for_each_word(s, [&](std::string_view w) { words.emplace_back(w); });
  return words;
}

inline bool is_blank(std::string_view s) {
  bool blank = true;
  for_each_word(s, [&](std::string_view) { blank = false; });
  return blank;
}

/// Words joined by single spaces; leading and trailing whitespace dropped.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for_each_word(s, [&](std::string_view w) {
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  });
  return out;
}

/// Approximate LLM token count: a run of ASCII letters is one token, digits
/// count one token per three, every other visible ASCII character and every
/// non-ASCII scalar that is not whitespace is one token. Whitespace is free.
inline std::size_t count_tokens(std::string_view s) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[pos]);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      while (pos < s.size() &&
             ((s[pos] >= 'a' && s[pos] <= 'z') || (s[pos] >= 'A' && s[pos] <= 'Z'))) {
        ++pos;
      }
      ++n;
    } else if (c >= '0' && c <= '9') {
      std::size_t len = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        ++pos;
        ++len;
      }
      n += (len + 2) / 3;
    } else {
      const Scalar sc = decode_utf8(s, pos);
      if (!(sc.valid && is_space(sc.value))) ++n;
      pos += sc.length;
    }
  }
  return n;
}

inline char ascii_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  }
  return true;
}

/// 64-bit FNV-1a. Stable across platforms and runs.
class Fnv1a {
 public:
  Fnv1a& bytes(std::string_view s) noexcept {
    for (unsigned char c : s) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  Fnv1a& u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= static_cast<unsigned char>(v >> (8 * i));
      hash_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  std::uint64_t value() const noexcept { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace htmlprune::text
