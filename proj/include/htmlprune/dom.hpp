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
//! Value-typed DOM, a lenient HTML parser and the serializer.
//!
//! Text runs are stored as the original source bytes (character references
//! are not decoded). Whitespace is only collapsed by extract_text(), so a
//! tree serializes back to markup that resembles its source.

#pragma once

#include <iconv.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htmlprune/error.hpp"
#include "htmlprune/text.hpp"

namespace htmlprune {

enum class NodeKind {
  kDocument,
  kElement,
  kText,
  kComment,
  kRawText,      // script or style payload
  kDeclaration,  // <!DOCTYPE ...>, <?xml ...?>, <![CDATA[...]]>
};

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// One node of the DOM.
///
/// Elements use `tag`, `attrs` and `children`. Text, comment, raw-text and
/// declaration nodes keep their payload in `text`. Text runs attached
/// directly to an element are its kText children, interleaved with its
/// child elements in document order.
struct Node {
  NodeKind kind = NodeKind::kElement;
  std::string tag;
  std::vector<Attribute> attrs;
  std::string text;
  std::vector<Node> children;

  static Node document() { return Node{NodeKind::kDocument, {}, {}, {}, {}}; }
  static Node element(std::string tag, std::vector<Node> children = {}) {
    return Node{NodeKind::kElement, std::move(tag), {}, {}, std::move(children)};
  }
  static Node text_run(std::string text) {
    return Node{NodeKind::kText, {}, {}, std::move(text), {}};
  }
  static Node comment(std::string text) {
    return Node{NodeKind::kComment, {}, {}, std::move(text), {}};
  }

  bool is_element() const noexcept { return kind == NodeKind::kElement; }
  bool is_text() const noexcept { return kind == NodeKind::kText; }

  const std::string* attr(std::string_view name) const {
    for (const auto& a : attrs) {
      if (a.name == name) return &a.value;
    }
    return nullptr;
  }

  friend bool operator==(const Node&, const Node&) = default;
};

inline bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 16> kVoid = {
      "area", "base",  "br",   "col",  "embed",  "hr",    "img",   "input",
      "link", "meta",  "param", "source", "track", "wbr", "basefont", "keygen"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

// ---------------------------------------------------------------------------
// Text views over a tree
// ---------------------------------------------------------------------------

namespace detail {

inline void collect_runs(const Node& node, std::string& out) {
  if (node.kind == NodeKind::kText) {
    out.append(node.text);
    out.push_back(' ');
    return;
  }
  if (node.kind != NodeKind::kElement && node.kind != NodeKind::kDocument) {
    return;
  }
  for (const Node& child : node.children) collect_runs(child, out);
}

}  // namespace detail

/// All text under `node` in document order, runs joined by one space and
/// whitespace collapsed. Comments and script/style payloads are excluded.
inline std::string extract_text(const Node& node) {
  std::string raw;
  detail::collect_runs(node, raw);
  return text::collapse_whitespace(raw);
}

/// The text runs attached directly to `node` (not to its child elements).
inline std::string attached_text(const Node& node) {
  std::string raw;
  for (const Node& child : node.children) {
    if (child.kind == NodeKind::kText) {
      raw.append(child.text);
      raw.push_back(' ');
    }
  }
  return text::collapse_whitespace(raw);
}

/// True when some non-blank text run exists under `node`.
inline bool has_text(const Node& node) {
  if (node.kind == NodeKind::kText) return !text::is_blank(node.text);
  if (node.kind != NodeKind::kElement && node.kind != NodeKind::kDocument) {
    return false;
  }
  return std::any_of(node.children.begin(), node.children.end(),
                     [](const Node& c) { return has_text(c); });
}

inline std::size_t element_child_count(const Node& node) {
  return static_cast<std::size_t>(
      std::count_if(node.children.begin(), node.children.end(),
                    [](const Node& c) { return c.is_element(); }));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline void serialize_into(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::kDocument:
      for (const Node& c : node.children) serialize_into(c, out);
      return;
    case NodeKind::kText:
    case NodeKind::kRawText:
    case NodeKind::kDeclaration:
      out.append(node.text);
      return;
    case NodeKind::kComment:
      out.append("<!--");
      out.append(node.text);
      out.append("-->");
      return;
    case NodeKind::kElement:
      break;
  }
  out.push_back('<');
  out.append(node.tag);
  for (const Attribute& a : node.attrs) {
    out.push_back(' ');
    out.append(a.name);
    out.append("=\"");
    for (char c : a.value) {
      if (c == '"') {
        out.append("&quot;");
      } else {
        out.push_back(c);
      }
    }
    out.push_back('"');
  }
  out.push_back('>');
  if (is_void_element(node.tag) && node.children.empty()) return;
  for (const Node& c : node.children) serialize_into(c, out);
  out.append("</");
  out.append(node.tag);
  out.push_back('>');
}

}  // namespace detail

inline std::string serialize(const Node& node) {
  std::string out;
  detail::serialize_into(node, out);
  return out;
}

// ---------------------------------------------------------------------------
// Encoding detection
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sniff_charset(std::string_view raw) {
  const std::string head = text::to_lower_ascii(raw.substr(0, 4096));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    const std::size_t end = head.find('>', pos);
    const std::string_view tag = std::string_view(head).substr(
        pos, end == std::string::npos ? std::string::npos : end - pos);
    const std::size_t cs = tag.find("charset");
    if (cs != std::string_view::npos) {
      std::size_t i = cs + 7;
      while (i < tag.size() && (tag[i] == ' ' || tag[i] == '=' ||
                                tag[i] == '"' || tag[i] == '\'')) {
        ++i;
      }
      std::size_t j = i;
      while (j < tag.size() &&
             (std::isalnum(static_cast<unsigned char>(tag[j])) ||
              tag[j] == '-' || tag[j] == '_' || tag[j] == ':' ||
              tag[j] == '.')) {
        ++j;
      }
      if (j > i) return std::string(tag.substr(i, j - i));
    }
    pos += 5;
  }
  return {};
}

inline std::string decode_windows_1252(std::string_view raw) {
  static constexpr std::array<char32_t, 32> kHigh = {
      0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
      0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD,
      0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
      0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178};
  std::string out;
  out.reserve(raw.size() + raw.size() / 4);
  for (unsigned char c : raw) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0xA0) {
      text::append_utf8(out, kHigh[c - 0x80]);
    } else {
      text::append_utf8(out, c);
    }
  }
  return out;
}

inline std::optional<std::string> decode_with_iconv(std::string_view raw,
                                                    const std::string& label) {
  iconv_t cd = iconv_open("UTF-8", label.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return std::nullopt;
  std::string out;
  std::string in(raw);
  char* inbuf = in.data();
  std::size_t inleft = in.size();
  std::array<char, 4096> buf{};
  while (inleft > 0) {
    char* outbuf = buf.data();
    std::size_t outleft = buf.size();
    const std::size_t rc = iconv(cd, &inbuf, &inleft, &outbuf, &outleft);
    out.append(buf.data(), buf.size() - outleft);
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      // Undecodable or truncated sequence: replace one byte and go on.
      text::append_utf8(out, text::kReplacementChar);
      ++inbuf;
      --inleft;
      iconv(cd, nullptr, nullptr, nullptr, nullptr);
    }
  }
  iconv_close(cd);
  return out;
}

/// Valid UTF-8 containing at least one multi-byte sequence.
inline bool looks_like_utf8(std::string_view raw) {
  bool multibyte = false;
  for (std::size_t pos = 0; pos < raw.size();) {
    const text::Scalar sc = text::decode_utf8(raw, pos);
    if (!sc.valid) return false;
    multibyte |= sc.length > 1;
    pos += sc.length;
  }
  return multibyte;
}

/// Converts raw bytes to valid UTF-8 using the BOM or the meta charset.
inline std::string decode_document(std::string_view raw) {
  if (raw.size() >= 3 && raw.substr(0, 3) == "\xEF\xBB\xBF") {
    return text::sanitize_utf8(raw.substr(3));
  }
  if (raw.size() >= 2 && (raw.substr(0, 2) == "\xFF\xFE" ||
                          raw.substr(0, 2) == "\xFE\xFF")) {
    const bool le = raw[0] == '\xFF';
    if (auto s = decode_with_iconv(raw.substr(2), le ? "UTF-16LE" : "UTF-16BE")) {
      return text::sanitize_utf8(*s);
    }
  }
  const std::string label = sniff_charset(raw);
  if (label.empty() || label == "utf-8" || label == "utf8" ||
      label == "unicode-1-1-utf-8") {
    return text::sanitize_utf8(raw);
  }
  // Pages re-saved as UTF-8 often keep their old declaration. Non-ASCII text
  // in a legacy encoding is almost never valid UTF-8 by accident.
  if (looks_like_utf8(raw)) return std::string(raw);
  if (label == "iso-8859-1" || label == "latin1" || label == "latin-1" ||
      label == "windows-1252" || label == "cp1252" || label == "us-ascii" ||
      label == "ascii" || label == "iso8859-1") {
    return decode_windows_1252(raw);
  }
  if (auto s = decode_with_iconv(raw, label)) return text::sanitize_utf8(*s);
  return text::sanitize_utf8(raw);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lenient parser
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_html_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

template <std::size_t N>
bool one_of(std::string_view tag, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

inline constexpr std::array<std::string_view, 41> kClosesParagraph = {
    "address", "article",  "aside",  "blockquote", "center",  "details",
    "dialog",  "dir",      "div",    "dl",         "fieldset", "figcaption",
    "figure",  "footer",   "form",   "h1",         "h2",       "h3",
    "h4",      "h5",       "h6",     "header",     "hgroup",   "hr",
    "main",    "menu",     "nav",    "ol",         "p",        "pre",
    "section", "summary",  "table",  "ul",         "li",       "dd",
    "dt",      "listing",  "xmp",    "plaintext",  "search"};

inline constexpr std::array<std::string_view, 10> kScopeBoundary = {
    "applet", "caption", "html",   "table",  "td",
    "th",     "marquee", "object", "template", "button"};

inline constexpr std::array<std::string_view, 6> kHeadings = {
    "h1", "h2", "h3", "h4", "h5", "h6"};

/// Builds a tree from markup, repairing structure the way browsers broadly
/// do: implied end tags for p/li/dt/dd/option/table parts, stray end tags
/// ignored, everything still open at EOF closed.
class TreeBuilder {
 public:
  static constexpr std::size_t kMaxDepth = 512;

  explicit TreeBuilder(std::string_view src) : src_(src) {
    stack_.push_back(&root_);
  }

  Node build() && {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<' && try_markup()) continue;
      read_text();
    }
    return std::move(root_);
  }

 private:
  Node& current() { return *stack_.back(); }

  void append_text(std::string_view s) {
    if (s.empty()) return;
    auto& kids = current().children;
    if (!kids.empty() && kids.back().kind == NodeKind::kText) {
      kids.back().text.append(s);
    } else {
      kids.push_back(Node::text_run(std::string(s)));
    }
  }

  void read_text() {
    // A '<' that did not start markup is literal text.
    std::size_t next = src_.find('<', pos_ + 1);
    if (next == std::string_view::npos) next = src_.size();
    append_text(src_.substr(pos_, next - pos_));
    pos_ = next;
  }

  bool try_markup() {
    const std::string_view rest = src_.substr(pos_);
    if (rest.starts_with("<!--")) {
      std::size_t end = src_.find("-->", pos_ + 4);
      std::string body;
      if (rest.starts_with("<!-->")) {
        pos_ += 5;
      } else if (rest.starts_with("<!--->")) {
        pos_ += 6;
      } else if (end == std::string_view::npos) {
        body = std::string(src_.substr(pos_ + 4));
        pos_ = src_.size();
      } else {
        body = std::string(src_.substr(pos_ + 4, end - pos_ - 4));
        pos_ = end + 3;
      }
      current().children.push_back(Node::comment(std::move(body)));
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      std::size_t end;
      if (rest.starts_with("<![CDATA[")) {
        end = src_.find("]]>", pos_);
        end = end == std::string_view::npos ? src_.size() : end + 3;
      } else {
        end = src_.find('>', pos_);
        end = end == std::string_view::npos ? src_.size() : end + 1;
      }
      Node decl{NodeKind::kDeclaration, {}, {}, std::string(src_.substr(pos_, end - pos_)), {}};
      current().children.push_back(std::move(decl));
      pos_ = end;
      return true;
    }
    if (rest.size() >= 3 && rest[1] == '/' && is_ascii_alpha(rest[2])) {
      end_tag();
      return true;
    }
    if (rest.starts_with("</>")) {
      pos_ += 3;
      return true;
    }
    if (rest.size() >= 2 && is_ascii_alpha(rest[1])) {
      return start_tag();
    }
    return false;
  }

  std::string read_name(std::size_t& i) const {
    std::size_t start = i;
    while (i < src_.size() && !is_html_space(src_[i]) && src_[i] != '/' &&
           src_[i] != '>') {
      ++i;
    }
    return text::to_lower_ascii(src_.substr(start, i - start));
  }

  void end_tag() {
    std::size_t i = pos_ + 2;
    const std::string name = read_name(i);
    const std::size_t close = src_.find('>', i);
    pos_ = close == std::string_view::npos ? src_.size() : close + 1;
    close_element(name);
  }

  void close_element(std::string_view name) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      if (stack_[k]->tag == name) {
        stack_.resize(k);
        return;
      }
    }
  }

  bool in_stack(std::string_view name) const {
    return std::any_of(stack_.begin() + 1, stack_.end(),
                       [&](const Node* n) { return n->tag == name; });
  }

  /// Pops up to and including the nearest `targets` element, unless a
  /// boundary element is met first.
  template <std::size_t N, std::size_t M>
  void close_nearest(const std::array<std::string_view, N>& targets,
                     const std::array<std::string_view, M>& boundary) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const std::string& tag = stack_[k]->tag;
      if (one_of(tag, targets)) {
        stack_.resize(k);
        return;
      }
      if (one_of(tag, boundary)) return;
    }
  }

  void apply_implied_end_tags(std::string_view tag) {
    static constexpr std::array<std::string_view, 1> kP = {"p"};
    static constexpr std::array<std::string_view, 1> kLi = {"li"};
    static constexpr std::array<std::string_view, 2> kDtDd = {"dt", "dd"};
    static constexpr std::array<std::string_view, 3> kListBoundary = {
        "ul", "ol", "menu"};
    static constexpr std::array<std::string_view, 1> kDlBoundary = {"dl"};
    static constexpr std::array<std::string_view, 1> kTr = {"tr"};
    static constexpr std::array<std::string_view, 2> kCell = {"td", "th"};
    static constexpr std::array<std::string_view, 3> kSection = {
        "thead", "tbody", "tfoot"};
    static constexpr std::array<std::string_view, 1> kTable = {"table"};
    static constexpr std::array<std::string_view, 2> kRowBoundary = {"table",
                                                                     "tr"};
    static constexpr std::array<std::string_view, 1> kA = {"a"};
    static constexpr std::array<std::string_view, 0> kNone = {};

    if (tag == "li") close_nearest(kLi, kListBoundary);
    if (tag == "dt" || tag == "dd") close_nearest(kDtDd, kDlBoundary);
    if (one_of(tag, kClosesParagraph)) close_nearest(kP, kScopeBoundary);
    if (one_of(tag, kHeadings) && one_of(current().tag, kHeadings)) {
      stack_.pop_back();
    }
    if (tag == "option" || tag == "optgroup") {
      if (current().tag == "option") stack_.pop_back();
      if (tag == "optgroup" && current().tag == "optgroup") stack_.pop_back();
    }
    if (tag == "tr" || one_of(tag, kSection)) {
      close_nearest(kCell, kTable);
      if (tag == "tr") close_nearest(kTr, kTable);
    }
    if (one_of(tag, kSection)) {
      close_nearest(kTr, kTable);
      close_nearest(kSection, kTable);
    }
    if (tag == "td" || tag == "th") close_nearest(kCell, kRowBoundary);
    if (tag == "a" && in_stack("a")) close_nearest(kA, kNone);
  }

  bool start_tag() {
    std::size_t i = pos_ + 1;
    Node el = Node::element(read_name(i));
    bool self_closing = false;
    // Attributes.
    while (true) {
      while (i < src_.size() && (is_html_space(src_[i]) || src_[i] == '/')) {
        if (src_[i] == '/' && i + 1 < src_.size() && src_[i + 1] == '>') {
          self_closing = true;
        }
        ++i;
      }
      if (i >= src_.size()) {
        // EOF inside a tag: the tag is dropped.
        pos_ = src_.size();
        return true;
      }
      if (src_[i] == '>') {
        ++i;
        break;
      }
      self_closing = false;
      std::size_t name_start = i;
      ++i;  // a leading '=' belongs to the name
      while (i < src_.size() && !is_html_space(src_[i]) && src_[i] != '/' &&
             src_[i] != '>' && src_[i] != '=') {
        ++i;
      }
      std::string name =
          text::to_lower_ascii(src_.substr(name_start, i - name_start));
      std::string value;
      std::size_t j = i;
      while (j < src_.size() && is_html_space(src_[j])) ++j;
      if (j < src_.size() && src_[j] == '=') {
        ++j;
        while (j < src_.size() && is_html_space(src_[j])) ++j;
        if (j < src_.size() && (src_[j] == '"' || src_[j] == '\'')) {
          const char quote = src_[j];
          const std::size_t close = src_.find(quote, j + 1);
          if (close == std::string_view::npos) {
            pos_ = src_.size();
            return true;
          }
          value = std::string(src_.substr(j + 1, close - j - 1));
          i = close + 1;
        } else {
          std::size_t k = j;
          while (k < src_.size() && !is_html_space(src_[k]) && src_[k] != '>') {
            ++k;
          }
          value = std::string(src_.substr(j, k - j));
          i = k;
        }
      }
      if (!el.attr(name)) el.attrs.push_back({std::move(name), std::move(value)});
    }
    pos_ = i;
    open_element(std::move(el), self_closing);
    return true;
  }

  void open_element(Node el, bool self_closing) {
    const std::string tag = el.tag;
    if ((tag == "html" || tag == "body" || tag == "head") && in_stack(tag)) {
      return;
    }
    apply_implied_end_tags(tag);

    if (tag == "script" || tag == "style" || tag == "title" ||
        tag == "textarea" || tag == "xmp" || tag == "iframe" ||
        tag == "noembed" || tag == "noframes") {
      if (!self_closing) {
        const std::size_t end = find_raw_end(tag);
        const std::string_view payload = src_.substr(pos_, end - pos_);
        if (!payload.empty()) {
          const bool raw = tag == "script" || tag == "style";
          el.children.push_back(Node{raw ? NodeKind::kRawText : NodeKind::kText,
                                     {}, {}, std::string(payload), {}});
        }
        pos_ = end;
        if (pos_ < src_.size()) {
          const std::size_t close = src_.find('>', pos_);
          pos_ = close == std::string_view::npos ? src_.size() : close + 1;
        }
      }
      current().children.push_back(std::move(el));
      return;
    }
    if (tag == "plaintext") {
      el.children.push_back(Node::text_run(std::string(src_.substr(pos_))));
      pos_ = src_.size();
      current().children.push_back(std::move(el));
      return;
    }

    current().children.push_back(std::move(el));
    if (self_closing || is_void_element(tag)) return;
    if (stack_.size() > kMaxDepth) return;  // content stays in the parent
    stack_.push_back(&current().children.back());
  }

  std::size_t find_raw_end(std::string_view tag) const {
    std::size_t i = pos_;
    while ((i = src_.find("</", i)) != std::string_view::npos) {
      const std::size_t name_end = i + 2 + tag.size();
      if (name_end <= src_.size() &&
          text::iequals(src_.substr(i + 2, tag.size()), tag) &&
          (name_end == src_.size() || is_html_space(src_[name_end]) ||
           src_[name_end] == '>' || src_[name_end] == '/')) {
        return i;
      }
      i += 2;
    }
    return src_.size();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Node root_ = Node::document();
  std::vector<Node*> stack_;
};

}  // namespace detail

/// Parses markup that is already valid UTF-8 into a kDocument node.
/// Never fails: malformed markup is repaired, not rejected.
inline Node parse_markup(std::string_view utf8) {
  return detail::TreeBuilder(utf8).build();
}

/// Parses raw bytes of any encoding (BOM or meta charset, UTF-8 otherwise,
/// invalid sequences replaced). Throws EmptyDocument when nothing but
/// whitespace remains after decoding.
inline Node parse_html(std::string_view raw) {
  const std::string decoded = detail::decode_document(raw);
  if (text::is_blank(decoded)) throw EmptyDocument();
  return parse_markup(decoded);
}

// ---------------------------------------------------------------------------
// Document sets
// ---------------------------------------------------------------------------

/// Retrieved documents concatenated into one forest.
///
/// `forest` is a kDocument node whose children are the root elements, one
/// per document, in retrieval order. `provenance[i]` names the source of
/// root i (may be empty).
struct DocumentSet {
  Node forest = Node::document();
  std::vector<std::string> provenance;

  std::size_t size() const noexcept { return forest.children.size(); }
  const Node& root(std::size_t i) const { return forest.children.at(i); }

  /// Root tags with ordinal suffixes among same-tag roots; roots are always
  /// numbered ("html1", "html2", ...).
  std::vector<std::string> root_labels() const {
    std::vector<std::string> labels;
    labels.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const std::string& tag = forest.children[i].tag;
      std::size_t ordinal = 1;
      for (std::size_t j = 0; j < i; ++j) {
        if (forest.children[j].tag == tag) ++ordinal;
      }
      labels.push_back(tag + std::to_string(ordinal));
    }
    return labels;
  }

  /// Rebuilds a set from a forest whose children are root elements.
  static DocumentSet from_forest(Node forest,
                                 std::vector<std::string> provenance = {}) {
    DocumentSet set;
    for (Node& child : forest.children) {
      if (child.is_element()) set.forest.children.push_back(std::move(child));
    }
    provenance.resize(set.size());
    set.provenance = std::move(provenance);
    return set;
  }

  friend bool operator==(const DocumentSet&, const DocumentSet&) = default;
};

namespace detail {

/// The single root element of a parsed document; content that does not sit
/// under exactly one element is wrapped in <html>.
inline Node document_root(Node doc) {
  if (doc.kind == NodeKind::kElement) return doc;
  const Node* only = nullptr;
  bool wrap = false;
  for (const Node& c : doc.children) {
    if (c.is_element()) {
      if (only) wrap = true;
      only = &c;
    } else if (c.kind == NodeKind::kText && !text::is_blank(c.text)) {
      wrap = true;
    }
  }
  if (only && !wrap) return *only;
  Node html = Node::element("html");
  for (Node& c : doc.children) {
    if (c.kind == NodeKind::kDeclaration) continue;
    html.children.push_back(std::move(c));
  }
  return html;
}

}  // namespace detail

inline DocumentSet concat_documents(std::vector<Node> docs,
                                    std::vector<std::string> provenance = {}) {
  if (docs.empty()) throw EmptyDocumentSet();
  DocumentSet set;
  for (Node& d : docs) {
    set.forest.children.push_back(detail::document_root(std::move(d)));
  }
  provenance.resize(set.size());
  set.provenance = std::move(provenance);
  return set;
}

inline std::string serialize(const DocumentSet& set) {
  return serialize(set.forest);
}

inline std::string extract_text(const DocumentSet& set) {
  return extract_text(set.forest);
}

}  // namespace htmlprune
