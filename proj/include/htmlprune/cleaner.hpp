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
//! Query-independent cleaning: drop payloads that carry no visible text,
//! strip attributes, then collapse redundant structure.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "htmlprune/dom.hpp"

namespace htmlprune {

struct CleanConfig {
  std::set<std::string> attr_allowlist;
  std::set<std::string> drop_tags = {"script", "style"};
  bool strip_comments = true;
};

namespace detail {

/// Each maximal whitespace run becomes a single space. Unlike
/// text::collapse_whitespace() the ends are kept, so word boundaries against
/// neighbouring inline elements survive.
inline std::string squeeze_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const text::Scalar sc = text::decode_utf8(s, pos);
    if (sc.valid && text::is_space(sc.value)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.append(s.substr(pos, sc.length));
      in_space = false;
    }
    pos += sc.length;
  }
  return out;
}

inline Node clean_content_impl(const Node& node, const CleanConfig& cfg) {
  Node out{node.kind, node.tag, {}, node.text, {}};
  for (const Attribute& a : node.attrs) {
    if (cfg.attr_allowlist.count(a.name)) out.attrs.push_back(a);
  }
  out.children.reserve(node.children.size());
  for (const Node& child : node.children) {
    switch (child.kind) {
      case NodeKind::kComment:
        if (!cfg.strip_comments) out.children.push_back(child);
        break;
      case NodeKind::kDeclaration:
        // Doctype and processing instructions are never content.
        break;
      case NodeKind::kRawText:
        if (!cfg.drop_tags.count(node.tag)) out.children.push_back(child);
        break;
      case NodeKind::kText:
        // Whitespace is not significant anywhere, <pre> included: blank runs
        // go, other runs keep one space per whitespace run.
        if (!text::is_blank(child.text)) {
          out.children.push_back(Node::text_run(squeeze_whitespace(child.text)));
        }
        break;
      case NodeKind::kElement:
        if (!cfg.drop_tags.count(child.tag)) {
          out.children.push_back(clean_content_impl(child, cfg));
        }
        break;
      case NodeKind::kDocument:
        out.children.push_back(clean_content_impl(child, cfg));
        break;
    }
  }
  return out;
}

/// Text of this element that is not inside a child element, ignoring
/// whitespace-only runs.
inline bool has_attached_text(const Node& node) {
  for (const Node& c : node.children) {
    if (c.kind == NodeKind::kText && !text::is_blank(c.text)) return true;
  }
  return false;
}

/// Post-order rewrite. Children are compressed first, so the decision for
/// this element sees final children and one pass reaches the fixed point.
inline std::optional<Node> compress_impl(const Node& node) {
  if (node.kind != NodeKind::kElement && node.kind != NodeKind::kDocument) {
    return node;
  }
  Node out{node.kind, node.tag, node.attrs, node.text, {}};
  out.children.reserve(node.children.size());
  for (const Node& child : node.children) {
    if (child.is_element()) {
      if (auto c = compress_impl(child)) out.children.push_back(std::move(*c));
    } else {
      out.children.push_back(child);
    }
  }
  if (out.kind == NodeKind::kDocument) return out;
  if (!has_text(out)) return std::nullopt;

  // Single-nested: exactly one child element, and nothing else but blank
  // text runs. The chain collapses to its innermost element.
  const Node* only = nullptr;
  for (const Node& c : out.children) {
    if (c.is_element()) {
      if (only) return out;
      only = &c;
    } else if (c.kind != NodeKind::kText || !text::is_blank(c.text)) {
      return out;
    }
  }
  if (only) return *only;
  return out;
}

}  // namespace detail

/// Removes dropped elements with their payload, comments, declarations,
/// non-allowlisted attributes and whitespace-only text runs.
inline Node clean_content(const Node& tree, const CleanConfig& cfg = {}) {
  return detail::clean_content_impl(tree, cfg);
}

/// Collapses single-nested element chains to the innermost element and
/// removes elements without text. A kDocument is never removed; an element
/// root that has no text at all yields an empty kDocument.
inline Node compress_structure(const Node& tree) {
  if (auto out = detail::compress_impl(tree)) return std::move(*out);
  return Node::document();
}

inline Node clean(const Node& tree, const CleanConfig& cfg = {}) {
  return compress_structure(clean_content(tree, cfg));
}

/// Cleans every root; roots left without text are dropped together with
/// their provenance entry.
inline DocumentSet clean(const DocumentSet& set, const CleanConfig& cfg = {}) {
  DocumentSet out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (auto root =
            detail::compress_impl(clean_content(set.forest.children[i], cfg))) {
      out.forest.children.push_back(std::move(*root));
      out.provenance.push_back(i < set.provenance.size() ? set.provenance[i]
                                                         : std::string());
    }
  }
  return out;
}

inline DocumentSet compress_structure(const DocumentSet& set) {
  DocumentSet out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (auto root = detail::compress_impl(set.forest.children[i])) {
      out.forest.children.push_back(std::move(*root));
      out.provenance.push_back(i < set.provenance.size() ? set.provenance[i]
                                                         : std::string());
    }
  }
  return out;
}

/// True when `tree` has no textless element and no single-nested chain.
inline bool is_compressed(const Node& tree) {
  if (tree.kind == NodeKind::kElement) {
    if (!has_text(tree)) return false;
    std::size_t elements = 0;
    bool other = false;
    for (const Node& c : tree.children) {
      if (c.is_element()) {
        ++elements;
      } else if (c.kind != NodeKind::kText || !text::is_blank(c.text)) {
        other = true;
      }
    }
    if (elements == 1 && !other) return false;
  }
  for (const Node& c : tree.children) {
    if (c.is_element() && !is_compressed(c)) return false;
  }
  return true;
}

}  // namespace htmlprune
