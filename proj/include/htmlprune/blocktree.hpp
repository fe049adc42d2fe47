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
//! Block trees: DOM nodes merged into prunable blocks under a word limit.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "htmlprune/dom.hpp"

namespace htmlprune {

/// Disambiguated tag sequence from a root down to a block's element.
struct BlockPath {
  std::vector<std::string> segments;

  /// "<html1><body><div2><p>"
  std::string render() const {
    if (segments.empty()) return {};
    std::string out = "<";
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i) out.append("><");
      out.append(segments[i]);
    }
    out.push_back('>');
    return out;
  }

  friend bool operator==(const BlockPath&, const BlockPath&) = default;
};

/// Location of a node inside a forest: child indices from the forest root.
using NodeLocation = std::vector<std::uint32_t>;

inline const Node& node_at(const Node& forest, const NodeLocation& loc) {
  const Node* n = &forest;
  for (std::uint32_t i : loc) n = &n->children.at(i);
  return *n;
}

struct BlockNode {
  NodeLocation source;
  /// Pre-order index of the source node among all nodes of the forest (the
  /// forest itself is 0). Orders blocks by document position.
  std::size_t dom_order = 0;
  std::string text;
  bool is_leaf = true;
  std::size_t word_count = 0;
  BlockPath path;
  std::optional<double> score;
  /// Nearest ancestor block, and blocks whose nearest ancestor block is this.
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;

  friend bool operator==(const BlockNode&, const BlockNode&) = default;
};

class BlockTree {
 public:
  BlockTree() = default;
  BlockTree(DocumentSet docs, std::size_t granularity,
            std::vector<BlockNode> blocks)
      : docs_(std::move(docs)),
        granularity_(granularity),
        blocks_(std::move(blocks)) {}

  const DocumentSet& documents() const noexcept { return docs_; }
  std::size_t granularity() const noexcept { return granularity_; }

  /// Blocks in document order.
  std::span<const BlockNode> blocks() const noexcept { return blocks_; }
  std::span<BlockNode> blocks() noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  const BlockNode& operator[](std::size_t i) const { return blocks_.at(i); }
  BlockNode& operator[](std::size_t i) { return blocks_.at(i); }

  const Node& source(const BlockNode& b) const {
    return node_at(docs_.forest, b.source);
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.text);
    return out;
  }

  friend bool operator==(const BlockTree&, const BlockTree&) = default;

 private:
  DocumentSet docs_;
  std::size_t granularity_ = 0;
  std::vector<BlockNode> blocks_;
};

namespace detail {

struct SubtreeStats {
  std::vector<std::size_t> words;  // by pre-order id
  std::vector<std::size_t> sizes;  // node count of the subtree, by id
};

/// Word counts are additive over text runs because extract_text() always
/// separates runs.
inline std::size_t collect_subtree_stats(const Node& node, SubtreeStats& st) {
  const std::size_t id = st.words.size();
  st.words.push_back(0);
  st.sizes.push_back(0);
  std::size_t total =
      node.kind == NodeKind::kText ? text::count_words(node.text) : 0;
  for (const Node& c : node.children) total += collect_subtree_stats(c, st);
  st.words[id] = total;
  st.sizes[id] = st.words.size() - id;
  return total;
}

/// Segment name for child `index` of `parent`; `always_number` is set for
/// roots.
inline std::string path_segment(const Node& parent, std::size_t index,
                                bool always_number) {
  const std::string& tag = parent.children[index].tag;
  std::size_t ordinal = 0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < parent.children.size(); ++i) {
    const Node& c = parent.children[i];
    if (!c.is_element() || c.tag != tag) continue;
    ++same;
    if (i <= index) ++ordinal;
  }
  if (same < 2 && !always_number) return tag;
  return tag + std::to_string(ordinal);
}

}  // namespace detail

/// Recomputes every block's path from its location.
inline BlockTree assign_paths(BlockTree tree) {
  const Node& forest = tree.documents().forest;
  for (BlockNode& b : tree.blocks()) {
    b.path.segments.clear();
    const Node* parent = &forest;
    for (std::size_t depth = 0; depth < b.source.size(); ++depth) {
      const std::uint32_t i = b.source[depth];
      b.path.segments.push_back(detail::path_segment(*parent, i, depth == 0));
      parent = &parent->children[i];
    }
  }
  return tree;
}

/// Breadth-first block construction.
///
/// A visited element without child elements becomes a leaf block. An element
/// whose subtree holds fewer than `max_words` words is merged into one leaf
/// block. Otherwise its child elements are queued and its own attached text,
/// when non-empty, becomes a non-leaf block.
inline BlockTree build_block_tree(const DocumentSet& docs,
                                  std::size_t max_words) {
  if (max_words == 0) throw Error("max_words must be positive");

  detail::SubtreeStats stats;
  detail::collect_subtree_stats(docs.forest, stats);

  struct Item {
    const Node* node;
    NodeLocation loc;
    std::size_t id;
  };
  std::deque<Item> queue;
  std::size_t next_id = 1;
  for (std::size_t i = 0; i < docs.forest.children.size(); ++i) {
    const Node& root = docs.forest.children[i];
    if (root.is_element()) {
      queue.push_back({&root, {static_cast<std::uint32_t>(i)}, next_id});
    }
    next_id += stats.sizes[next_id];
  }

  std::vector<BlockNode> blocks;
  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    const Node& node = *item.node;

    BlockNode block;
    block.source = item.loc;
    block.dom_order = item.id;
    if (element_child_count(node) == 0 || stats.words[item.id] < max_words) {
      block.text = extract_text(node);
      block.is_leaf = true;
    } else {
      std::size_t child_id = item.id + 1;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& c = node.children[i];
        if (c.is_element()) {
          NodeLocation loc = item.loc;
          loc.push_back(static_cast<std::uint32_t>(i));
          queue.push_back({&c, std::move(loc), child_id});
        }
        child_id += stats.sizes[child_id];
      }
      block.text = attached_text(node);
      block.is_leaf = false;
      if (block.text.empty()) continue;
    }
    block.word_count = text::count_words(block.text);
    blocks.push_back(std::move(block));
  }

  std::sort(blocks.begin(), blocks.end(),
            [](const BlockNode& a, const BlockNode& b) {
              return a.dom_order < b.dom_order;
            });

  // Parent = nearest ancestor location that carries a block.
  std::unordered_map<std::string, std::size_t> by_location;
  auto key = [](const NodeLocation& loc, std::size_t len) {
    return std::string(reinterpret_cast<const char*>(loc.data()),
                       len * sizeof(std::uint32_t));
  };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    by_location.emplace(key(blocks[i].source, blocks[i].source.size()), i);
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const NodeLocation& loc = blocks[i].source;
    for (std::size_t len = loc.size(); len-- > 1;) {
      auto it = by_location.find(key(loc, len));
      if (it != by_location.end()) {
        blocks[i].parent = it->second;
        blocks[it->second].children.push_back(i);
        break;
      }
    }
  }

  return assign_paths(BlockTree(docs, max_words, std::move(blocks)));
}

/// Rebuilds the tree over the same documents with a finer word limit.
inline BlockTree refine_granularity(const BlockTree& tree,
                                    std::size_t finer_max_words) {
  if (finer_max_words >= tree.granularity()) {
    throw InvalidGranularity(finer_max_words, tree.granularity());
  }
  return build_block_tree(tree.documents(), finer_max_words);
}

}  // namespace htmlprune
