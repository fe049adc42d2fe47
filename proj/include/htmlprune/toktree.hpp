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
//! Token trees: block paths tokenized and merged into a trie, token
//! probabilities computed depth-first from a logits provider, and block
//! scores as summed log-probabilities along each path.
//!
//! Tokens without siblings get probability 1 and cost no provider call;
//! only sibling groups of two or more are sent to the model, one call per
//! group, with the shared path prefix.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "htmlprune/blocktree.hpp"
#include "htmlprune/error.hpp"
#include "htmlprune/text.hpp"

namespace htmlprune {

using TokenId = std::int64_t;

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<TokenId> encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const TokenId> tokens) const = 0;
};

/// Splits text at tag punctuation: "<", "><" and ">" are tokens and so is
/// every run of other characters, so "<html><div>" becomes
/// {"<", "html", "><", "div", ">"}. Ids are stable content hashes.
class RuleTokenizer : public Tokenizer {
 public:
  std::vector<TokenId> encode(std::string_view s) const override {
    std::vector<TokenId> ids;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t len;
      if (s.compare(i, 2, "><") == 0) {
        len = 2;
      } else if (s[i] == '<' || s[i] == '>') {
        len = 1;
      } else {
        len = 0;
        while (i + len < s.size() && s[i + len] != '<' && s[i + len] != '>') {
          ++len;
        }
      }
      ids.push_back(intern(s.substr(i, len)));
      i += len;
    }
    return ids;
  }

  std::string decode(std::span<const TokenId> tokens) const override {
    std::lock_guard<std::mutex> lock(mu_);
    std::string out;
    for (TokenId t : tokens) {
      auto it = pieces_.find(t);
      if (it == pieces_.end()) {
        throw Error("unknown token id " + std::to_string(t));
      }
      out.append(it->second);
    }
    return out;
  }

 private:
  TokenId intern(std::string_view piece) const {
    const auto id = static_cast<TokenId>(
        text::Fnv1a().bytes(piece).value() & 0x7FFFFFFFULL);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = pieces_.emplace(id, std::string(piece));
    if (!inserted && it->second != piece) {
      throw Error("token id collision between '" + it->second + "' and '" +
                  std::string(piece) + "'");
    }
    return id;
  }

  mutable std::mutex mu_;
  mutable std::unordered_map<TokenId, std::string> pieces_;
};

/// Next-token logits for `candidates` after `prefix` (model input followed
/// by the path tokens generated so far). Must be deterministic and return
/// one finite value per candidate.
class LogitsProvider {
 public:
  virtual ~LogitsProvider() = default;
  virtual std::vector<double> logits(std::span<const TokenId> prefix,
                                     std::span<const TokenId> candidates) const = 0;
};

/// Deterministic stand-in for a model: each logit is a seeded hash of
/// (prefix, candidate) mapped uniformly into [-2, 2].
class MockLogitsProvider : public LogitsProvider {
 public:
  explicit MockLogitsProvider(std::uint64_t seed = 0) : seed_(seed) {}

  std::vector<double> logits(std::span<const TokenId> prefix,
                             std::span<const TokenId> candidates) const override {
    text::Fnv1a base;
    base.u64(seed_).u64(prefix.size());
    for (TokenId t : prefix) base.u64(static_cast<std::uint64_t>(t));
    std::vector<double> out;
    out.reserve(candidates.size());
    for (TokenId c : candidates) {
      text::Fnv1a h = base;
      h.u64(static_cast<std::uint64_t>(c));
      // Extra avalanche; FNV alone is weak in the high bits.
      std::uint64_t x = h.value();
      x ^= x >> 33;
      x *= 0xff51afd7ed558ccdULL;
      x ^= x >> 33;
      const double unit = static_cast<double>(x >> 11) * 0x1.0p-53;
      out.push_back(-2.0 + 4.0 * unit);
    }
    return out;
  }

 private:
  std::uint64_t seed_;
};

struct TokenNode {
  TokenId token = 0;
  /// Level in the trie; the i-th token of a path sits at depth i. The
  /// synthetic root is depth 0.
  std::size_t depth = 0;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  /// Natural log of the token probability; NaN until computed.
  double log_prob = std::numeric_limits<double>::quiet_NaN();
  /// Block whose path ends here.
  std::optional<std::size_t> block;

  bool has_prob() const noexcept { return !std::isnan(log_prob); }
  double prob() const noexcept { return std::exp(log_prob); }
};

/// Trie over token sequences. Node 0 is a synthetic root holding no token;
/// its children are the first tokens of the paths.
class TokenTree {
 public:
  TokenTree() { nodes_.emplace_back(); }

  /// Inserts `tokens` as the path of `block`; shared prefixes are merged.
  void insert(std::span<const TokenId> tokens, std::size_t block) {
    std::size_t at = 0;
    for (TokenId t : tokens) {
      std::optional<std::size_t> next;
      for (std::size_t c : nodes_[at].children) {
        if (nodes_[c].token == t) {
          next = c;
          break;
        }
      }
      if (!next) {
        TokenNode n;
        n.token = t;
        n.depth = nodes_[at].depth + 1;
        n.parent = at;
        nodes_.push_back(std::move(n));
        next = nodes_.size() - 1;
        nodes_[at].children.push_back(*next);
      }
      at = *next;
    }
    if (nodes_[at].block) {
      throw DuplicatePath("block " + std::to_string(block) + " and block " +
                          std::to_string(*nodes_[at].block));
    }
    nodes_[at].block = block;
    if (block_nodes_.size() <= block) block_nodes_.resize(block + 1, 0);
    block_nodes_[block] = at;
  }

  const TokenNode& root() const { return nodes_.front(); }
  const TokenNode& operator[](std::size_t i) const { return nodes_.at(i); }
  TokenNode& operator[](std::size_t i) { return nodes_.at(i); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const TokenNode> nodes() const noexcept { return nodes_; }

  /// Trie node at the end of `block`'s path.
  std::size_t node_of_block(std::size_t block) const {
    return block_nodes_.at(block);
  }
  std::size_t block_count() const noexcept { return block_nodes_.size(); }

  /// Tokens from the first level down to node `i`.
  std::vector<TokenId> tokens_to(std::size_t i) const {
    std::vector<TokenId> out;
    for (std::size_t at = i; at != 0; at = *nodes_[at].parent) {
      out.push_back(nodes_[at].token);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin() + 1, nodes_.end(),
                      [](const TokenNode& n) { return n.children.empty(); }));
  }

 private:
  std::vector<TokenNode> nodes_;
  std::vector<std::size_t> block_nodes_;
};

/// Tokenizes every rendered block path and merges them into one trie.
/// Throws DuplicatePath when two blocks render to the same path.
inline TokenTree build_token_tree(const BlockTree& tree, const Tokenizer& tok) {
  TokenTree trie;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const std::string path = tree[i].path.render();
    if (!seen.insert(path).second) throw DuplicatePath(path);
    trie.insert(tok.encode(path), i);
  }
  return trie;
}

/// One provider invocation, recorded for scheduling analysis.
struct ProviderCall {
  std::size_t node = 0;  // trie node whose children were scored
  std::size_t prefix_length = 0;
};

/// Fills every node's probability. The synthetic root and tokens without
/// siblings get probability 1 with no provider call; each sibling group of
/// K >= 2 gets the softmax of one provider call over the group, given the
/// input prefix and the path tokens above the group. Traversal is
/// depth-first with an explicit stack, so consecutive calls share the
/// longest possible prefix.
inline TokenTree compute_probabilities(TokenTree tree,
                                       std::span<const TokenId> input_prefix,
                                       const LogitsProvider& provider,
                                       std::vector<ProviderCall>* calls = nullptr) {
  tree[0].log_prob = 0.0;
  std::vector<std::size_t> stack = {0};
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    const std::vector<std::size_t> children = tree[at].children;
    if (children.empty()) continue;
    if (children.size() == 1) {
      tree[children.front()].log_prob = 0.0;
    } else {
      std::vector<TokenId> prefix(input_prefix.begin(), input_prefix.end());
      const std::vector<TokenId> path = tree.tokens_to(at);
      prefix.insert(prefix.end(), path.begin(), path.end());
      std::vector<TokenId> candidates;
      candidates.reserve(children.size());
      for (std::size_t c : children) candidates.push_back(tree[c].token);

      std::vector<double> logits;
      try {
        logits = provider.logits(prefix, candidates);
      } catch (const ProviderError&) {
        throw;
      } catch (const std::exception& e) {
        throw ProviderError(e.what(), prefix);
      }
      if (logits.size() != candidates.size()) {
        throw ProviderError("expected " + std::to_string(candidates.size()) +
                                " logits, got " + std::to_string(logits.size()),
                            prefix);
      }
      if (!std::all_of(logits.begin(), logits.end(),
                       [](double v) { return std::isfinite(v); })) {
        throw ProviderError("non-finite logit", prefix);
      }
      if (calls) calls->push_back({at, prefix.size()});

      const double max = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (double l : logits) sum += std::exp(l - max);
      const double log_norm = max + std::log(sum);
      for (std::size_t k = 0; k < children.size(); ++k) {
        tree[children[k]].log_prob = logits[k] - log_norm;
      }
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return tree;
}

struct BlockScore {
  BlockPath path;
  double score = 0.0;  // sum of log-probabilities, <= 0
};

/// Sum of the log-probabilities along each block's path, in block order.
/// Throws IncompleteProbabilities if a needed node has no probability.
inline std::vector<double> path_scores(const TokenTree& trie) {
  std::vector<double> scores;
  scores.reserve(trie.block_count());
  for (std::size_t i = 0; i < trie.block_count(); ++i) {
    double total = 0.0;
    for (std::size_t at = trie.node_of_block(i); at != 0;
         at = *trie[at].parent) {
      if (!trie[at].has_prob()) throw IncompleteProbabilities();
      total += trie[at].log_prob;
    }
    scores.push_back(total);
  }
  return scores;
}

/// Block scores, also written onto the block tree for the pruner.
inline std::vector<BlockScore> score_blocks(const TokenTree& trie,
                                            BlockTree& tree) {
  if (trie.block_count() != tree.size()) {
    throw Error("token tree holds " + std::to_string(trie.block_count()) +
                " blocks, block tree " + std::to_string(tree.size()));
  }
  const std::vector<double> totals = path_scores(trie);
  std::vector<BlockScore> scores;
  scores.reserve(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    tree[i].score = totals[i];
    scores.push_back({tree[i].path, totals[i]});
  }
  return scores;
}

struct SkipStats {
  /// Provider invocations: sibling groups with two or more tokens.
  std::size_t calls = 0;
  /// Trie nodes excluding the synthetic root.
  std::size_t nodes = 0;
  /// Nodes whose probability needs no inference.
  std::size_t skipped = 0;

  double skipped_fraction() const noexcept {
    return nodes == 0 ? 1.0 : static_cast<double>(skipped) / nodes;
  }
};

inline SkipStats call_count(const TokenTree& trie) {
  SkipStats st;
  for (const TokenNode& n : trie.nodes()) {
    if (n.children.size() >= 2) ++st.calls;
    if (n.children.size() == 1) ++st.skipped;
    st.nodes += n.children.size();
  }
  return st;
}

}  // namespace htmlprune
