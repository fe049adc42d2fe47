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
//! Greedy block pruning under a length budget, and the two-stage schedule
//! (coarse blocks scored by text, then fine blocks scored by paths).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htmlprune/blocktree.hpp"
#include "htmlprune/cleaner.hpp"
#include "htmlprune/dom.hpp"
#include "htmlprune/error.hpp"

namespace htmlprune {

// ---------------------------------------------------------------------------
// Scorers
// ---------------------------------------------------------------------------

/// Counters a scorer may fill in; only generative scorers call a model.
struct ScoringStats {
  std::size_t provider_calls = 0;
  std::size_t token_nodes = 0;
  std::size_t skipped_nodes = 0;
};

/// Relevance of every block of a tree to a query; higher is more relevant.
/// Implementations must be deterministic, return one finite value per block
/// in block order, and be safe to call from several threads.
class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;

  virtual std::vector<double> score(std::string_view query,
                                    const BlockTree& tree,
                                    ScoringStats* stats) const = 0;

  std::vector<double> score_blocks(std::string_view query,
                                   const BlockTree& tree) const {
    return score(query, tree, nullptr);
  }
};

/// A scorer that only looks at the plain text of each block.
class TextScorer : public RelevanceScorer {
 public:
  virtual std::vector<double> score_texts(
      std::string_view query, const std::vector<std::string>& texts) const = 0;

  std::vector<double> score(std::string_view query, const BlockTree& tree,
                            ScoringStats* /*stats*/) const override {
    return score_texts(query, tree.texts());
  }
};

/// Fixed scores, e.g. replayed from a recording.
class StaticScorer : public RelevanceScorer {
 public:
  explicit StaticScorer(std::vector<double> scores)
      : scores_(std::move(scores)) {}

  std::vector<double> score(std::string_view, const BlockTree&,
                            ScoringStats*) const override {
    return scores_;
  }

 private:
  std::vector<double> scores_;
};

// ---------------------------------------------------------------------------
// Budgets
// ---------------------------------------------------------------------------

enum class BudgetUnit { kWords, kTokens };

/// Words of the visible text of serialized markup.
inline std::size_t count_markup_words(std::string_view html) {
  return text::count_words(extract_text(parse_markup(html)));
}

/// Approximate LLM tokens of serialized markup, tags included.
inline std::size_t count_markup_tokens(std::string_view html) {
  return text::count_tokens(html);
}

/// Maximum length of the serialized output. The counter must return 0 for
/// empty input and never grow when a substring is removed.
struct Budget {
  std::size_t limit = 0;
  BudgetUnit unit = BudgetUnit::kWords;
  std::function<std::size_t(std::string_view)> counter = count_markup_words;

  static Budget words(std::size_t limit) {
    return {limit, BudgetUnit::kWords, count_markup_words};
  }
  static Budget tokens(std::size_t limit) {
    return {limit, BudgetUnit::kTokens, count_markup_tokens};
  }
  static Budget of(BudgetUnit unit, std::size_t limit) {
    return unit == BudgetUnit::kWords ? words(limit) : tokens(limit);
  }

  std::size_t measure(const DocumentSet& docs) const {
    return counter(serialize(docs));
  }
};

// ---------------------------------------------------------------------------
// Greedy pruning
// ---------------------------------------------------------------------------

struct Deletion {
  std::size_t block = 0;
  std::string path;
  double score = 0.0;
  std::size_t length_after = 0;
  /// Pruning stage that made the deletion, 1 or 2.
  int stage = 1;
};

struct PruneOptions {
  /// Record the length after every deletion. Costs one serialization per
  /// deleted block.
  bool audit = false;
};

struct PruneResult {
  DocumentSet documents;
  /// Deleted block indices, in deletion order.
  std::vector<std::size_t> deleted;
  /// Budget length of `documents`.
  std::size_t length = 0;
  std::vector<Deletion> audit;
};

/// Block indices sorted for deletion: ascending score, and on equal scores
/// the block later in the document goes first.
inline std::vector<std::size_t> deletion_order(const BlockTree& tree,
                                               std::span<const double> scores) {
  std::vector<std::size_t> order(tree.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return tree[a].dom_order > tree[b].dom_order;
  });
  return order;
}

/// Merges single-nested chains and removes emptied elements after deletion.
inline Node readjust(const Node& tree) { return compress_structure(tree); }
inline DocumentSet readjust(const DocumentSet& docs) {
  return compress_structure(docs);
}

namespace detail {

/// Flat, mutable view of a forest used to replay deletions without copying
/// the tree for every candidate.
class DeletionArena {
 public:
  explicit DeletionArena(const Node& forest) {
    index(forest, -1);
    alive_.assign(slots_.size(), 1);
    live_runs_.assign(slots_.size(), 0);
    sizes_.assign(slots_.size(), 1);
    for (std::size_t i = slots_.size(); i-- > 0;) {
      const Node& n = *slots_[i].node;
      if (n.kind == NodeKind::kText && !text::is_blank(n.text)) {
        live_runs_[i] += 1;
      }
      if (slots_[i].parent >= 0) {
        const auto p = static_cast<std::size_t>(slots_[i].parent);
        live_runs_[p] += live_runs_[i];
        sizes_[p] += sizes_[i];
      }
    }
    initial_runs_ = live_runs_;
  }

  void reset() {
    std::fill(alive_.begin(), alive_.end(), 1);
    live_runs_ = initial_runs_;
  }

  /// Deletes the block at pre-order id `id`: the whole element for a leaf
  /// block, only the attached text runs otherwise. Emptied ancestors go too.
  void delete_block(std::size_t id, bool is_leaf) {
    if (!alive_[id]) return;
    int cursor;
    if (is_leaf) {
      kill(id);
      cursor = slots_[id].parent;
    } else {
      for (std::size_t c : slots_[id].children) {
        if (slots_[c].node->kind == NodeKind::kText) kill(c);
      }
      cursor = static_cast<int>(id);
    }
    while (cursor > 0 && live_runs_[static_cast<std::size_t>(cursor)] == 0) {
      const std::size_t p = static_cast<std::size_t>(cursor);
      cursor = slots_[p].parent;
      kill(p);
    }
  }

  Node materialize() const { return copy(0); }

  std::vector<bool> alive_roots() const {
    std::vector<bool> out;
    for (std::size_t c : slots_[0].children) out.push_back(alive_[c] != 0);
    return out;
  }

 private:
  struct Slot {
    const Node* node;
    int parent;
    std::vector<std::size_t> children;
  };

  void index(const Node& n, int parent) {
    const std::size_t id = slots_.size();
    slots_.push_back({&n, parent, {}});
    if (parent >= 0) slots_[static_cast<std::size_t>(parent)].children.push_back(id);
    for (const Node& c : n.children) index(c, static_cast<int>(id));
  }

  void kill(std::size_t id) {
    if (!alive_[id]) return;
    const std::size_t runs = live_runs_[id];
    for (std::size_t i = id, end = id + sizes_[id]; i < end;) {
      if (!alive_[i]) {
        i += sizes_[i];
        continue;
      }
      alive_[i] = 0;
      ++i;
    }
    for (int p = slots_[id].parent; p >= 0;
         p = slots_[static_cast<std::size_t>(p)].parent) {
      live_runs_[static_cast<std::size_t>(p)] -= runs;
    }
  }

  Node copy(std::size_t id) const {
    const Node& src = *slots_[id].node;
    Node out{src.kind, src.tag, src.attrs, src.text, {}};
    for (std::size_t c : slots_[id].children) {
      if (alive_[c]) out.children.push_back(copy(c));
    }
    return out;
  }

  std::vector<Slot> slots_;
  std::vector<char> alive_;
  std::vector<std::size_t> live_runs_;
  std::vector<std::size_t> initial_runs_;
  std::vector<std::size_t> sizes_;
};

inline void validate_scores(const BlockTree& tree,
                            std::span<const double> scores) {
  if (scores.size() != tree.size()) {
    throw Error("scorer returned " + std::to_string(scores.size()) +
                " scores for " + std::to_string(tree.size()) + " blocks");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("scorer returned a non-finite score");
  }
}

}  // namespace detail

/// Deletes blocks in deletion_order() until the serialized forest fits the
/// budget, then re-adjusts structure. Throws BudgetUnattainable if deleting
/// every block is still not enough.
inline PruneResult prune_with_scores(const BlockTree& tree,
                                     std::span<const double> scores,
                                     const Budget& budget,
                                     const PruneOptions& options = {}) {
  detail::validate_scores(tree, scores);
  const std::vector<std::size_t> order = deletion_order(tree, scores);
  detail::DeletionArena arena(tree.documents().forest);

  auto apply = [&](std::size_t k) {
    arena.reset();
    for (std::size_t i = 0; i < k; ++i) {
      const BlockNode& b = tree[order[i]];
      arena.delete_block(b.dom_order, b.is_leaf);
    }
    return budget.counter(serialize(arena.materialize()));
  };

  // The counter is monotone in the number of deletions, so the first prefix
  // that fits is found by bisection.
  std::size_t lo = 0;
  std::size_t hi = order.size();
  if (const std::size_t floor = apply(hi); floor > budget.limit) {
    throw BudgetUnattainable(budget.limit, floor);
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (apply(mid) <= budget.limit) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }

  PruneResult result;
  result.deleted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
  if (options.audit) {
    for (std::size_t i = 0; i < lo; ++i) {
      const BlockNode& b = tree[order[i]];
      result.audit.push_back(
          {order[i], b.path.render(), scores[order[i]], apply(i + 1)});
    }
  }
  apply(lo);
  std::vector<std::string> provenance;
  const std::vector<bool> roots = arena.alive_roots();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!roots[i]) continue;
    const auto& prov = tree.documents().provenance;
    provenance.push_back(i < prov.size() ? prov[i] : std::string());
  }
  DocumentSet pruned =
      DocumentSet::from_forest(arena.materialize(), std::move(provenance));
  result.documents = readjust(pruned);
  result.length = budget.measure(result.documents);
  return result;
}

/// Scores every block once, then prunes greedily.
inline PruneResult prune(const BlockTree& tree, std::string_view query,
                         const RelevanceScorer& scorer, const Budget& budget,
                         const PruneOptions& options = {},
                         ScoringStats* stats = nullptr) {
  const std::vector<double> scores = scorer.score(query, tree, stats);
  return prune_with_scores(tree, scores, budget, options);
}

// ---------------------------------------------------------------------------
// Two-stage schedule
// ---------------------------------------------------------------------------

struct PruneConfig {
  std::size_t coarse_granularity = 256;
  std::size_t fine_granularity = 128;
  std::size_t intermediate_budget = 8192;
  std::size_t final_budget = 4096;
  BudgetUnit unit = BudgetUnit::kWords;
  bool generative_stage = true;

  void validate() const {
    if (coarse_granularity == 0 || fine_granularity == 0) {
      throw ConfigError("granularities must be positive");
    }
    if (intermediate_budget == 0 || final_budget == 0) {
      throw ConfigError("budgets must be positive");
    }
    if (generative_stage && fine_granularity >= coarse_granularity) {
      throw ConfigError("fine granularity must be smaller than coarse");
    }
    if (final_budget > intermediate_budget) {
      throw ConfigError("final budget must not exceed intermediate budget");
    }
  }
};

struct TwoStageResult {
  DocumentSet stage1;
  DocumentSet output;
  std::size_t input_length = 0;
  std::size_t stage1_length = 0;
  std::size_t output_length = 0;
  std::size_t coarse_blocks = 0;
  std::size_t fine_blocks = 0;
  std::vector<Deletion> audit;
  ScoringStats generative;
};

/// Coarse tree pruned by `embed_scorer` to the intermediate budget, then a
/// finer tree over the survivors pruned by `gen_scorer` to the final budget.
/// With the generative stage off, `output` is the first stage's result.
inline TwoStageResult two_stage_pipeline(const DocumentSet& docs,
                                         std::string_view query,
                                         const RelevanceScorer& embed_scorer,
                                         const RelevanceScorer* gen_scorer,
                                         const PruneConfig& cfg,
                                         const PruneOptions& options = {}) {
  cfg.validate();
  if (cfg.generative_stage && gen_scorer == nullptr) {
    throw ConfigError("generative stage enabled without a generative scorer");
  }
  TwoStageResult out;
  const Budget mid = Budget::of(cfg.unit, cfg.intermediate_budget);
  out.input_length = mid.measure(docs);

  const BlockTree coarse = build_block_tree(docs, cfg.coarse_granularity);
  out.coarse_blocks = coarse.size();
  PruneResult first = prune(coarse, query, embed_scorer, mid, options);
  out.audit = std::move(first.audit);
  out.stage1 = std::move(first.documents);
  out.stage1_length = first.length;

  if (!cfg.generative_stage || gen_scorer == nullptr) {
    out.output = out.stage1;
    out.output_length = out.stage1_length;
    return out;
  }

  const Budget fin = Budget::of(cfg.unit, cfg.final_budget);
  const BlockTree fine = build_block_tree(out.stage1, cfg.fine_granularity);
  out.fine_blocks = fine.size();
  PruneResult second =
      prune(fine, query, *gen_scorer, fin, options, &out.generative);
  for (Deletion& d : second.audit) {
    d.stage = 2;
    out.audit.push_back(std::move(d));
  }
  out.output = std::move(second.documents);
  out.output_length = second.length;
  return out;
}

}  // namespace htmlprune
