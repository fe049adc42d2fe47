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
//! Relevance scorers: BM25 over block texts, the token-tree adapter, and
//! wrappers for fallback and record/replay.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "htmlprune/pruner.hpp"
#include "htmlprune/toktree.hpp"

namespace htmlprune {

/// Lowercased terms: maximal runs of ASCII letters and digits, plus any
/// non-ASCII bytes, so accented and CJK text still forms terms.
inline std::vector<std::string> lexical_terms(std::string_view s) {
  std::vector<std::string> terms;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      cur.push_back(ch);
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(text::ascii_lower(ch));
    } else if (!cur.empty()) {
      terms.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

/// Okapi BM25 with the blocks of one tree as the corpus. Each distinct query
/// term contributes once:
///   idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)
///   score  = sum idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
class LexicalScorer : public TextScorer {
 public:
  explicit LexicalScorer(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}

  double k1() const noexcept { return k1_; }
  double b() const noexcept { return b_; }

  std::vector<double> score_texts(
      std::string_view query,
      const std::vector<std::string>& texts) const override {
    if (texts.empty()) return {};

    std::vector<std::string> qterms;
    {
      std::unordered_set<std::string> seen;
      for (std::string& t : lexical_terms(query)) {
        if (seen.insert(t).second) qterms.push_back(std::move(t));
      }
    }

    const std::size_t n = texts.size();
    std::vector<std::unordered_map<std::string, std::size_t>> tf(n);
    std::vector<std::size_t> dl(n, 0);
    std::unordered_map<std::string, std::size_t> df;
    double total_len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::string& t : lexical_terms(texts[i])) {
        ++dl[i];
        ++tf[i][std::move(t)];
      }
      total_len += static_cast<double>(dl[i]);
      for (const auto& [term, count] : tf[i]) ++df[term];
    }
    const double avgdl = total_len > 0 ? total_len / n : 1.0;

    std::vector<double> idf;
    idf.reserve(qterms.size());
    for (const std::string& q : qterms) {
      auto it = df.find(q);
      const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
      idf.push_back(std::log((n - d + 0.5) / (d + 0.5) + 1.0));
    }

    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = k1_ * (1.0 - b_ + b_ * dl[i] / avgdl);
      for (std::size_t q = 0; q < qterms.size(); ++q) {
        auto it = tf[i].find(qterms[q]);
        if (it == tf[i].end()) continue;
        const double f = static_cast<double>(it->second);
        scores[i] += idf[q] * f * (k1_ + 1.0) / (f + norm);
      }
    }
    return scores;
  }

 private:
  double k1_;
  double b_;
};

/// Builds the model input that precedes the block paths.
using PromptBuilder = std::function<std::vector<TokenId>(
    std::string_view query, const BlockTree& tree, const Tokenizer& tok)>;

/// The pruned HTML followed by the question.
inline std::vector<TokenId> default_prompt(std::string_view query,
                                           const BlockTree& tree,
                                           const Tokenizer& tok) {
  std::string input = serialize(tree.documents());
  input.push_back('\n');
  input.append(query);
  return tok.encode(input);
}

/// Makes a provider for one scoring session. Remote providers use the id to
/// cache prefixes; the mock ignores it.
using ProviderFactory =
    std::function<std::shared_ptr<const LogitsProvider>(const std::string& session)>;

inline ProviderFactory shared_provider(std::shared_ptr<const LogitsProvider> p) {
  return [p = std::move(p)](const std::string&) { return p; };
}

/// Token-tree scoring behind the RelevanceScorer interface: token tree,
/// probabilities, then summed log-probabilities per block path.
class GenerativeScorer : public RelevanceScorer {
 public:
  GenerativeScorer(std::shared_ptr<const Tokenizer> tok, ProviderFactory providers,
                   PromptBuilder prompt = default_prompt)
      : tok_(std::move(tok)),
        providers_(std::move(providers)),
        prompt_(std::move(prompt)) {}

  GenerativeScorer(std::shared_ptr<const Tokenizer> tok,
                   std::shared_ptr<const LogitsProvider> provider)
      : GenerativeScorer(std::move(tok), shared_provider(std::move(provider))) {}

  std::vector<double> score(std::string_view query, const BlockTree& tree,
                            ScoringStats* stats) const override {
    if (tree.empty()) return {};
    const std::vector<TokenId> input = prompt_(query, tree, *tok_);
    text::Fnv1a h;
    h.bytes(query).u64(input.size());
    for (TokenId t : input) h.u64(static_cast<std::uint64_t>(t));
    const auto provider = providers_(text::hex64(h.value()));

    std::vector<ProviderCall> calls;
    const TokenTree trie = compute_probabilities(build_token_tree(tree, *tok_),
                                                 input, *provider, &calls);
    if (stats) {
      const SkipStats s = call_count(trie);
      stats->provider_calls += calls.size();
      stats->token_nodes += s.nodes;
      stats->skipped_nodes += s.skipped;
    }
    return path_scores(trie);
  }

 private:
  std::shared_ptr<const Tokenizer> tok_;
  ProviderFactory providers_;
  PromptBuilder prompt_;
};

/// Uses `fallback` when `primary` throws ScorerUnavailable.
class FallbackScorer : public RelevanceScorer {
 public:
  FallbackScorer(std::shared_ptr<const RelevanceScorer> primary,
                 std::shared_ptr<const RelevanceScorer> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

  std::vector<double> score(std::string_view query, const BlockTree& tree,
                            ScoringStats* stats) const override {
    try {
      return primary_->score(query, tree, stats);
    } catch (const ScorerUnavailable&) {
      return fallback_->score(query, tree, stats);
    }
  }

 private:
  std::shared_ptr<const RelevanceScorer> primary_;
  std::shared_ptr<const RelevanceScorer> fallback_;
};

// ---------------------------------------------------------------------------
// Record and replay
// ---------------------------------------------------------------------------

/// Identifies one scoring request: scorer name, query and every block's path
/// and text.
inline std::string score_key(std::string_view scorer, std::string_view query,
                             const BlockTree& tree) {
  text::Fnv1a h;
  h.bytes(scorer).u64(scorer.size()).bytes(query).u64(query.size());
  h.u64(tree.size());
  for (const BlockNode& b : tree.blocks()) {
    const std::string path = b.path.render();
    h.bytes(path).u64(path.size()).bytes(b.text).u64(b.text.size());
  }
  return text::hex64(h.value());
}

/// Store key for the scoring counters recorded next to `key`.
inline std::string stats_key(const std::string& key) { return key + "/stats"; }

/// Thread-safe map from score_key() to score vectors.
class ScoreStore {
 public:
  void put(const std::string& key, std::vector<double> scores) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_[key] = std::move(scores);
  }

  std::optional<std::vector<double>> get(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Entries ordered by key.
  std::map<std::string, std::vector<double>> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<double>> entries_;
};

/// Passes requests to `inner` and stores every answer.
class RecordingScorer : public RelevanceScorer {
 public:
  RecordingScorer(std::string name, std::shared_ptr<const RelevanceScorer> inner,
                  std::shared_ptr<ScoreStore> store)
      : name_(std::move(name)), inner_(std::move(inner)), store_(std::move(store)) {}

  std::vector<double> score(std::string_view query, const BlockTree& tree,
                            ScoringStats* stats) const override {
    ScoringStats own;
    std::vector<double> scores = inner_->score(query, tree, &own);
    const std::string key = score_key(name_, query, tree);
    store_->put(key, scores);
    if (own.provider_calls || own.token_nodes || own.skipped_nodes) {
      store_->put(stats_key(key), {static_cast<double>(own.provider_calls),
                                   static_cast<double>(own.token_nodes),
                                   static_cast<double>(own.skipped_nodes)});
    }
    if (stats) {
      stats->provider_calls += own.provider_calls;
      stats->token_nodes += own.token_nodes;
      stats->skipped_nodes += own.skipped_nodes;
    }
    return scores;
  }

 private:
  std::string name_;
  std::shared_ptr<const RelevanceScorer> inner_;
  std::shared_ptr<ScoreStore> store_;
};

/// Answers from a store only; a request that was never recorded throws
/// ScorerUnavailable.
class ReplayScorer : public RelevanceScorer {
 public:
  ReplayScorer(std::string name, std::shared_ptr<const ScoreStore> store)
      : name_(std::move(name)), store_(std::move(store)) {}

  std::vector<double> score(std::string_view query, const BlockTree& tree,
                            ScoringStats* stats) const override {
    const std::string key = score_key(name_, query, tree);
    if (auto scores = store_->get(key)) {
      if (scores->size() != tree.size()) {
        throw ScorerUnavailable("recorded " + name_ + " scores for " + key +
                                " have the wrong length");
      }
      if (auto counts = store_->get(stats_key(key)); counts && stats &&
                                                     counts->size() == 3) {
        stats->provider_calls += static_cast<std::size_t>((*counts)[0]);
        stats->token_nodes += static_cast<std::size_t>((*counts)[1]);
        stats->skipped_nodes += static_cast<std::size_t>((*counts)[2]);
      }
      return *std::move(scores);
    }
    throw ScorerUnavailable("no recorded " + name_ + " scores for " + key);
  }

 private:
  std::string name_;
  std::shared_ptr<const ScoreStore> store_;
};

}  // namespace htmlprune
