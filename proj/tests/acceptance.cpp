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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "htmlprune/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/random_dom.hpp"

namespace {

using namespace htmlprune;
namespace ht = htmlprune::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and limits.
constexpr double kScoreTolerance = 1e-9;
constexpr double kProbabilitySumTolerance = 1e-9;
constexpr double kMinCleanShrink = 0.85;
constexpr double kMaxCleanSeconds = 60.0;
constexpr double kMaxPipelineSeconds = 30.0;
constexpr std::size_t kCorpusSize = 200;
constexpr std::size_t kRandomCleanTrees = 1000;
constexpr std::size_t kRandomBlockDoms = 500;
constexpr std::size_t kRandomPruneTrees = 500;
constexpr std::size_t kRandomTokenTrees = 300;
constexpr std::size_t kMaxTokenTreeBlocks = 50;
constexpr double kReferenceSkippedFraction = 0.45;

const fs::path kData = HTMLPRUNE_TEST_DATA;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<fs::path> html_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".html") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& name, const Outcome& o) {
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name
            << "  (" << o.detail << ")" << std::endl;
  if (!o.pass) ++failures;
}

/// Seeded damage: dropped end tags, stray end tags, unclosed start tags and
/// a truncation.
std::string mutate(std::string s, std::mt19937_64& rng) {
  auto positions = [&](const std::string& needle) {
    std::vector<std::size_t> at;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) {
      at.push_back(p);
    }
    return at;
  };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (int k = 0; k < 6; ++k) {
    const std::vector<std::size_t> gts = positions(">");
    if (gts.empty()) break;
    switch (pick(4)) {
      case 0: {
        const std::vector<std::size_t> ends = positions("</");
        if (ends.empty()) break;
        const std::size_t p = ends[pick(ends.size())];
        const std::size_t q = s.find('>', p);
        if (q != std::string::npos) s.erase(p, q - p + 1);
        break;
      }
      case 1:
        s.insert(gts[pick(gts.size())] + 1, std::array<const char*, 3>{"</div>", "</p>", "</td>"}[pick(3)]);
        break;
      case 2:
        s.insert(gts[pick(gts.size())] + 1, std::array<const char*, 3>{"<div>", "<b>", "<li>"}[pick(3)]);
        break;
      default: {
        const std::vector<std::size_t> lts = positions("<");
        std::vector<std::size_t> late;
        for (std::size_t p : lts) {
          if (p > s.size() / 2) late.push_back(p);
        }
        if (!late.empty()) s.resize(late[pick(late.size())]);
      }
    }
  }
  return s;
}

// 1 ------------------------------------------------------------------------

Outcome cleaning_losslessness() {
  const auto start = Clock::now();
  std::vector<std::string> corpus;
  std::vector<std::string> names;
  for (const char* dir : {"pages", "synthetic", "malformed"}) {
    for (const fs::path& p : html_files(kData / dir)) {
      corpus.push_back(read_file(p));
      names.push_back(p.filename().string());
    }
  }
  const std::size_t files = corpus.size();
  std::mt19937_64 rng(20261019);
  for (std::size_t i = 0; corpus.size() < kCorpusSize; ++i) {
    corpus.push_back(mutate(corpus[i % 94], rng));
    names.push_back("mutated-" + names[i % 94]);
  }

  std::size_t bad_text = 0, bad_idem = 0;
  std::string first;
  auto check = [&](const Node& t, const std::string& name) {
    const Node once = clean(t);
    if (extract_text(once) != extract_text(t)) {
      ++bad_text;
      if (first.empty()) first = name;
    }
    if (clean(once) != once) {
      ++bad_idem;
      if (first.empty()) first = name;
    }
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) check(parse_html(corpus[i]), names[i]);
  ht::RandomDom gen(1);
  for (std::size_t i = 0; i < kRandomCleanTrees; ++i) check(gen.tree(), "random-" + std::to_string(i));

  const double secs = seconds_since(start);
  Outcome o;
  o.pass = bad_text == 0 && bad_idem == 0 && secs < kMaxCleanSeconds;
  o.detail = std::to_string(corpus.size()) + " pages (" + std::to_string(files) + " files + " +
             std::to_string(corpus.size() - files) + " mutated) + " +
             std::to_string(kRandomCleanTrees) + " random trees; text mismatches " +
             std::to_string(bad_text) + ", non-idempotent " + std::to_string(bad_idem) +
             (first.empty() ? "" : ", first " + first) + "; " + std::to_string(secs) + " s";
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome cleaning_shrink() {
  const std::vector<fs::path> pages = html_files(kData / "pages");
  double total = 0.0;
  double worst = 1.0;
  for (const fs::path& p : pages) {
    const DocumentSet raw = concat_documents({parse_html(read_file(p))});
    const double before = static_cast<double>(serialize(raw).size());
    const double after = static_cast<double>(serialize(clean(raw)).size());
    const double shrink = 1.0 - after / before;
    total += shrink;
    worst = std::min(worst, shrink);
  }
  const double mean = total / static_cast<double>(pages.size());
  Outcome o;
  o.pass = pages.size() >= 50 && mean >= kMinCleanShrink;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu real pages, mean reduction %.2f%% (threshold %.0f%%), min %.2f%%",
                pages.size(), 100 * mean, 100 * kMinCleanShrink, 100 * worst);
  o.detail = buf;
  return o;
}

// 3 ------------------------------------------------------------------------

Outcome block_tree_oracle() {
  ht::RandomDom gen(3);
  std::size_t compared = 0, mismatched = 0, partition_bad = 0;
  for (std::size_t i = 0; i < kRandomBlockDoms; ++i) {
    const DocumentSet set = gen.document_set();
    for (std::size_t g : {2u, 8u, 64u, 256u}) {
      ++compared;
      const BlockTree t = build_block_tree(set, g);
      const std::vector<ht::RefBlock> ref = ht::reference_blocks(set, g);
      bool same = t.size() == ref.size();
      for (std::size_t k = 0; same && k < ref.size(); ++k) {
        same = t[k].source == ref[k].loc && t[k].text == ref[k].text && t[k].is_leaf == ref[k].leaf;
      }
      if (!same) ++mismatched;
      std::multiset<std::string> words;
      for (const BlockNode& b : t.blocks()) {
        for (std::string& w : ht::oracle_split(b.text)) words.insert(std::move(w));
      }
      if (words != ht::word_multiset(ht::join_words(ht::oracle_words(set.forest)))) ++partition_bad;
    }
  }
  Outcome o;
  o.pass = mismatched == 0 && partition_bad == 0;
  o.detail = std::to_string(compared) + " trees x granularities; block mismatches " +
             std::to_string(mismatched) + ", partition violations " + std::to_string(partition_bad);
  return o;
}

// 4 ------------------------------------------------------------------------

bool has_empty_element(const Node& n) {
  if (n.is_element() && !ht::oracle_has_text(n)) return true;
  for (const Node& c : n.children) {
    if (has_empty_element(c)) return true;
  }
  return false;
}

Outcome pruning_oracle() {
  ht::RandomDom gen(4);
  std::mt19937_64 rng(4);
  std::size_t bad_set = 0, bad_output = 0, over = 0, empty = 0, deletions = 0;
  for (std::size_t i = 0; i < kRandomPruneTrees; ++i) {
    const DocumentSet set = clean(gen.document_set());
    const BlockTree t = build_block_tree(set, std::array<std::size_t, 4>{1, 3, 8, 32}[i % 4]);
    std::vector<double> s(t.size());
    // Few distinct values so ties are common.
    for (double& x : s) x = static_cast<double>(rng() % 5) / 4.0;
    const std::size_t full = Budget::words(0).measure(set);
    const Budget b = Budget::words(std::uniform_int_distribution<std::size_t>(0, full)(rng));

    const std::vector<std::size_t> order = ht::reference_order(t, s);
    const ht::RefPrune ref = ht::reference_prune(t, s, b);
    const PruneResult r = prune_with_scores(t, s, b);
    deletions += r.deleted.size();
    const std::vector<std::size_t> prefix(order.begin(),
                                          order.begin() + static_cast<std::ptrdiff_t>(r.deleted.size()));
    if (r.deleted != prefix || r.deleted != ref.deleted) ++bad_set;
    if (r.documents.forest != ref.output.forest) ++bad_output;
    if (b.measure(r.documents) > b.limit || r.length > b.limit) ++over;
    if (has_empty_element(r.documents.forest)) ++empty;
  }
  Outcome o;
  o.pass = bad_set == 0 && bad_output == 0 && over == 0 && empty == 0;
  o.detail = std::to_string(kRandomPruneTrees) + " trees, " + std::to_string(deletions) +
             " deletions; deleted-set mismatches " + std::to_string(bad_set) +
             ", output mismatches " + std::to_string(bad_output) + ", over budget " +
             std::to_string(over) + ", empty elements " + std::to_string(empty);
  return o;
}

// 5 ------------------------------------------------------------------------

std::vector<std::size_t> ranking(const std::vector<double>& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return idx;
}

Outcome token_tree_oracle() {
  const RuleTokenizer tok;
  const MockLogitsProvider provider(5);
  ht::RandomDom gen(5, {.max_nodes = 120});
  std::mt19937_64 rng(5);
  std::size_t trees = 0, blocks = 0, score_bad = 0, rank_bad = 0, sum_bad = 0, attempts = 0;
  double worst = 0.0;
  while (trees < kRandomTokenTrees && attempts < 100 * kRandomTokenTrees) {
    ++attempts;
    const DocumentSet set = clean(gen.document_set());
    const std::size_t g = std::array<std::size_t, 4>{1, 2, 4, 8}[rng() % 4];
    BlockTree t = build_block_tree(set, g);
    if (t.empty() || t.size() > kMaxTokenTreeBlocks) continue;
    ++trees;
    blocks += t.size();
    const std::vector<TokenId> input = tok.encode("query " + std::to_string(trees));

    const TokenTree trie = compute_probabilities(build_token_tree(t, tok), input, provider);
    std::vector<double> got;
    for (const BlockScore& bs : score_blocks(trie, t)) got.push_back(bs.score);

    std::vector<std::vector<TokenId>> paths;
    for (const BlockNode& b : t.blocks()) paths.push_back(tok.encode(b.path.render()));
    const std::vector<double> ref = ht::noskip_scores(paths, input, provider);

    bool close = got.size() == ref.size();
    for (std::size_t k = 0; close && k < got.size(); ++k) {
      worst = std::max(worst, std::abs(got[k] - ref[k]));
      close = std::abs(got[k] - ref[k]) <= kScoreTolerance;
    }
    if (!close) ++score_bad;
    if (ranking(got) != ranking(ref)) ++rank_bad;
    for (const TokenNode& n : trie.nodes()) {
      if (n.children.empty()) continue;
      double sum = 0.0;
      for (std::size_t c : n.children) sum += trie[c].prob();
      if (std::abs(sum - 1.0) > kProbabilitySumTolerance) ++sum_bad;
    }
  }
  Outcome o;
  o.pass = trees == kRandomTokenTrees && score_bad == 0 && rank_bad == 0 && sum_bad == 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", worst);
  o.detail = std::to_string(trees) + " trees, " + std::to_string(blocks) +
             " blocks; max |diff| " + buf + ", score mismatches " + std::to_string(score_bad) +
             ", ranking mismatches " + std::to_string(rank_bad) + ", bad sibling sums " +
             std::to_string(sum_bad);
  return o;
}

// 6 ------------------------------------------------------------------------

/// Counts provider calls made through it.
class CountingProvider : public LogitsProvider {
 public:
  explicit CountingProvider(const LogitsProvider& inner) : inner_(inner) {}
  std::vector<double> logits(std::span<const TokenId> prefix,
                             std::span<const TokenId> candidates) const override {
    ++calls;
    return inner_.logits(prefix, candidates);
  }
  mutable std::size_t calls = 0;

 private:
  const LogitsProvider& inner_;
};

/// Prefixes followed by two or more distinct next tokens, counted straight
/// from the token sequences.
std::size_t branching_prefixes(const std::vector<std::vector<TokenId>>& paths) {
  std::map<std::vector<TokenId>, std::set<TokenId>> next;
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[std::vector<TokenId>(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i))].insert(p[i]);
    }
  }
  std::size_t n = 0;
  for (const auto& [prefix, tokens] : next) n += tokens.size() >= 2;
  return n;
}

Outcome skipping_economy() {
  const fs::path fixture = kData / "pipeline";
  const PipelineConfig cfg = load_config(fixture / "config.json");
  const RuleTokenizer tok;
  const MockLogitsProvider mock(cfg.mock_seed);

  std::size_t trees = 0, calls = 0, groups = 0, mismatched = 0;
  std::istringstream lines(read_file(fixture / "records.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    const QueryRecord rec = parse_record(json::parse(line), fixture);
    const DocumentSet cleaned = clean(parse_documents(rec.htmls, rec.provenance));
    const BlockTree coarse = build_block_tree(cleaned, cfg.prune.coarse_granularity);
    const PruneResult first = prune(coarse, rec.query, LexicalScorer(),
                                    Budget::words(cfg.prune.intermediate_budget));
    const BlockTree fine = build_block_tree(first.documents, cfg.prune.fine_granularity);

    std::vector<std::vector<TokenId>> paths;
    for (const BlockNode& b : fine.blocks()) paths.push_back(tok.encode(b.path.render()));
    const CountingProvider counting(mock);
    compute_probabilities(build_token_tree(fine, tok), default_prompt(rec.query, fine, tok),
                          counting);
    const std::size_t expected = branching_prefixes(paths);
    ++trees;
    calls += counting.calls;
    groups += expected;
    if (counting.calls != expected) ++mismatched;
  }

  // Skippable share of trie nodes on whole cleaned pages.
  std::size_t nodes = 0, skipped = 0;
  for (const fs::path& p : html_files(kData / "pages")) {
    const DocumentSet cleaned = clean(concat_documents({parse_html(read_file(p))}));
    if (cleaned.size() == 0) continue;
    const SkipStats st =
        call_count(build_token_tree(build_block_tree(cleaned, cfg.prune.fine_granularity), tok));
    nodes += st.nodes;
    skipped += st.skipped;
  }
  const double fraction = nodes == 0 ? 0.0 : static_cast<double>(skipped) / nodes;

  Outcome o;
  o.pass = trees == 20 && mismatched == 0;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu fixture trees: %zu provider calls vs %zu groups with K>=2, %zu mismatched; "
                "skipped-node fraction on cleaned real pages %.1f%% (reference ~%.0f%%, directional)",
                trees, calls, groups, mismatched, 100 * fraction, 100 * kReferenceSkippedFraction);
  o.detail = buf;
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome path_fidelity() {
  const char* html =
      "<html><head><title>Royal Rumble 2024</title></head><body>"
      "<div><p>Royal Rumble results and analysis</p><p>Cody Rhodes won again</p></div>"
      "<div><p>The match lasted just over an hour</p><span>Sources and credits</span></div>"
      "</body></html>";
  const DocumentSet docs = clean(concat_documents({parse_html(html)}));
  const BlockTree t = build_block_tree(docs, 4);
  const std::string expected = "<html1><body><div2><p>";
  bool found = false;
  std::string listing;
  for (const BlockNode& b : t.blocks()) {
    const std::string path = b.path.render();
    listing += (listing.empty() ? "" : " ") + path;
    if (path == expected && b.text == "The match lasted just over an hour") found = true;
  }
  return {found, "expected " + expected + "; paths: " + listing};
}

// 8 ------------------------------------------------------------------------

Outcome pipeline_determinism() {
  const fs::path fixture = kData / "pipeline";
  const fs::path out_dir = fs::temp_directory_path() / "htmlprune-acceptance";
  fs::create_directories(out_dir);
  const auto start = Clock::now();
  std::vector<std::string> outputs;
  std::vector<std::string> labels;
  int bad_exit = 0;
  for (int workers : {1, 8}) {
    for (int run = 1; run <= 2; ++run) {
      const fs::path out = out_dir / ("w" + std::to_string(workers) + "-r" + std::to_string(run) + ".jsonl");
      const std::string cmd = std::string(HTMLPRUNE_CLI) + " pipeline --config " +
                              (fixture / "config.json").string() + " -i " +
                              (fixture / "records.jsonl").string() + " --replay " +
                              (fixture / "recording.json").string() + " --workers " +
                              std::to_string(workers) + " -o " + out.string() + " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++bad_exit;
      outputs.push_back(fs::exists(out) ? read_file(out) : std::string());
      labels.push_back(out.filename().string());
    }
  }
  const double secs = seconds_since(start);
  std::size_t rows = 0, errors = 0;
  std::istringstream in(outputs.front());
  for (std::string line; std::getline(in, line);) {
    ++rows;
    errors += json::parse(line).contains("error");
  }
  const bool identical = std::all_of(outputs.begin(), outputs.end(),
                                     [&](const std::string& s) { return s == outputs.front(); });
  Outcome o;
  o.pass = identical && bad_exit == 0 && rows == 20 && errors == 0 && secs < kMaxPipelineSeconds;
  o.detail = std::to_string(outputs.size()) + " runs (workers 1 and 8, twice each), " +
             (identical ? "byte-identical" : "outputs differ") + ", " + std::to_string(rows) +
             " records, " + std::to_string(errors) + " errors, " + std::to_string(outputs.front().size()) +
             " bytes; " + std::to_string(secs) + " s total";
  fs::remove_all(out_dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"cleaning is lossless and idempotent", cleaning_losslessness},
      {"cleaning shrinks real pages", cleaning_shrink},
      {"block tree matches breadth-first reference", block_tree_oracle},
      {"greedy pruning matches one-at-a-time reference", pruning_oracle},
      {"token tree matches unskipped computation", token_tree_oracle},
      {"provider calls equal branching groups", skipping_economy},
      {"block path string form", path_fidelity},
      {"pipeline output is deterministic", pipeline_determinism},
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(static_cast<int>(i + 1), criteria[i].first, o);
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
