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
//! Batch orchestration: configuration, JSONL records, the per-record
//! clean -> coarse prune -> fine prune run, and summary statistics.

#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "htmlprune/cleaner.hpp"
#include "htmlprune/net.hpp"
#include "htmlprune/pruner.hpp"
#include "htmlprune/scorers.hpp"
#include "htmlprune/toktree.hpp"

namespace htmlprune {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Stage1Scorer { kLexical, kEmbedding };
enum class ProviderKind { kMock, kHttp };

struct PipelineConfig {
  PruneConfig prune;
  CleanConfig clean;
  Stage1Scorer stage1 = Stage1Scorer::kLexical;
  ProviderKind provider = ProviderKind::kMock;
  std::uint64_t mock_seed = 0;
  std::string embedding_endpoint;
  std::string logits_endpoint;
  std::size_t embedding_batch_size = 128;
  HttpOptions http;
  /// Use the lexical scorer when the embedding service is unavailable.
  bool fallback_to_lexical = false;
  std::size_t workers = 1;
  /// Wall-clock timings in results. Off by default so output is
  /// reproducible byte for byte.
  bool timings = false;

  void validate() const {
    prune.validate();
    if (workers == 0) throw ConfigError("workers must be positive");
    if (stage1 == Stage1Scorer::kEmbedding && embedding_endpoint.empty()) {
      throw ConfigError("embedding scorer selected without an endpoint");
    }
    if (prune.generative_stage && provider == ProviderKind::kHttp &&
        logits_endpoint.empty()) {
      throw ConfigError("http logits provider selected without an endpoint");
    }
    if (embedding_batch_size == 0) throw ConfigError("batch size must be positive");
  }
};

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown config field '" + where + "." + key + "'");
    }
  }
}

}  // namespace detail

/// Reads the JSON configuration. Unknown fields are rejected.
///
/// {
///   "coarse_granularity": 256, "fine_granularity": 128,
///   "intermediate_budget": 8192, "final_budget": 4096,
///   "budget_unit": "words" | "tokens",
///   "stage1": "lexical" | "embedding", "stage2": "gen" | "off",
///   "provider": "mock" | "http", "mock_seed": 0,
///   "embedding_endpoint": "...", "logits_endpoint": "...",
///   "embedding_batch_size": 128, "fallback_to_lexical": false,
///   "http": {"timeout_ms": 30000, "max_retries": 2, "backoff_ms": 200},
///   "clean": {"attr_allowlist": [], "drop_tags": ["script", "style"],
///             "strip_comments": true},
///   "workers": 1, "timings": false
/// }
inline PipelineConfig config_from_json(const json& j) {
  detail::check_keys(
      j, "config",
      {"coarse_granularity", "fine_granularity", "intermediate_budget",
       "final_budget", "budget_unit", "stage1", "stage2", "provider",
       "mock_seed", "embedding_endpoint", "logits_endpoint",
       "embedding_batch_size", "fallback_to_lexical", "http", "clean",
       "workers", "timings"});
  PipelineConfig cfg;
  detail::read_field(j, "coarse_granularity", cfg.prune.coarse_granularity);
  detail::read_field(j, "fine_granularity", cfg.prune.fine_granularity);
  detail::read_field(j, "intermediate_budget", cfg.prune.intermediate_budget);
  detail::read_field(j, "final_budget", cfg.prune.final_budget);

  std::string s;
  if (j.contains("budget_unit")) {
    detail::read_field(j, "budget_unit", s);
    if (s == "words") {
      cfg.prune.unit = BudgetUnit::kWords;
    } else if (s == "tokens") {
      cfg.prune.unit = BudgetUnit::kTokens;
    } else {
      throw ConfigError("budget_unit must be 'words' or 'tokens'");
    }
  }
  if (j.contains("stage1")) {
    detail::read_field(j, "stage1", s);
    if (s == "lexical") {
      cfg.stage1 = Stage1Scorer::kLexical;
    } else if (s == "embedding") {
      cfg.stage1 = Stage1Scorer::kEmbedding;
    } else {
      throw ConfigError("stage1 must be 'lexical' or 'embedding'");
    }
  }
  if (j.contains("stage2")) {
    detail::read_field(j, "stage2", s);
    if (s != "gen" && s != "off") throw ConfigError("stage2 must be 'gen' or 'off'");
    cfg.prune.generative_stage = s == "gen";
  }
  if (j.contains("provider")) {
    detail::read_field(j, "provider", s);
    if (s == "mock") {
      cfg.provider = ProviderKind::kMock;
    } else if (s == "http") {
      cfg.provider = ProviderKind::kHttp;
    } else {
      throw ConfigError("provider must be 'mock' or 'http'");
    }
  }
  detail::read_field(j, "mock_seed", cfg.mock_seed);
  detail::read_field(j, "embedding_endpoint", cfg.embedding_endpoint);
  detail::read_field(j, "logits_endpoint", cfg.logits_endpoint);
  detail::read_field(j, "embedding_batch_size", cfg.embedding_batch_size);
  detail::read_field(j, "fallback_to_lexical", cfg.fallback_to_lexical);
  detail::read_field(j, "workers", cfg.workers);
  detail::read_field(j, "timings", cfg.timings);
  if (j.contains("http")) {
    const json& h = j.at("http");
    detail::check_keys(h, "http", {"timeout_ms", "max_retries", "backoff_ms"});
    detail::read_field(h, "timeout_ms", cfg.http.timeout_ms);
    detail::read_field(h, "max_retries", cfg.http.max_retries);
    detail::read_field(h, "backoff_ms", cfg.http.backoff_ms);
  }
  if (j.contains("clean")) {
    const json& c = j.at("clean");
    detail::check_keys(c, "clean", {"attr_allowlist", "drop_tags", "strip_comments"});
    detail::read_field(c, "attr_allowlist", cfg.clean.attr_allowlist);
    detail::read_field(c, "drop_tags", cfg.clean.drop_tags);
    detail::read_field(c, "strip_comments", cfg.clean.strip_comments);
  }
  return cfg;
}

/// Endpoints may be overridden from the environment; nothing else is.
inline void apply_env_overrides(PipelineConfig& cfg,
                                const std::function<const char*(const char*)>&
                                    getenv = [](const char* k) {
                                      return std::getenv(k);
                                    }) {
  if (const char* v = getenv("HTMLPRUNE_EMBEDDING_ENDPOINT"); v && *v) {
    cfg.embedding_endpoint = v;
  }
  if (const char* v = getenv("HTMLPRUNE_LOGITS_ENDPOINT"); v && *v) {
    cfg.logits_endpoint = v;
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PipelineConfig load_config(const std::filesystem::path& p) {
  json j;
  try {
    j = json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw ConfigError("config " + p.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  PipelineConfig cfg = config_from_json(j);
  apply_env_overrides(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Scorer construction and recordings
// ---------------------------------------------------------------------------

struct StageScorers {
  std::shared_ptr<const RelevanceScorer> stage1;
  std::shared_ptr<const RelevanceScorer> stage2;  // null when stage 2 is off
};

inline StageScorers make_scorers(const PipelineConfig& cfg) {
  StageScorers s;
  if (cfg.stage1 == Stage1Scorer::kEmbedding) {
    auto remote = std::make_shared<EmbeddingClient>(
        cfg.embedding_endpoint, cfg.http, cfg.embedding_batch_size);
    if (cfg.fallback_to_lexical) {
      s.stage1 = std::make_shared<FallbackScorer>(
          remote, std::make_shared<LexicalScorer>());
    } else {
      s.stage1 = remote;
    }
  } else {
    s.stage1 = std::make_shared<LexicalScorer>();
  }
  if (cfg.prune.generative_stage) {
    auto tok = std::make_shared<RuleTokenizer>();
    if (cfg.provider == ProviderKind::kHttp) {
      const std::string endpoint = cfg.logits_endpoint;
      const HttpOptions http = cfg.http;
      s.stage2 = std::make_shared<GenerativeScorer>(
          tok, [endpoint, http](const std::string& session) {
            return std::make_shared<const HttpLogitsProvider>(endpoint, session,
                                                              http);
          });
    } else {
      s.stage2 = std::make_shared<GenerativeScorer>(
          tok, std::make_shared<MockLogitsProvider>(cfg.mock_seed));
    }
  }
  return s;
}

/// Wraps both stages so every answer lands in `store`.
inline StageScorers recording(StageScorers s, std::shared_ptr<ScoreStore> store) {
  StageScorers out;
  out.stage1 = std::make_shared<RecordingScorer>("stage1", s.stage1, store);
  if (s.stage2) {
    out.stage2 = std::make_shared<RecordingScorer>("stage2", s.stage2, store);
  }
  return out;
}

/// Scorers answering only from `store`.
inline StageScorers replaying(std::shared_ptr<const ScoreStore> store,
                              bool generative_stage) {
  StageScorers out;
  out.stage1 = std::make_shared<ReplayScorer>("stage1", store);
  if (generative_stage) out.stage2 = std::make_shared<ReplayScorer>("stage2", store);
  return out;
}

/// {"scores": {key: [values]}}; keys sorted, doubles round-trip exactly.
inline void save_store(const ScoreStore& store, const std::filesystem::path& p) {
  json j;
  j["scores"] = json::object();
  for (const auto& [key, scores] : store.snapshot()) j["scores"][key] = scores;
  std::ofstream out(p, std::ios::trunc);
  out << j.dump(1) << '\n';
  if (!out) throw Error("cannot write " + p.string());
}

inline std::shared_ptr<ScoreStore> load_store(const std::filesystem::path& p) {
  auto store = std::make_shared<ScoreStore>();
  try {
    const json j = json::parse(read_file(p));
    for (const auto& [key, scores] : j.at("scores").items()) {
      store->put(key, scores.get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw ConfigError("recording " + p.string() + ": " + e.what());
  }
  return store;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct QueryRecord {
  std::string id;
  std::string query;
  /// Raw HTML, already loaded.
  std::vector<std::string> htmls;
  /// Source of each html: the URL when given, else the file path or "".
  std::vector<std::string> provenance;
};

/// One JSONL line: {"id", "query", "htmls": [string | {"file": path}],
/// "urls": [..]}. Relative file paths resolve against `base_dir`.
inline QueryRecord parse_record(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  QueryRecord r;
  if (j.contains("id")) {
    r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  }
  if (!j.contains("query") || !j.at("query").is_string()) {
    throw Error("record has no 'query' string");
  }
  r.query = j.at("query").get<std::string>();
  std::vector<std::string> urls;
  if (j.contains("urls")) urls = j.at("urls").get<std::vector<std::string>>();
  if (j.contains("htmls")) {
    for (const json& h : j.at("htmls")) {
      if (h.is_string()) {
        r.htmls.push_back(h.get<std::string>());
        r.provenance.emplace_back();
      } else if (h.is_object() && h.contains("file")) {
        std::filesystem::path p = h.at("file").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        r.htmls.push_back(read_file(p));
        r.provenance.push_back(h.at("file").get<std::string>());
      } else {
        throw Error("html entries must be strings or {\"file\": path}");
      }
    }
  }
  for (std::size_t i = 0; i < urls.size() && i < r.provenance.size(); ++i) {
    r.provenance[i] = urls[i];
  }
  if (r.htmls.empty()) throw Error("record has no html");
  return r;
}

struct StageLengths {
  std::size_t raw = 0;
  std::size_t clean = 0;
  std::size_t stage1 = 0;
  std::size_t output = 0;
};

struct RecordResult {
  std::string id;
  std::string error;  // empty on success
  std::string pruned_html;
  StageLengths lengths;  // in the budget unit
  StageLengths bytes;    // serialized bytes
  std::size_t coarse_blocks = 0;
  std::size_t fine_blocks = 0;
  ScoringStats generative;
  std::optional<double> seconds;
  std::vector<Deletion> audit;

  bool ok() const noexcept { return error.empty(); }
};

inline json to_json(const StageLengths& l) {
  return {{"raw", l.raw}, {"clean", l.clean}, {"stage1", l.stage1},
          {"output", l.output}};
}

inline json to_json(const RecordResult& r) {
  json j;
  j["id"] = r.id;
  if (!r.ok()) {
    j["error"] = r.error;
    return j;
  }
  j["pruned_html"] = r.pruned_html;
  j["lengths"] = to_json(r.lengths);
  j["bytes"] = to_json(r.bytes);
  j["blocks"] = {{"coarse", r.coarse_blocks}, {"fine", r.fine_blocks}};
  j["provider_calls"] = r.generative.provider_calls;
  j["token_nodes"] = r.generative.token_nodes;
  j["skipped_nodes"] = r.generative.skipped_nodes;
  if (r.seconds) j["seconds"] = *r.seconds;
  return j;
}

inline RecordResult result_from_json(const json& j) {
  RecordResult r;
  r.id = j.value("id", "");
  if (j.contains("error")) {
    r.error = j.at("error").get<std::string>();
    return r;
  }
  r.pruned_html = j.value("pruned_html", "");
  auto lengths = [](const json& l) {
    return StageLengths{l.at("raw").get<std::size_t>(), l.at("clean").get<std::size_t>(),
                        l.at("stage1").get<std::size_t>(),
                        l.at("output").get<std::size_t>()};
  };
  r.lengths = lengths(j.at("lengths"));
  r.bytes = lengths(j.at("bytes"));
  r.coarse_blocks = j.at("blocks").at("coarse").get<std::size_t>();
  r.fine_blocks = j.at("blocks").at("fine").get<std::size_t>();
  r.generative.provider_calls = j.value("provider_calls", std::size_t{0});
  r.generative.token_nodes = j.value("token_nodes", std::size_t{0});
  r.generative.skipped_nodes = j.value("skipped_nodes", std::size_t{0});
  if (j.contains("seconds")) r.seconds = j.at("seconds").get<double>();
  return r;
}

/// Block-tree debug dump: one object per block in document order.
inline json dump_block_tree(const BlockTree& tree) {
  json arr = json::array();
  for (const BlockNode& b : tree.blocks()) {
    arr.push_back({{"path", b.path.render()},
                   {"is_leaf", b.is_leaf},
                   {"word_count", b.word_count},
                   {"text", b.text}});
  }
  return arr;
}

inline DocumentSet parse_documents(const std::vector<std::string>& htmls,
                                   std::vector<std::string> provenance = {}) {
  std::vector<Node> docs;
  docs.reserve(htmls.size());
  for (const std::string& h : htmls) docs.push_back(parse_html(h));
  return concat_documents(std::move(docs), std::move(provenance));
}

/// concat -> clean -> two-stage prune for one record. Errors are caught and
/// reported in the result.
inline RecordResult process_record(const QueryRecord& rec, const PipelineConfig& cfg,
                                   const StageScorers& scorers,
                                   bool audit = false) {
  RecordResult r;
  r.id = rec.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Budget unit = Budget::of(cfg.prune.unit, 1);
    const DocumentSet raw = parse_documents(rec.htmls, rec.provenance);
    const std::string raw_html = serialize(raw);
    r.lengths.raw = unit.counter(raw_html);
    r.bytes.raw = raw_html.size();

    const DocumentSet cleaned = clean(raw, cfg.clean);
    if (cleaned.size() == 0) throw EmptyDocument();
    const std::string clean_html = serialize(cleaned);
    r.lengths.clean = unit.counter(clean_html);
    r.bytes.clean = clean_html.size();

    PruneOptions opts;
    opts.audit = audit;
    TwoStageResult t = two_stage_pipeline(cleaned, rec.query, *scorers.stage1,
                                          scorers.stage2.get(), cfg.prune, opts);
    r.lengths.stage1 = t.stage1_length;
    r.bytes.stage1 = serialize(t.stage1).size();
    r.pruned_html = serialize(t.output);
    r.lengths.output = t.output_length;
    r.bytes.output = r.pruned_html.size();
    r.coarse_blocks = t.coarse_blocks;
    r.fine_blocks = t.fine_blocks;
    r.generative = t.generative;
    r.audit = std::move(t.audit);
  } catch (const std::exception& e) {
    r = RecordResult{};
    r.id = rec.id;
    r.error = e.what();
  }
  if (cfg.timings) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Streaming run
// ---------------------------------------------------------------------------

struct PipelineSummary {
  std::size_t records = 0;
  std::size_t failed = 0;
};

/// Reads JSONL records from `in` and writes one JSON result per line to
/// `out`, in input order, using up to `cfg.workers` threads. A bad line or a
/// failing record yields an error result for that record only. With
/// `audit_out`, every deletion is written as {id, stage, path, score,
/// length_after}.
inline PipelineSummary run_pipeline(std::istream& in, std::ostream& out,
                                    const PipelineConfig& cfg,
                                    const StageScorers& scorers,
                                    const std::filesystem::path& base_dir = ".",
                                    std::ostream* audit_out = nullptr) {
  struct Slot {
    std::size_t index;
    std::string line;
  };
  std::mutex mu;
  std::condition_variable work_cv;
  std::condition_variable done_cv;
  std::deque<Slot> pending;
  std::map<std::size_t, RecordResult> finished;
  bool eof = false;
  const std::size_t max_in_flight = 2 * cfg.workers;
  std::size_t in_flight = 0;

  auto handle = [&](const Slot& slot) {
    QueryRecord rec;
    try {
      rec = parse_record(json::parse(slot.line), base_dir);
    } catch (const std::exception& e) {
      RecordResult r;
      r.id = "line " + std::to_string(slot.index + 1);
      try {
        const json j = json::parse(slot.line);
        if (j.is_object() && j.contains("id")) {
          r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        }
      } catch (const json::exception&) {
      }
      r.error = e.what();
      return r;
    }
    return process_record(rec, cfg, scorers, audit_out != nullptr);
  };

  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < cfg.workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        Slot slot;
        {
          std::unique_lock<std::mutex> lock(mu);
          work_cv.wait(lock, [&] { return !pending.empty() || eof; });
          if (pending.empty()) return;
          slot = std::move(pending.front());
          pending.pop_front();
        }
        RecordResult r = handle(slot);
        {
          std::lock_guard<std::mutex> lock(mu);
          finished.emplace(slot.index, std::move(r));
        }
        done_cv.notify_all();
      }
    });
  }

  PipelineSummary summary;
  std::size_t next_out = 0;
  auto flush_ready = [&](std::unique_lock<std::mutex>& lock) {
    while (!finished.empty() && finished.begin()->first == next_out) {
      RecordResult r = std::move(finished.begin()->second);
      finished.erase(finished.begin());
      --in_flight;
      ++next_out;
      lock.unlock();
      out << to_json(r).dump() << '\n';
      if (audit_out) {
        for (const Deletion& d : r.audit) {
          *audit_out << json{{"id", r.id},
                             {"stage", d.stage},
                             {"path", d.path},
                             {"score", d.score},
                             {"length_after", d.length_after}}
                            .dump()
                     << '\n';
        }
      }
      if (!r.ok()) ++summary.failed;
      lock.lock();
    }
  };

  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (text::is_blank(line)) continue;
    std::unique_lock<std::mutex> lock(mu);
    done_cv.wait(lock, [&] {
      flush_ready(lock);
      return in_flight < max_in_flight;
    });
    pending.push_back({index++, std::move(line)});
    ++in_flight;
    lock.unlock();
    work_cv.notify_one();
  }
  {
    std::unique_lock<std::mutex> lock(mu);
    eof = true;
  }
  work_cv.notify_all();
  {
    std::unique_lock<std::mutex> lock(mu);
    done_cv.wait(lock, [&] {
      flush_ready(lock);
      return in_flight == 0;
    });
  }
  for (std::thread& t : pool) t.join();
  out.flush();
  summary.records = index;
  return summary;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

namespace detail {

/// Nearest-rank percentile of an unsorted sample.
inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * v.size()));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline json distribution(const std::vector<double>& v) {
  return {{"mean", mean(v)},
          {"p50", percentile(v, 50)},
          {"p90", percentile(v, 90)},
          {"max", v.empty() ? 0.0 : *std::max_element(v.begin(), v.end())}};
}

}  // namespace detail

/// Aggregates over successful results: per-stage length distributions,
/// mean shrink ratios (1 - after/before, per record) and generative-stage
/// call counts.
inline json report_stats(const std::vector<RecordResult>& results) {
  std::vector<double> raw, cleaned, stage1, output;
  std::vector<double> clean_shrink_bytes, clean_shrink, prune_shrink;
  std::size_t failed = 0;
  std::size_t calls = 0, nodes = 0, skipped = 0;
  auto ratio = [](std::size_t after, std::size_t before) {
    return before == 0 ? 0.0 : 1.0 - static_cast<double>(after) / before;
  };
  for (const RecordResult& r : results) {
    if (!r.ok()) {
      ++failed;
      continue;
    }
    raw.push_back(static_cast<double>(r.lengths.raw));
    cleaned.push_back(static_cast<double>(r.lengths.clean));
    stage1.push_back(static_cast<double>(r.lengths.stage1));
    output.push_back(static_cast<double>(r.lengths.output));
    clean_shrink_bytes.push_back(ratio(r.bytes.clean, r.bytes.raw));
    clean_shrink.push_back(ratio(r.lengths.clean, r.lengths.raw));
    prune_shrink.push_back(ratio(r.lengths.output, r.lengths.clean));
    calls += r.generative.provider_calls;
    nodes += r.generative.token_nodes;
    skipped += r.generative.skipped_nodes;
  }
  json j;
  j["records"] = results.size();
  j["failed"] = failed;
  j["lengths"] = {{"raw", detail::distribution(raw)},
                  {"clean", detail::distribution(cleaned)},
                  {"stage1", detail::distribution(stage1)},
                  {"output", detail::distribution(output)}};
  j["shrink"] = {{"clean_bytes", detail::mean(clean_shrink_bytes)},
                 {"clean", detail::mean(clean_shrink)},
                 {"prune", detail::mean(prune_shrink)}};
  j["provider_calls"] = calls;
  j["token_nodes"] = nodes;
  j["skipped_nodes"] = skipped;
  j["skipped_fraction"] =
      nodes == 0 ? 0.0 : static_cast<double>(skipped) / static_cast<double>(nodes);
  return j;
}

}  // namespace htmlprune
