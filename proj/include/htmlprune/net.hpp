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
//! HTTP clients: the embedding service, the remote logits provider, and a
//! page fetcher that keeps a manifest.
//!
//! Embedding protocol: POST {query, texts} -> {scores}.
//! Logits protocol:    POST {session_id, prefix_tokens, candidates} -> {logits}.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "httplib.h"
#include "json.hpp"

#include "htmlprune/error.hpp"
#include "htmlprune/pruner.hpp"
#include "htmlprune/toktree.hpp"

namespace htmlprune {

/// "http://host:port/path" split for httplib.
struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path = "/";

  static Endpoint parse(std::string_view url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
      throw ConfigError("endpoint '" + std::string(url) + "' has no scheme");
    }
    const std::string scheme = text::to_lower_ascii(url.substr(0, scheme_end));
    if (scheme != "http" && scheme != "https") {
      throw ConfigError("endpoint '" + std::string(url) +
                        "' must use http or https");
    }
    const std::size_t host_start = scheme_end + 3;
    const std::size_t path_start = url.find('/', host_start);
    Endpoint e;
    e.origin = std::string(url.substr(0, path_start));
    if (e.origin.size() <= host_start) {
      throw ConfigError("endpoint '" + std::string(url) + "' has no host");
    }
    if (path_start != std::string_view::npos) {
      e.path = std::string(url.substr(path_start));
    }
    return e;
  }
};

struct HttpOptions {
  int timeout_ms = 30000;
  /// Extra attempts after a transient failure (network error, 429, 5xx).
  int max_retries = 2;
  int backoff_ms = 200;
};

namespace detail {

inline httplib::Client make_client(const Endpoint& ep, const HttpOptions& opts) {
  httplib::Client cli(ep.origin);
  const auto ms = std::chrono::milliseconds(opts.timeout_ms);
  cli.set_connection_timeout(ms);
  cli.set_read_timeout(ms);
  cli.set_write_timeout(ms);
  return cli;
}

/// POSTs `body` and returns the parsed JSON reply. Every failure surfaces as
/// ScorerUnavailable once retries are spent.
inline nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body,
                                const HttpOptions& opts) {
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(opts.backoff_ms << (attempt - 1)));
    }
    httplib::Client cli = make_client(ep, opts);
    auto res = cli.Post(ep.path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ScorerUnavailable(ep.origin + ep.path + ": HTTP " +
                              std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ScorerUnavailable(ep.origin + ep.path + ": malformed reply: " +
                              e.what());
    }
  }
  throw ScorerUnavailable(ep.origin + ep.path + ": " + last_error + " after " +
                          std::to_string(opts.max_retries + 1) + " attempts");
}

/// The array `field` of `reply` as exactly `n` finite numbers.
inline std::vector<double> number_array(const nlohmann::json& reply,
                                        const char* field, std::size_t n,
                                        const std::string& where) {
  if (!reply.is_object() || !reply.contains(field) || !reply[field].is_array()) {
    throw ScorerUnavailable(where + ": reply has no '" + field + "' array");
  }
  const nlohmann::json& arr = reply[field];
  if (arr.size() != n) {
    throw ScorerUnavailable(where + ": expected " + std::to_string(n) + " " +
                            field + ", got " + std::to_string(arr.size()));
  }
  std::vector<double> out;
  out.reserve(n);
  for (const nlohmann::json& v : arr) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ScorerUnavailable(where + ": non-numeric value in '" + field + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

/// Remote embedding-similarity scorer. Texts go out in order-preserving
/// batches of at most `batch_size`.
class EmbeddingClient : public TextScorer {
 public:
  EmbeddingClient(std::string endpoint, HttpOptions opts = {},
                  std::size_t batch_size = 128)
      : endpoint_(Endpoint::parse(endpoint)), opts_(opts), batch_size_(batch_size) {
    if (batch_size_ == 0) throw ConfigError("batch size must be positive");
  }

  std::size_t batch_size() const noexcept { return batch_size_; }

  std::vector<double> score_texts(
      std::string_view query,
      const std::vector<std::string>& texts) const override {
    std::vector<double> scores;
    scores.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
      const std::size_t end = std::min(texts.size(), start + batch_size_);
      nlohmann::json body;
      body["query"] = std::string(query);
      body["texts"] = nlohmann::json::array();
      for (std::size_t i = start; i < end; ++i) body["texts"].push_back(texts[i]);
      const nlohmann::json reply = detail::post_json(endpoint_, body, opts_);
      const std::vector<double> part = detail::number_array(
          reply, "scores", end - start, endpoint_.origin + endpoint_.path);
      scores.insert(scores.end(), part.begin(), part.end());
    }
    return scores;
  }

 private:
  Endpoint endpoint_;
  HttpOptions opts_;
  std::size_t batch_size_;
};

/// Logits from a remote model. One instance per scoring session.
class HttpLogitsProvider : public LogitsProvider {
 public:
  HttpLogitsProvider(std::string endpoint, std::string session_id,
                     HttpOptions opts = {})
      : endpoint_(Endpoint::parse(endpoint)),
        session_(std::move(session_id)),
        opts_(opts) {}

  std::vector<double> logits(std::span<const TokenId> prefix,
                             std::span<const TokenId> candidates) const override {
    nlohmann::json body;
    body["session_id"] = session_;
    body["prefix_tokens"] = std::vector<TokenId>(prefix.begin(), prefix.end());
    body["candidates"] = std::vector<TokenId>(candidates.begin(), candidates.end());
    const nlohmann::json reply = detail::post_json(endpoint_, body, opts_);
    return detail::number_array(reply, "logits", candidates.size(),
                                endpoint_.origin + endpoint_.path);
  }

 private:
  Endpoint endpoint_;
  std::string session_;
  HttpOptions opts_;
};

// ---------------------------------------------------------------------------
// Fetching
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

struct FetchRow {
  std::string url;
  std::string file;  // relative to the output directory; empty on failure
  int status = 0;
  std::string sha256;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct FetchReport {
  std::vector<FetchRow> rows;  // one per requested URL, in request order
  std::size_t fetched = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

inline nlohmann::json to_json(const FetchRow& r) {
  nlohmann::json j;
  j["url"] = r.url;
  j["file"] = r.file;
  j["status"] = r.status;
  j["sha256"] = r.sha256;
  j["error"] = r.error;
  return j;
}

/// Stored file name for `url`: a hash of the URL, so reruns find it again.
inline std::string fetch_file_name(std::string_view url) {
  return text::hex64(text::Fnv1a().bytes(url).value()) + ".html";
}

/// GETs each URL and saves the body verbatim under `out_dir`, writing
/// `manifest.jsonl` with one row per URL. URLs already fetched successfully
/// by an earlier run, with the file intact, are skipped.
inline FetchReport fetch_urls(const std::vector<std::string>& urls,
                              const std::filesystem::path& out_dir,
                              const HttpOptions& opts = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path manifest = out_dir / "manifest.jsonl";

  std::map<std::string, FetchRow> previous;
  if (std::ifstream in(manifest); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (text::is_blank(line)) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        FetchRow r{j.at("url"), j.at("file"), j.at("status"), j.at("sha256"),
                   j.at("error")};
        if (r.ok()) previous[r.url] = std::move(r);
      } catch (const nlohmann::json::exception&) {
        // A damaged row only means that URL is fetched again.
      }
    }
  }

  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  FetchReport report;
  for (const std::string& url : urls) {
    if (auto it = previous.find(url); it != previous.end()) {
      const fs::path p = out_dir / it->second.file;
      if (fs::exists(p) && sha256_hex(read_file(p)) == it->second.sha256) {
        report.rows.push_back(it->second);
        ++report.skipped;
        continue;
      }
    }

    FetchRow row;
    row.url = url;
    try {
      const Endpoint ep = Endpoint::parse(url);
      httplib::Client cli = detail::make_client(ep, opts);
      cli.set_follow_location(true);
      auto res = cli.Get(ep.path);
      if (!res) {
        row.error = httplib::to_string(res.error());
      } else {
        row.status = res->status;
        if (res->status < 200 || res->status >= 300) {
          row.error = "HTTP " + std::to_string(res->status);
        } else {
          row.file = fetch_file_name(url);
          row.sha256 = sha256_hex(res->body);
          std::ofstream out(out_dir / row.file, std::ios::binary);
          out.write(res->body.data(),
                    static_cast<std::streamsize>(res->body.size()));
          if (!out) row.error = "cannot write " + row.file;
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (row.ok()) {
      ++report.fetched;
    } else {
      row.file.clear();
      row.sha256.clear();
      ++report.failed;
    }
    report.rows.push_back(std::move(row));
  }

  // Earlier successes not requested this time stay in the manifest.
  for (const FetchRow& r : report.rows) previous.erase(r.url);
  std::ofstream out(manifest, std::ios::trunc);
  for (const auto& [url, r] : previous) out << to_json(r).dump() << '\n';
  for (const FetchRow& r : report.rows) out << to_json(r).dump() << '\n';
  return report;
}

}  // namespace htmlprune
