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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htmlprune {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDocument : public Error {
 public:
  EmptyDocument() : Error("empty document") {}
};

class EmptyDocumentSet : public Error {
 public:
  EmptyDocumentSet() : Error("empty document set") {}
};

class InvalidGranularity : public Error {
 public:
  InvalidGranularity(std::size_t requested, std::size_t current)
      : Error("granularity " + std::to_string(requested) +
              " is not finer than current granularity " +
              std::to_string(current)) {}
};

/// Raised when deleting every block still leaves the output over budget.
class BudgetUnattainable : public Error {
 public:
  BudgetUnattainable(std::size_t limit, std::size_t minimal_length)
      : Error("budget " + std::to_string(limit) +
              " unattainable; minimal achievable length is " +
              std::to_string(minimal_length)),
        limit_(limit),
        minimal_length_(minimal_length) {}

  std::size_t limit() const noexcept { return limit_; }
  std::size_t minimal_length() const noexcept { return minimal_length_; }

 private:
  std::size_t limit_;
  std::size_t minimal_length_;
};

class DuplicatePath : public Error {
 public:
  explicit DuplicatePath(const std::string& path)
      : Error("duplicate block path " + path) {}
};

class IncompleteProbabilities : public Error {
 public:
  IncompleteProbabilities()
      : Error("token tree has nodes without probabilities") {}
};

/// A logits provider failed; carries the prefix that was being scored.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, std::vector<std::int64_t> prefix)
      : Error("logits provider failed: " + what + " (prefix length " +
              std::to_string(prefix.size()) + ")"),
        prefix_(std::move(prefix)) {}

  const std::vector<std::int64_t>& prefix() const noexcept { return prefix_; }

 private:
  std::vector<std::int64_t> prefix_;
};

class ScorerUnavailable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace htmlprune
