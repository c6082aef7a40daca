// Copyright 2026 The sufcon Authors. All Rights Reserved.
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

#include <chrono>
#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "sufcon/provider.h"

namespace sufcon {

inline constexpr int kProtocolVersion = 1;

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;  // extra attempts after the first for retryable failures
  std::chrono::milliseconds retry_backoff{100};
  std::size_t cache_capacity = 4096;
  // Served vectors must normalize within this bound; they are then shifted to
  // normalize exactly.
  double normalization_tolerance = 1e-4;
};

struct VocabularyHandshake {
  Vocabulary vocab;
  std::string document;
  TokenId eog_id = 0;
};

// `GET <endpoint>/v1/vocab`. Throws HandshakeError for version or eog
// mismatches and ProviderError for transport failures.
VocabularyHandshake fetch_vocabulary(const std::string& endpoint, const RemoteOptions& options = {});

// Client for the HTTP protocol: one `POST /v1/next_dist` per uncached prefix.
class RemoteProvider : public LanguageModel {
 public:
  explicit RemoteProvider(std::string endpoint, RemoteOptions options = {});

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

  const std::string& endpoint() const { return endpoint_; }
  const std::string& vocabulary_document() const { return document_; }
  std::size_t requests_sent() const;

 private:
  LogProbVector request(std::span<const TokenId> prefix) const;

  std::string endpoint_;
  RemoteOptions options_;
  Vocabulary vocab_;
  std::string document_;

  mutable std::mutex mu_;
  mutable std::list<std::pair<TokenSequence, LogProbVector>> lru_;  // most recent first
  mutable std::map<TokenSequence, decltype(lru_)::iterator> index_;
  mutable std::size_t requests_ = 0;
};

// Parses and validates a `/v1/next_dist` response body.
LogProbVector parse_next_dist_response(const std::string& body, std::size_t width, double tolerance);

}  // namespace sufcon
