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

#include "sufcon/remote_provider.h"

#include <httplib.h>

#include <cmath>
#include <json.hpp>
#include <thread>

#include "sufcon/errors.h"

namespace sufcon {
namespace {

using nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string base;    // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint '" + url + "' has no scheme");
  if (url.compare(0, scheme, "http") != 0) throw ConfigError("endpoint '" + url + "' must use http");
  auto path = url.find('/', scheme + 3);
  Endpoint e{url.substr(0, path), path == std::string::npos ? "" : url.substr(path)};
  while (!e.base.empty() && e.base.back() == '/') e.base.pop_back();
  return e;
}

struct Reply {
  int status;
  std::string body;
};

// Sends one request with retries for transport failures and 5xx replies.
template <typename Send>
Reply with_retries(const RemoteOptions& options, const std::string& what, Send send) {
  const int attempts = 1 + std::max(0, options.max_retries);
  std::string last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Result res = send();
    if (res) {
      if (res->status < 500) return {res->status, res->body};
      last = "status " + std::to_string(res->status);
    } else {
      last = httplib::to_string(res.error());
    }
    if (attempt < attempts) std::this_thread::sleep_for(options.retry_backoff * attempt);
  }
  throw ProviderError(what + " failed after " + std::to_string(attempts) + " attempt(s): " + last, attempts, true);
}

httplib::Client make_client(const Endpoint& e, const RemoteOptions& options) {
  httplib::Client client(e.origin);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

[[noreturn]] void throw_server_error(const Reply& r, const std::string& what) {
  std::string message = r.body;
  try {
    json j = json::parse(r.body);
    if (j.is_object() && j.contains("error") && j["error"].is_string()) message = j["error"].get<std::string>();
  } catch (const json::exception&) {
  }
  throw ProviderError(what + " rejected with status " + std::to_string(r.status) + ": " + message, 1, false);
}

}  // namespace

VocabularyHandshake fetch_vocabulary(const std::string& endpoint, const RemoteOptions& options) {
  Endpoint e = split_endpoint(endpoint);
  httplib::Client client = make_client(e, options);
  Reply r = with_retries(options, "GET /v1/vocab", [&] { return client.Get(e.base + "/v1/vocab"); });
  if (r.status != 200) throw_server_error(r, "GET /v1/vocab");
  json j;
  try {
    j = json::parse(r.body);
  } catch (const json::exception& ex) {
    throw ProtocolError("body", ex.what());
  }
  if (!j.is_object()) throw ProtocolError("body", "expected a JSON object");
  if (!j.contains("protocol") || !j["protocol"].is_number_integer())
    throw ProtocolError("protocol", "missing or not an integer");
  if (j["protocol"].get<int>() != kProtocolVersion)
    throw HandshakeError("server speaks protocol " + std::to_string(j["protocol"].get<int>()) + ", client speaks " +
                         std::to_string(kProtocolVersion));
  if (!j.contains("vocab") || !j["vocab"].is_string()) throw ProtocolError("vocab", "missing or not a string");
  if (!j.contains("eog_id") || !j["eog_id"].is_number_integer())
    throw ProtocolError("eog_id", "missing or not an integer");
  VocabularyHandshake h{load_vocabulary(j["vocab"].get<std::string>()), j["vocab"].get<std::string>(),
                        j["eog_id"].get<TokenId>()};
  if (h.eog_id != h.vocab.eog_id())
    throw HandshakeError("server eog_id " + std::to_string(h.eog_id) + " does not equal vocabulary size " +
                         std::to_string(h.vocab.size()));
  return h;
}

LogProbVector parse_next_dist_response(const std::string& body, std::size_t width, double tolerance) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& ex) {
    throw ProtocolError("body", ex.what());
  }
  if (!j.is_object() || !j.contains("logprobs")) throw ProtocolError("logprobs", "missing");
  const json& lp = j["logprobs"];
  if (!lp.is_array()) throw ProtocolError("logprobs", "not an array");
  if (lp.size() != width)
    throw ProtocolError("logprobs", "expected " + std::to_string(width) + " entries, got " + std::to_string(lp.size()));
  std::vector<double> values(width);
  for (std::size_t i = 0; i < width; ++i) {
    if (lp[i].is_null()) {
      values[i] = kNegInf;
    } else if (lp[i].is_number()) {
      values[i] = lp[i].get<double>();
    } else {
      throw ProtocolError("logprobs", "entry " + std::to_string(i) + " is not a number or null");
    }
  }
  try {
    LogProbVector checked(values, tolerance);
    return LogProbVector::normalized(std::move(values));
  } catch (const ValidationError& ex) {
    throw ProtocolError("logprobs", ex.what());
  }
}

RemoteProvider::RemoteProvider(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  VocabularyHandshake h = fetch_vocabulary(endpoint_, options_);
  vocab_ = std::move(h.vocab);
  document_ = std::move(h.document);
}

std::size_t RemoteProvider::requests_sent() const {
  std::lock_guard lock(mu_);
  return requests_;
}

LogProbVector RemoteProvider::next_dist(std::span<const TokenId> prefix) const {
  TokenSequence key(prefix.begin(), prefix.end());
  {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
  }
  LogProbVector v = request(prefix);
  if (options_.cache_capacity > 0) {
    std::lock_guard lock(mu_);
    if (!index_.count(key)) {
      lru_.emplace_front(key, v);
      index_[key] = lru_.begin();
      if (lru_.size() > options_.cache_capacity) {
        index_.erase(lru_.back().first);
        lru_.pop_back();
      }
    }
  }
  return v;
}

LogProbVector RemoteProvider::request(std::span<const TokenId> prefix) const {
  Endpoint e = split_endpoint(endpoint_);
  httplib::Client client = make_client(e, options_);
  const std::string body = json{{"prefix", std::vector<TokenId>(prefix.begin(), prefix.end())}}.dump();
  {
    std::lock_guard lock(mu_);
    ++requests_;
  }
  Reply r = with_retries(options_, "POST /v1/next_dist",
                         [&] { return client.Post(e.base + "/v1/next_dist", body, "application/json"); });
  if (r.status != 200) throw_server_error(r, "POST /v1/next_dist");
  return parse_next_dist_response(r.body, vocab_.size() + 1, options_.normalization_tolerance);
}

}  // namespace sufcon
