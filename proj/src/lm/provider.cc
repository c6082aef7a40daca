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

#include "sufcon/provider.h"

#include <cmath>
#include <sstream>

#include "sufcon/errors.h"

namespace sufcon {
namespace {

std::string describe_prefix(std::span<const TokenId> prefix) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < prefix.size(); ++i) out << (i ? "," : "") << prefix[i];
  out << ']';
  return out.str();
}

void check_width(const Vocabulary& vocab, const LogProbVector& v, const std::string& where) {
  if (v.size() != vocab.size() + 1)
    throw ConfigError(where + ": expected " + std::to_string(vocab.size() + 1) + " entries, got " +
                      std::to_string(v.size()));
}

}  // namespace

std::shared_ptr<const LanguageModel::State> LanguageModel::initial_state(std::span<const TokenId>) const {
  return nullptr;
}

std::shared_ptr<const LanguageModel::State> LanguageModel::extend_state(const State*,
                                                                        std::span<const TokenId>) const {
  return nullptr;
}

LogProbVector LanguageModel::next_dist(std::span<const TokenId> prefix, const State*) const {
  return next_dist(prefix);
}

ProviderSession::ProviderSession(std::shared_ptr<const LanguageModel> model, TokenSequence prefix)
    : model_(std::move(model)), prefix_(std::move(prefix)) {
  if (!model_) throw ContractError("session needs a model");
  validate_sequence(model_->vocabulary(), prefix_);
  if (is_finished(model_->vocabulary(), prefix_)) throw ContractError("session prefix contains eog");
  state_ = model_->initial_state(prefix_);
}

const LogProbVector& ProviderSession::next_dist() const {
  if (!dist_) dist_ = std::make_shared<const LogProbVector>(model_->next_dist(prefix_, state_.get()));
  return *dist_;
}

ProviderSession ProviderSession::extend(TokenId token) const {
  const Vocabulary& vocab = model_->vocabulary();
  if (token == vocab.eog_id()) throw ContractError("cannot extend a session with eog");
  if (!vocab.contains(token)) throw LookupError("unknown token id " + std::to_string(token));
  ProviderSession next = *this;
  next.prefix_.push_back(token);
  next.state_ = model_->extend_state(state_.get(), next.prefix_);
  next.dist_.reset();
  return next;
}

TableProvider::TableProvider(Vocabulary vocab, std::map<TokenSequence, LogProbVector> table,
                             std::optional<LogProbVector> fallback)
    : vocab_(std::move(vocab)), table_(std::move(table)), fallback_(std::move(fallback)) {
  for (const auto& [prefix, row] : table_) check_width(vocab_, row, "table row " + describe_prefix(prefix));
  if (fallback_) check_width(vocab_, *fallback_, "table fallback row");
}

std::shared_ptr<TableProvider> TableProvider::from_probabilities(
    Vocabulary vocab, const std::map<TokenSequence, std::vector<double>>& rows,
    std::optional<std::vector<double>> fallback) {
  auto convert = [](const std::vector<double>& p, const std::string& where) {
    try {
      return LogProbVector::from_probabilities(p);
    } catch (const ValidationError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  std::map<TokenSequence, LogProbVector> table;
  for (const auto& [prefix, p] : rows) table.emplace(prefix, convert(p, "table row " + describe_prefix(prefix)));
  std::optional<LogProbVector> fb;
  if (fallback) fb = convert(*fallback, "table fallback row");
  return std::make_shared<TableProvider>(std::move(vocab), std::move(table), std::move(fb));
}

LogProbVector TableProvider::next_dist(std::span<const TokenId> prefix) const {
  auto it = table_.find(TokenSequence(prefix.begin(), prefix.end()));
  if (it != table_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw ConfigError("table provider has no row for prefix " + describe_prefix(prefix));
}

struct NgramProvider::ContextState : LanguageModel::State {
  const Row* row = nullptr;
};

NgramProvider::NgramProvider(Vocabulary vocab, const std::vector<TokenSequence>& corpus, NgramOptions options)
    : vocab_(std::move(vocab)), options_(options) {
  if (options_.order < 1) throw ConfigError("n-gram order must be at least 1");
  if (!(options_.k > 0.0)) throw ConfigError("n-gram smoothing k must be positive");
  if (corpus.empty()) throw ConfigError("n-gram corpus is empty");
  const std::size_t width = vocab_.size() + 1;
  for (const auto& raw : corpus) {
    TokenSequence seq = raw;
    if (is_finished(vocab_, seq)) seq.pop_back();
    validate_sequence(vocab_, seq);
    if (options_.append_eog) seq.push_back(vocab_.eog_id());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      std::size_t from = i >= options_.order - 1 ? i - (options_.order - 1) : 0;
      Row& row = rows_[TokenSequence(seq.begin() + static_cast<long>(from), seq.begin() + static_cast<long>(i))];
      if (row.counts.empty()) row.counts.assign(width, 0);
      ++row.counts[static_cast<std::size_t>(seq[i])];
      ++row.total;
    }
  }
}

const NgramProvider::Row* NgramProvider::find_row(std::span<const TokenId> prefix) const {
  std::size_t n = std::min(prefix.size(), options_.order - 1);
  auto it = rows_.find(TokenSequence(prefix.end() - static_cast<long>(n), prefix.end()));
  return it == rows_.end() ? nullptr : &it->second;
}

LogProbVector NgramProvider::distribution(const Row* row) const {
  const std::size_t width = vocab_.size() + 1;
  const double k = options_.k;
  const double denom = (row ? static_cast<double>(row->total) : 0.0) + k * static_cast<double>(width);
  std::vector<double> logs(width);
  for (std::size_t i = 0; i < width; ++i) {
    double count = row ? static_cast<double>(row->counts[i]) : 0.0;
    logs[i] = std::log(count + k) - std::log(denom);
  }
  return LogProbVector(std::move(logs));
}

LogProbVector NgramProvider::next_dist(std::span<const TokenId> prefix) const { return distribution(find_row(prefix)); }

std::shared_ptr<const LanguageModel::State> NgramProvider::initial_state(std::span<const TokenId> prefix) const {
  auto s = std::make_shared<ContextState>();
  s->row = find_row(prefix);
  return s;
}

std::shared_ptr<const LanguageModel::State> NgramProvider::extend_state(const State*,
                                                                        std::span<const TokenId> prefix) const {
  return initial_state(prefix);
}

LogProbVector NgramProvider::next_dist(std::span<const TokenId> prefix, const State* state) const {
  auto* s = dynamic_cast<const ContextState*>(state);
  return s ? distribution(s->row) : next_dist(prefix);
}

LogProbVector UniformProvider::next_dist(std::span<const TokenId>) const {
  return LogProbVector::uniform(vocab_.size() + 1);
}

}  // namespace sufcon
