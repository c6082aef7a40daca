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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sufcon/logprob.h"
#include "sufcon/vocabulary.h"

namespace sufcon {

// Next-token distribution p(v | prefix) over the vocabulary and eog.
// Implementations are immutable or internally synchronized and may be shared
// by concurrent decodes.
class LanguageModel {
 public:
  // Opaque per-prefix state carried by sessions.
  struct State {
    virtual ~State() = default;
  };

  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  // `prefix` holds token ids only, never eog.
  virtual LogProbVector next_dist(std::span<const TokenId> prefix) const = 0;

  // Incremental hooks. The defaults keep no state and evaluate from the full
  // prefix; overriding them must not change any returned distribution.
  virtual std::shared_ptr<const State> initial_state(std::span<const TokenId> prefix) const;
  virtual std::shared_ptr<const State> extend_state(const State* state, std::span<const TokenId> prefix) const;
  virtual LogProbVector next_dist(std::span<const TokenId> prefix, const State* state) const;
};

// A prefix positioned on a model. Copying a session forks it.
class ProviderSession {
 public:
  ProviderSession(std::shared_ptr<const LanguageModel> model, TokenSequence prefix = {});

  const TokenSequence& prefix() const { return prefix_; }
  const LanguageModel& model() const { return *model_; }
  const std::shared_ptr<const LanguageModel>& model_ptr() const { return model_; }

  // Memoized per session; forks made after the first call share the result.
  const LogProbVector& next_dist() const;
  bool has_next_dist() const { return dist_ != nullptr; }

  ProviderSession fork() const { return *this; }

  // Throws ContractError for eog and LookupError for ids outside the vocabulary.
  ProviderSession extend(TokenId token) const;

 private:
  std::shared_ptr<const LanguageModel> model_;
  TokenSequence prefix_;
  std::shared_ptr<const LanguageModel::State> state_;
  mutable std::shared_ptr<const LogProbVector> dist_;
};

// Exact prefix lookup. Prefixes without a row use `fallback` when given and
// otherwise raise ConfigError naming the prefix.
class TableProvider : public LanguageModel {
 public:
  TableProvider(Vocabulary vocab, std::map<TokenSequence, LogProbVector> table,
                std::optional<LogProbVector> fallback = std::nullopt);

  // Rows of probabilities; each must normalize within 1e-6 (ConfigError).
  static std::shared_ptr<TableProvider> from_probabilities(Vocabulary vocab,
                                                           const std::map<TokenSequence, std::vector<double>>& rows,
                                                           std::optional<std::vector<double>> fallback = std::nullopt);

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

  const std::map<TokenSequence, LogProbVector>& table() const { return table_; }

 private:
  Vocabulary vocab_;
  std::map<TokenSequence, LogProbVector> table_;
  std::optional<LogProbVector> fallback_;
};

struct NgramOptions {
  std::size_t order = 2;
  double k = 1.0;  // add-k smoothing, k > 0
  // Treat every corpus sequence as ending in eog so the model can stop.
  bool append_eog = true;
};

// p(v | x) = (count(c, v) + k) / (count(c) + k |V + eog|) with c the last
// order-1 ids of x. Near the start of a sequence the context is shorter.
class NgramProvider : public LanguageModel {
 public:
  NgramProvider(Vocabulary vocab, const std::vector<TokenSequence>& corpus, NgramOptions options = {});

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

  std::shared_ptr<const State> initial_state(std::span<const TokenId> prefix) const override;
  std::shared_ptr<const State> extend_state(const State* state, std::span<const TokenId> prefix) const override;
  LogProbVector next_dist(std::span<const TokenId> prefix, const State* state) const override;

  const NgramOptions& options() const { return options_; }

 private:
  struct Row {
    std::vector<std::uint32_t> counts;  // |V| + 1
    std::uint64_t total = 0;
  };
  struct ContextState;
  const Row* find_row(std::span<const TokenId> prefix) const;
  LogProbVector distribution(const Row* row) const;

  Vocabulary vocab_;
  NgramOptions options_;
  std::map<TokenSequence, Row> rows_;
};

// Every prefix maps to the uniform distribution.
class UniformProvider : public LanguageModel {
 public:
  explicit UniformProvider(Vocabulary vocab) : vocab_(std::move(vocab)) {}
  const Vocabulary& vocabulary() const override { return vocab_; }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

 private:
  Vocabulary vocab_;
};

}  // namespace sufcon
