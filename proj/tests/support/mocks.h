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
#include <string>
#include <vector>

#include <random>

#include "sufcon/automaton.h"
#include "sufcon/provider.h"

namespace sufcon::testing {

struct HashedOptions {
  std::uint64_t seed = 0;
  double spread = 3.0;     // scores are uniform in [-spread, spread]
  double eog_slope = 0.0;  // added to the eog score per prefix token
};

// A pseudo-random but fixed distribution for every prefix.
class HashedProvider : public LanguageModel {
 public:
  HashedProvider(Vocabulary vocab, HashedOptions options) : vocab_(std::move(vocab)), options_(options) {}

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

 private:
  Vocabulary vocab_;
  HashedOptions options_;
};

// Wraps `base` so that along `script` the scripted token is the strict argmax
// by `margin` nats. `script` may end in eog.
class ScriptedProvider : public LanguageModel {
 public:
  ScriptedProvider(std::shared_ptr<const LanguageModel> base, TokenSequence script, double margin = 0.5)
      : base_(std::move(base)), script_(std::move(script)), margin_(margin) {}

  const Vocabulary& vocabulary() const override { return base_->vocabulary(); }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override;

 private:
  std::shared_ptr<const LanguageModel> base_;
  TokenSequence script_;
  double margin_;
};

// Table mock keyed by detokenized text; every token is one character.
std::shared_ptr<TableProvider> char_table(const std::vector<std::string>& tokens,
                                          const std::map<std::string, std::vector<double>>& rows,
                                          std::optional<std::vector<double>> fallback = std::nullopt);

// Counts next_dist calls made on the wrapped model.
class CountingProvider : public LanguageModel {
 public:
  explicit CountingProvider(std::shared_ptr<const LanguageModel> base) : base_(std::move(base)) {}
  const Vocabulary& vocabulary() const override { return base_->vocabulary(); }
  LogProbVector next_dist(std::span<const TokenId> prefix) const override {
    ++calls;
    return base_->next_dist(prefix);
  }
  mutable std::size_t calls = 0;

 private:
  std::shared_ptr<const LanguageModel> base_;
};

// Either a hashed mock with random spread and eog drift or an n-gram model
// trained on a random corpus.
std::shared_ptr<const LanguageModel> random_model(const Vocabulary& vocab, std::mt19937_64& rng);

// Token sequence whose text is in the language: random admissible tokens,
// then the shortest way to acceptance. nullopt when no word is reachable.
std::optional<TokenSequence> random_word(const ConstraintAutomaton& automaton, const Vocabulary& vocab,
                                         std::mt19937_64& rng, std::size_t random_steps);

}  // namespace sufcon::testing
