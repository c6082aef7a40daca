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

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sufcon/vocabulary.h"

namespace sufcon {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))) computed around the maximum; -inf for an all -inf input.
double logsumexp(std::span<const double> values);

// Log-probabilities over the vocabulary plus the end-of-generation slot,
// which is the last entry.
class LogProbVector {
 public:
  static constexpr double kTolerance = 1e-6;

  LogProbVector() = default;

  // Takes log-probabilities as given. Throws ValidationError unless every
  // entry is finite or -inf, one entry is finite, and the vector normalizes
  // within `tolerance`.
  explicit LogProbVector(std::vector<double> values, double tolerance = kTolerance);

  static LogProbVector from_probabilities(std::span<const double> probs, double tolerance = kTolerance);
  // Shifts arbitrary finite-or-(-inf) scores so they normalize exactly.
  static LogProbVector normalized(std::vector<double> scores);
  static LogProbVector uniform(std::size_t size);

  std::size_t size() const { return values_.size(); }
  TokenId eog_id() const { return static_cast<TokenId>(values_.size()) - 1; }
  double operator[](TokenId id) const { return values_[static_cast<std::size_t>(id)]; }
  double eog() const { return values_.back(); }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const LogProbVector&, const LogProbVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace sufcon
