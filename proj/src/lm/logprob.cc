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

#include "sufcon/logprob.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sufcon/errors.h"

namespace sufcon {

double logsumexp(std::span<const double> values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

LogProbVector::LogProbVector(std::vector<double> values, double tolerance) : values_(std::move(values)) {
  if (values_.size() < 2) throw ValidationError("log-probability vector needs at least one token and the eog slot");
  bool any_finite = false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double v = values_[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw ValidationError("log-probability at index " + std::to_string(i) + " is not finite or -inf");
    if (v > tolerance)
      throw ValidationError("log-probability at index " + std::to_string(i) + " is positive");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw ValidationError("log-probability vector has no finite entry");
  double lse = logsumexp(values_);
  if (std::abs(lse) > tolerance) {
    std::ostringstream msg;
    msg << "log-probability vector is not normalized (logsumexp = " << lse << ")";
    throw ValidationError(msg.str());
  }
}

LogProbVector LogProbVector::from_probabilities(std::span<const double> probs, double tolerance) {
  std::vector<double> logs(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw ValidationError("probability at index " + std::to_string(i) + " is negative");
    logs[i] = probs[i] == 0.0 ? kNegInf : std::log(probs[i]);
  }
  return LogProbVector(std::move(logs), tolerance);
}

LogProbVector LogProbVector::normalized(std::vector<double> scores) {
  double lse = logsumexp(scores);
  if (!std::isfinite(lse)) throw ValidationError("scores cannot be normalized");
  for (double& v : scores) v -= lse;
  return LogProbVector(std::move(scores));
}

LogProbVector LogProbVector::uniform(std::size_t size) {
  return LogProbVector(std::vector<double>(size, -std::log(static_cast<double>(size))));
}

}  // namespace sufcon
