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

#include <algorithm>
#include <chrono>
#include <string>

#include "sufcon/decode.h"

namespace sufcon::internal {

// Bookkeeping shared by the decoders: provider call counting, the trace and
// conversion of errors into DecodeFailure.
class Run {
 public:
  explicit Run(Algorithm algorithm) : start_(std::chrono::steady_clock::now()) { result.algorithm = algorithm; }

  const LogProbVector& dist(const ProviderSession& s) {
    if (!s.has_next_dist()) ++result.stats.provider_calls;
    return s.next_dist();
  }

  void record(std::size_t step, int track, TokenId token, double logprob, double best,
              std::optional<double> penalty, TraceEvent event, std::optional<std::size_t> mask_size = {}) {
    result.trace.push_back({step, track, token, logprob, best, penalty, event, mask_size});
    result.stats.steps = std::max(result.stats.steps, step);
  }

  void terminate(int track) {
    record(result.stats.steps, track, result.finished ? eog_ : -1, result.score, kNegInf, result.penalty,
           TraceEvent::kTerminate);
  }

  void set_eog(TokenId eog) { eog_ = eog; }

  template <typename Body>
  DecodeResult guard(Body body) {
    try {
      body();
    } catch (const DecodeFailure&) {
      throw;
    } catch (const Error& e) {
      stamp();
      throw DecodeFailure(result, std::current_exception(), to_string(result.algorithm) + " decode failed: " + e.what());
    }
    stamp();
    return std::move(result);
  }

  DecodeResult result;

 private:
  void stamp() {
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  std::chrono::steady_clock::time_point start_;
  TokenId eog_ = -1;
};

inline double max_logprob(const LogProbVector& v) { return v[argmax(v, true, false)]; }

}  // namespace sufcon::internal
