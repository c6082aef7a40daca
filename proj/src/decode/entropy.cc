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

#include <cmath>
#include <limits>

#include "run.h"
#include "sufcon/decode.h"

namespace sufcon {

std::vector<double> entropy_diff_trace(const std::shared_ptr<const LanguageModel>& model,
                                       const TokenSequence& prompt, const ConstraintAutomaton& automaton,
                                       const DecodeConfig& cfg) {
  cfg.validate();
  const Vocabulary& vocab = model->vocabulary();
  TokenMask start = allowed_tokens(initial_cursor(automaton), vocab);
  start.allow_eog = false;  // answer-starting real tokens only
  std::vector<double> out;
  ProviderSession s(model, prompt);
  for (std::size_t step = 1; step <= cfg.budget; ++step) {
    const LogProbVector& d = s.next_dist();
    const TokenId free_best = argmax(d, false, false);
    const std::optional<TokenId> answer_best = masked_argmax(d, start, false);
    if (!answer_best) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    } else if (*answer_best == free_best) {
      out.push_back(0.0);
    } else {
      out.push_back(min_entropy(s.extend(*answer_best).next_dist()) - min_entropy(s.extend(free_best).next_dist()));
    }
    const TokenId g = argmax(d, true, false);
    if (g == vocab.eog_id()) break;
    s = s.extend(g);
  }
  return out;
}

}  // namespace sufcon
