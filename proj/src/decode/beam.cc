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

#include "run.h"
#include "sufcon/decode.h"

namespace sufcon {

using internal::max_logprob;
using internal::Run;

DecodeResult constrained_beam_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                                     const ConstraintAutomaton& automaton, const DecodeConfig& cfg) {
  cfg.validate();
  Run run(Algorithm::kConstrainedBeam);
  const Vocabulary& vocab = model->vocabulary();
  const TokenId eog = vocab.eog_id();
  run.set_eog(eog);
  return run.guard([&] {
    const Cursor start = initial_cursor(automaton);
    const TokenMask start_mask = allowed_tokens(start, vocab);

    ProviderSession greedy(model, prompt);
    TokenSequence y;
    double s = 0.0;

    // The constrained hypothesis starts as r = a = ε on its own session so that
    // every step costs exactly two provider calls.
    Hypothesis c{{}, 0.0, start, 0, std::nullopt, ProviderSession(model, prompt)};
    int track = -1;
    bool finished = false;

    for (std::size_t step = 1; step <= cfg.budget && !finished; ++step) {
      const LogProbVector& dg = run.dist(greedy);
      const LogProbVector& dc = run.dist(c.session);
      const TokenMask mask = allowed_tokens(*c.cursor, vocab);
      const double replacement = s + masked_max(dg, start_mask);
      const double continuation = mask.empty() ? kNegInf : c.score + masked_max(dc, mask);

      // Continue only when replacing would score strictly lower.
      if (!(replacement < continuation)) {
        if (start_mask.empty()) throw StuckConstraintError(detokenize(vocab, c.tokens));
        TokenId v = *masked_argmax(dg, start_mask, true);
        ++track;
        run.record(step, track, v, dg[v], max_logprob(dg), std::nullopt, TraceEvent::kReplace, start_mask.size());
        c.tokens = y;
        c.tokens.push_back(v);
        c.score = s + dg[v];
        c.bifurcation_pos = y.size();
        if (v == eog) {
          finished = true;
        } else {
          c.cursor = step_token(start, v, vocab);
          c.session = greedy.extend(v);
        }
      } else {
        TokenId v = *masked_argmax(dc, mask, true);
        run.record(step, track, v, dc[v], max_logprob(dc), std::nullopt, TraceEvent::kExtend, mask.size());
        c.tokens.push_back(v);
        c.score += dc[v];
        if (v == eog) {
          finished = true;
        } else {
          c.cursor = step_token(*c.cursor, v, vocab);
          c.session = c.session.extend(v);
        }
      }
      if (finished) break;

      // The greedy hypothesis never ends.
      TokenId g = argmax(dg, false, false);
      run.record(step, kGreedyTrack, g, dg[g], max_logprob(dg), std::nullopt, TraceEvent::kExtend);
      y.push_back(g);
      s += dg[g];
      greedy = greedy.extend(g);
    }
    run.result.tokens = c.tokens;
    run.result.score = c.score;
    run.result.finished = finished;
    if (track >= 0) run.result.bifurcation_pos = c.bifurcation_pos;
    run.terminate(track >= 0 ? track : kGreedyTrack);
  });
}

}  // namespace sufcon
