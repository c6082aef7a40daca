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
namespace {

using internal::max_logprob;
using internal::Run;

struct ConstrainedOutcome {
  TokenSequence tokens;
  double score = 0.0;
  bool finished = false;
};

// Masked greedy steps from `session`, recorded on track 0 starting at step
// `first_step`. The first record opens the track.
ConstrainedOutcome constrained_steps(Run& run, ProviderSession session, const ConstraintAutomaton& automaton,
                                     std::size_t budget, std::size_t first_step) {
  const Vocabulary& vocab = session.model().vocabulary();
  ConstrainedOutcome out;
  Cursor cursor = initial_cursor(automaton);
  for (std::size_t i = 0; i < budget; ++i) {
    TokenMask mask = allowed_tokens(cursor, vocab);
    if (mask.empty()) throw StuckConstraintError(detokenize(vocab, out.tokens));
    const LogProbVector& d = run.dist(session);
    TokenId t = *masked_argmax(d, mask, true);
    run.record(first_step + i, 0, t, d[t], max_logprob(d), std::nullopt,
               i == 0 ? TraceEvent::kReplace : TraceEvent::kExtend, mask.size());
    out.tokens.push_back(t);
    out.score += d[t];
    run.result.tokens.push_back(t);
    run.result.score += d[t];
    if (t == vocab.eog_id()) {
      out.finished = true;
      break;
    }
    cursor = step_token(cursor, t, vocab);
    session = session.extend(t);
  }
  return out;
}

}  // namespace

DecodeResult greedy_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                           const DecodeConfig& cfg) {
  cfg.validate();
  Run run(Algorithm::kGreedy);
  run.set_eog(model->vocabulary().eog_id());
  return run.guard([&] {
    ProviderSession s(model, prompt);
    const TokenId eog = model->vocabulary().eog_id();
    for (std::size_t step = 1; step <= cfg.budget; ++step) {
      const LogProbVector& d = run.dist(s);
      TokenId t = argmax(d, true, false);
      run.record(step, kGreedyTrack, t, d[t], d[t], std::nullopt, TraceEvent::kExtend);
      run.result.tokens.push_back(t);
      run.result.score += d[t];
      if (t == eog) {
        run.result.finished = true;
        break;
      }
      s = s.extend(t);
    }
    run.terminate(kGreedyTrack);
  });
}

DecodeResult constrained_greedy_decode(const std::shared_ptr<const LanguageModel>& model,
                                       const TokenSequence& prompt, const ConstraintAutomaton& automaton,
                                       const DecodeConfig& cfg) {
  cfg.validate();
  Run run(Algorithm::kConstrainedGreedy);
  run.set_eog(model->vocabulary().eog_id());
  return run.guard([&] {
    run.result.bifurcation_pos = 0;
    ConstrainedOutcome out = constrained_steps(run, ProviderSession(model, prompt), automaton, cfg.budget, 1);
    run.result.finished = out.finished;
    run.terminate(0);
  });
}

DecodeResult pipeline_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                             const ConstraintAutomaton& automaton, const DecodeConfig& cfg) {
  cfg.validate();
  Run run(Algorithm::kPipeline);
  const TokenId eog = model->vocabulary().eog_id();
  run.set_eog(eog);
  return run.guard([&] {
    ProviderSession s(model, prompt);
    bool ended = false;
    std::size_t step = 0;
    while (step < cfg.budget) {
      ++step;
      const LogProbVector& d = run.dist(s);
      TokenId t = argmax(d, true, false);
      run.record(step, kGreedyTrack, t, d[t], d[t], std::nullopt, TraceEvent::kExtend);
      if (t == eog) {
        ended = true;
        break;
      }
      run.result.tokens.push_back(t);
      run.result.score += d[t];
      s = s.extend(t);
    }
    if (!ended) {
      run.terminate(kGreedyTrack);
      return;
    }
    // The dropped eog frees its slot; the answer may also use the allowance.
    const std::size_t reasoning = run.result.tokens.size();
    run.result.bifurcation_pos = reasoning;
    ConstrainedOutcome out =
        constrained_steps(run, s, automaton, cfg.budget - reasoning + cfg.completion_allowance, step + 1);
    run.result.finished = out.finished;
    run.terminate(0);
  });
}

DecodeResult decode(Algorithm algorithm, const std::shared_ptr<const LanguageModel>& model,
                    const TokenSequence& prompt, const ConstraintAutomaton& automaton, const DecodeConfig& cfg) {
  switch (algorithm) {
    case Algorithm::kGreedy: return greedy_decode(model, prompt, cfg);
    case Algorithm::kConstrainedGreedy: return constrained_greedy_decode(model, prompt, automaton, cfg);
    case Algorithm::kPipeline: return pipeline_decode(model, prompt, automaton, cfg);
    case Algorithm::kConstrainedBeam: return constrained_beam_decode(model, prompt, automaton, cfg);
    case Algorithm::kBifurcation: return bifurcation_decode(model, prompt, automaton, cfg);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace sufcon
