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

#include <gtest/gtest.h>

#include <random>

#include "corpus.h"
#include "mocks.h"
#include "reference.h"
#include "sufcon/decode.h"
#include "sufcon/errors.h"
#include "sufcon/suffix_grammar.h"
#include "sufcon/trace.h"

namespace sufcon {
namespace {

using testing::CorpusGrammar;

struct Variant {
  Algorithm algorithm;
  PenaltySpace space = PenaltySpace::kProbability;
  Selection selection = Selection::kMinPenalty;
};

const std::vector<Variant>& variants() {
  static const std::vector<Variant> v = {
      {Algorithm::kGreedy},
      {Algorithm::kConstrainedGreedy},
      {Algorithm::kPipeline},
      {Algorithm::kConstrainedBeam},
      {Algorithm::kBifurcation, PenaltySpace::kProbability, Selection::kMinPenalty},
      {Algorithm::kBifurcation, PenaltySpace::kProbability, Selection::kLast},
      {Algorithm::kBifurcation, PenaltySpace::kLog, Selection::kMinPenalty},
      {Algorithm::kBifurcation, PenaltySpace::kLog, Selection::kLast},
  };
  return v;
}

bool suffix_algorithm(Algorithm a) {
  return a == Algorithm::kPipeline || a == Algorithm::kConstrainedBeam || a == Algorithm::kBifurcation;
}

struct Run {
  std::optional<DecodeResult> result;
  std::optional<testing::ReferenceOutcome> reference;
  bool stuck = false;
};

class Randomized : public ::testing::TestWithParam<std::size_t> {
 protected:
  const CorpusGrammar& grammar() const { return testing::grammar_corpus()[GetParam()]; }
};

DecodeConfig config(const Variant& v, std::mt19937_64& rng) {
  DecodeConfig c;
  c.budget = 1 + rng() % 9;
  c.completion_allowance = rng() % 8;
  c.penalty_space = v.space;
  c.selection = v.selection;
  return c;
}

TEST_P(Randomized, MatchesReferenceAndInvariants) {
  const CorpusGrammar& g = grammar();
  const ConstraintAutomaton automaton = ConstraintAutomaton::compile(g.spec);
  const testing::ReferenceConstraint reference(g.spec);
  const Vocabulary vocab = testing::exhaustive_vocabulary(g.alphabet, 2);
  std::mt19937_64 rng(1000 + GetParam());
  std::size_t finished_suffix = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto model = testing::random_model(vocab, rng);
    TokenSequence prompt;
    if (rng() % 2) prompt.push_back(static_cast<TokenId>(rng() % vocab.size()));
    for (const Variant& v : variants()) {
      DecodeConfig cfg = config(v, rng);
      SCOPED_TRACE(g.name + " " + to_string(v.algorithm) + " trial " + std::to_string(trial));
      std::optional<DecodeResult> r;
      bool stuck = false;
      try {
        r = decode(v.algorithm, model, prompt, automaton, cfg);
      } catch (const DecodeFailure& f) {
        try {
          std::rethrow_exception(f.cause());
        } catch (const StuckConstraintError&) {
          stuck = true;
        }
      }
      std::optional<testing::ReferenceOutcome> want;
      try {
        want = testing::reference_decode(v.algorithm, model, prompt, reference, cfg);
      } catch (const StuckConstraintError&) {
        EXPECT_TRUE(stuck);
        continue;
      }
      ASSERT_FALSE(stuck);
      ASSERT_TRUE(r);
      EXPECT_EQ(r->tokens, want->tokens);
      EXPECT_EQ(r->finished, want->finished);
      EXPECT_EQ(r->bifurcation_pos, want->bifurcation_pos);
      EXPECT_EQ(r->score, want->score);
      EXPECT_EQ(r->penalty, want->penalty);

      // Invariants.
      EXPECT_EQ(r->finished, is_finished(vocab, r->tokens));
      EXPECT_NO_THROW(validate_sequence(vocab, r->tokens));
      const std::size_t limit =
          cfg.budget + (v.algorithm == Algorithm::kBifurcation || v.algorithm == Algorithm::kPipeline
                            ? cfg.completion_allowance
                            : 0);
      EXPECT_LE(r->tokens.size(), limit);
      for (const auto& t : r->trace)
        if (t.penalty) {
          EXPECT_GE(*t.penalty, 0.0);
        }
      if (r->penalty) {
        EXPECT_GE(*r->penalty, 0.0);
      }
      if (r->finished && v.algorithm != Algorithm::kGreedy) {
        ASSERT_TRUE(r->bifurcation_pos);
        TokenSequence answer(r->tokens.begin() + static_cast<long>(*r->bifurcation_pos), r->tokens.end() - 1);
        EXPECT_TRUE(reference.in_language(detokenize_chars(vocab, answer)));
        if (v.algorithm == Algorithm::kConstrainedGreedy) {
          EXPECT_EQ(*r->bifurcation_pos, 0u);
        }
        if (suffix_algorithm(v.algorithm)) ++finished_suffix;
      }
      if (v.algorithm == Algorithm::kBifurcation) {
        EXPECT_TRUE(r->finished || !r->diagnostic.empty());
      }

      // Determinism.
      DecodeResult again = decode(v.algorithm, model, prompt, automaton, cfg);
      EXPECT_EQ(again.tokens, r->tokens);
      ASSERT_EQ(again.trace.size(), r->trace.size());
      for (std::size_t i = 0; i < r->trace.size(); ++i) {
        const auto& a = again.trace[i];
        const auto& b = r->trace[i];
        EXPECT_TRUE(a.step == b.step && a.track == b.track && a.token == b.token && a.logprob == b.logprob &&
                    a.best_logprob == b.best_logprob && a.penalty == b.penalty && a.event == b.event &&
                    a.mask_size == b.mask_size);
      }

      // The trace alone rebuilds the result, and the model agrees with it.
      ReplayOutcome replay = replay_trace(r->trace, vocab.eog_id());
      EXPECT_EQ(replay.tokens, r->tokens);
      EXPECT_EQ(replay.finished, r->finished);
      EXPECT_EQ(replay.bifurcation_pos, r->bifurcation_pos);
      EXPECT_EQ(replay.score, r->score);
      EXPECT_EQ(replay.penalty, r->penalty);
      EXPECT_EQ(replay.steps, r->stats.steps);
      TraceFile file{{v.algorithm, cfg, prompt}, r->trace};
      EXPECT_EQ(verify_trace(file, model, automaton), std::vector<std::string>{});
    }
  }
  EXPECT_GT(finished_suffix, 0u);
}

TEST_P(Randomized, ZeroPenaltyEquivalence) {
  const CorpusGrammar& g = grammar();
  const ConstraintAutomaton automaton = ConstraintAutomaton::compile(g.spec);
  const Vocabulary vocab = testing::exhaustive_vocabulary(g.alphabet, 2);
  std::mt19937_64 rng(2000 + GetParam());
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto word = testing::random_word(automaton, vocab, rng, rng() % 5);
    if (!word) continue;
    TokenSequence script;
    // Free tokens before the answer need not be well-formed.
    for (std::size_t i = 0, n = trial % 2 ? rng() % 4 : 0; i < n; ++i)
      script.push_back(static_cast<TokenId>(rng() % vocab.size()));
    script.insert(script.end(), word->begin(), word->end());
    script.push_back(vocab.eog_id());
    auto model = std::make_shared<testing::ScriptedProvider>(testing::random_model(vocab, rng), script);
    DecodeConfig cfg;
    cfg.budget = script.size() + rng() % 3;
    DecodeResult greedy = greedy_decode(model, {}, cfg);
    ASSERT_EQ(greedy.tokens, script);
    for (const Variant& v : variants()) {
      if (v.algorithm != Algorithm::kBifurcation) continue;
      cfg.penalty_space = v.space;
      cfg.selection = v.selection;
      DecodeResult r = bifurcation_decode(model, {}, automaton, cfg);
      EXPECT_EQ(r.tokens, greedy.tokens);
      EXPECT_EQ(r.score, greedy.score);
      EXPECT_EQ(r.penalty, 0.0);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

// Over the suffix grammar every token is admissible, so constrained greedy
// follows greedy until greedy stops before the output is well-formed.
TEST_P(Randomized, SuffixGrammarFollowsGreedy) {
  const CorpusGrammar& g = grammar();
  const Vocabulary vocab = testing::exhaustive_vocabulary(g.alphabet, 2);
  const ConstraintAutomaton suffix = ConstraintAutomaton::compile(build_suffix_grammar(g.spec, vocab));
  std::mt19937_64 rng(3000 + GetParam());
  for (int trial = 0; trial < 20; ++trial) {
    auto model = testing::random_model(vocab, rng);
    DecodeConfig cfg;
    cfg.budget = 1 + rng() % 10;
    DecodeResult free = greedy_decode(model, {}, cfg);
    DecodeResult c = constrained_greedy_decode(model, {}, suffix, cfg);
    Cursor cursor = initial_cursor(suffix);
    for (std::size_t i = 0; i < c.tokens.size(); ++i) {
      const TraceRecord& rec = c.trace[i];
      ASSERT_TRUE(rec.mask_size);
      EXPECT_EQ(*rec.mask_size, vocab.size() + (is_accepting(cursor) ? 1 : 0));
      if (i < free.tokens.size() && c.tokens[i] != free.tokens[i]) {
        bool greedy_stopped_early = free.tokens[i] == vocab.eog_id() && !is_accepting(cursor);
        bool eog_took_tie = c.tokens[i] == vocab.eog_id() && rec.logprob == rec.best_logprob;
        EXPECT_TRUE(greedy_stopped_early || eog_took_tie) << "step " << i;
        break;
      }
      if (c.tokens[i] == vocab.eog_id()) break;
      cursor = step_token(cursor, c.tokens[i], vocab);
    }
  }
}

TEST_P(Randomized, MinPenaltyNeverExceedsLast) {
  const CorpusGrammar& g = grammar();
  const ConstraintAutomaton automaton = ConstraintAutomaton::compile(g.spec);
  const Vocabulary vocab = testing::exhaustive_vocabulary(g.alphabet, 2);
  std::mt19937_64 rng(4000 + GetParam());
  for (int trial = 0; trial < 40; ++trial) {
    auto model = testing::random_model(vocab, rng);
    DecodeConfig cfg;
    cfg.budget = 1 + rng() % 12;
    DecodeResult lo = bifurcation_decode(model, {}, automaton, cfg);
    cfg.selection = Selection::kLast;
    DecodeResult last = bifurcation_decode(model, {}, automaton, cfg);
    if (lo.penalty && last.penalty) {
      EXPECT_LE(*lo.penalty, *last.penalty);
    }
  }
}

std::string name_of(const ::testing::TestParamInfo<std::size_t>& info) {
  return testing::grammar_corpus()[info.param].name;
}

INSTANTIATE_TEST_SUITE_P(Corpus, Randomized, ::testing::Range<std::size_t>(0, testing::grammar_corpus().size()),
                         name_of);

}  // namespace
}  // namespace sufcon
