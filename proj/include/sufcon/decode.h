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
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "sufcon/automaton.h"
#include "sufcon/errors.h"
#include "sufcon/logprob.h"
#include "sufcon/provider.h"

namespace sufcon {

enum class Algorithm { kGreedy, kConstrainedGreedy, kPipeline, kConstrainedBeam, kBifurcation };
enum class PenaltySpace { kProbability, kLog };
enum class Selection { kMinPenalty, kLast };

std::string to_string(Algorithm a);
std::string to_string(PenaltySpace s);
std::string to_string(Selection s);
// Throw ConfigError on unknown names.
Algorithm parse_algorithm(const std::string& name);
PenaltySpace parse_penalty_space(const std::string& name);
Selection parse_selection(const std::string& name);

struct DecodeConfig {
  std::size_t budget = 1024;               // generated tokens, eog included
  std::size_t completion_allowance = 256;  // extra tokens for finishing a selected hypothesis
  PenaltySpace penalty_space = PenaltySpace::kProbability;
  Selection selection = Selection::kMinPenalty;

  // Throws ConfigError unless budget >= 1.
  void validate() const;
};

enum class TraceEvent { kExtend, kReplace, kShadow, kTerminate, kComplete };

std::string to_string(TraceEvent e);
TraceEvent parse_trace_event(const std::string& name);

inline constexpr int kGreedyTrack = -1;

// One line of a decode trace. Tracks are the greedy hypothesis and numbered
// constrained hypotheses. `replace` and `shadow` open constrained track k as a
// fork of the greedy track at its current length (eog excluded); a shadow then
// copies every later greedy token until its own next record. `terminate`
// closes the decode and names the returned track.
struct TraceRecord {
  std::size_t step = 0;  // 1-based driving-loop step
  int track = kGreedyTrack;
  TokenId token = -1;  // -1 when the record appends nothing
  double logprob = kNegInf;
  double best_logprob = kNegInf;  // max over the full distribution
  std::optional<double> penalty;
  TraceEvent event = TraceEvent::kExtend;
  std::optional<std::size_t> mask_size;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

std::string track_tag(int track);
int parse_track_tag(const std::string& tag);

struct DecodeStats {
  std::size_t steps = 0;
  std::size_t provider_calls = 0;
  double wall_ms = 0.0;
};

struct DecodeResult {
  Algorithm algorithm = Algorithm::kGreedy;
  TokenSequence tokens;  // generated tokens only
  bool finished = false;
  std::optional<std::size_t> bifurcation_pos;
  double score = 0.0;  // sum of chosen log-probabilities
  std::optional<double> penalty;
  std::vector<TraceRecord> trace;
  DecodeStats stats;
  std::string diagnostic;
};

// A decode aborted by an error; carries everything generated so far.
class DecodeFailure : public Error {
 public:
  DecodeFailure(DecodeResult partial, std::exception_ptr cause, const std::string& what)
      : Error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}
  const DecodeResult& partial() const { return partial_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  DecodeResult partial_;
  std::exception_ptr cause_;
};

// A candidate output r ⊙ a. `cursor` is present once the answer part started.
struct Hypothesis {
  TokenSequence tokens;
  double score = 0.0;
  std::optional<Cursor> cursor;
  std::size_t bifurcation_pos = 0;
  std::optional<double> penalty;
  ProviderSession session;
};

// Ties between real tokens go to the lowest id. `eog_wins_ties` decides ties
// against eog.
TokenId argmax(const LogProbVector& v, bool include_eog, bool eog_wins_ties);
std::optional<TokenId> masked_argmax(const LogProbVector& v, const TokenMask& mask, bool eog_wins_ties);
double masked_max(const LogProbVector& v, const TokenMask& mask);

// log(exp(log_a) - exp(log_b)); -inf on equality. DomainError if log_a < log_b.
double stable_prob_diff(double log_a, double log_b);

// Comparison key of a bifurcation penalty: log of the probability gap, or the
// log-probability gap itself. Lower is better in both spaces.
double penalty_key(double best, double allowed_best, PenaltySpace space);
// Non-negative penalty value for a key.
double penalty_value(double key, PenaltySpace space);
// max over the vocabulary and eog minus max over the mask.
double bifurcation_penalty(const LogProbVector& v, const TokenMask& mask, PenaltySpace space);

double min_entropy(const LogProbVector& v);

DecodeResult greedy_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                           const DecodeConfig& cfg);
DecodeResult constrained_greedy_decode(const std::shared_ptr<const LanguageModel>& model,
                                       const TokenSequence& prompt, const ConstraintAutomaton& automaton,
                                       const DecodeConfig& cfg);
DecodeResult pipeline_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                             const ConstraintAutomaton& automaton, const DecodeConfig& cfg);
DecodeResult constrained_beam_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                                     const ConstraintAutomaton& automaton, const DecodeConfig& cfg);
DecodeResult bifurcation_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                                const ConstraintAutomaton& automaton, const DecodeConfig& cfg);

// Dispatches on `algorithm`; the automaton is ignored for plain greedy.
DecodeResult decode(Algorithm algorithm, const std::shared_ptr<const LanguageModel>& model,
                    const TokenSequence& prompt, const ConstraintAutomaton& automaton, const DecodeConfig& cfg);

// Per greedy step: H(after the best answer-starting token) minus H(after the
// best token), both from the same prefix. NaN when no token starts an answer.
std::vector<double> entropy_diff_trace(const std::shared_ptr<const LanguageModel>& model,
                                       const TokenSequence& prompt, const ConstraintAutomaton& automaton,
                                       const DecodeConfig& cfg);

}  // namespace sufcon
