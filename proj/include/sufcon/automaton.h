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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sufcon/dfa.h"
#include "sufcon/earley.h"
#include "sufcon/grammar.h"
#include "sufcon/vocabulary.h"

namespace sufcon {

struct CompileOptions {
  RegexOptions regex;
};

// A compiled grammar: a pruned, minimized DFA for regular specs or an Earley
// grammar for context-free specs. Immutable and cheap to copy.
class ConstraintAutomaton {
 public:
  struct Impl;

  static ConstraintAutomaton compile(const GrammarSpec& spec, const CompileOptions& options = {});

  GrammarKind kind() const;
  const GrammarSpec& spec() const;
  const Dfa* dfa() const;  // nullptr for context-free grammars
  const std::shared_ptr<const EarleyGrammar>& earley() const;
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// Recognition state for a string in the prefix language.
class Cursor {
 public:
  const ConstraintAutomaton& automaton() const { return automaton_; }
  std::size_t consumed() const { return consumed_; }
  std::int32_t dfa_state() const { return state_; }
  const std::shared_ptr<const EarleyChart>& chart() const { return chart_; }

 private:
  friend Cursor initial_cursor(const ConstraintAutomaton&);
  friend std::optional<Cursor> try_step_char(const Cursor&, char32_t);

  ConstraintAutomaton automaton_;
  std::int32_t state_ = Dfa::kNoState;
  std::shared_ptr<const EarleyChart> chart_;
  std::size_t consumed_ = 0;
};

// Token-level transition set: tokens whose text keeps the consumed string in
// the prefix language, plus end-of-generation exactly when it is accepted.
struct TokenMask {
  std::vector<TokenId> allowed;  // ascending
  bool allow_eog = false;

  bool contains(TokenId id) const;
  bool empty() const { return allowed.empty() && !allow_eog; }
  std::size_t size() const { return allowed.size() + (allow_eog ? 1 : 0); }
};

Cursor initial_cursor(const ConstraintAutomaton& automaton);

// Throws PrefixError when consumed + c is outside the prefix language.
Cursor step_char(const Cursor& cursor, char32_t c);
std::optional<Cursor> try_step_char(const Cursor& cursor, char32_t c);
std::optional<Cursor> try_step_text(const Cursor& cursor, std::u32string_view text);

bool is_accepting(const Cursor& cursor);

// Characters that can follow the consumed string.
CharClass live_continuations(const Cursor& cursor);

TokenMask allowed_tokens(const Cursor& cursor, const Vocabulary& vocab);

// Throws PrefixError if the token is not admissible.
Cursor step_token(const Cursor& cursor, TokenId token, const Vocabulary& vocab);

// Fewest tokens needed to reach an accepting state (end-of-generation not
// counted). Exact for regular grammars. For context-free grammars this is the
// fewest characters, a bound that holds whenever each required character is
// available as a single-character token. nullopt when unreachable.
std::optional<std::size_t> tokens_to_accept(const Cursor& cursor, const Vocabulary& vocab);

inline constexpr std::size_t kDefaultOracleBound = 8;

// Every string over `alphabet` of length <= max_len in the prefix language,
// found by exhaustive extension. Throws OracleBoundError above `bound`.
std::set<std::u32string> enumerate_prefixes(const ConstraintAutomaton& automaton, std::u32string_view alphabet,
                                            std::size_t max_len, std::size_t bound = kDefaultOracleBound);

}  // namespace sufcon
