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

#include <string>

#include "sufcon/dfa.h"
#include "sufcon/grammar.h"
#include "sufcon/vocabulary.h"

namespace sufcon {

// Right-linear grammar with one nonterminal per DFA state.
ContextFreeGrammar right_linear_grammar(const Dfa& dfa, const std::string& prefix = "Q");

// Context-free form of a grammar spec; regular patterns go through their DFA.
ContextFreeGrammar to_context_free(const GrammarSpec& spec, const RegexOptions& options = {});

// Grammar for (vocabulary characters)* followed by a sentence of `spec`:
//   S -> R A,  R -> ~,  R -> c R  for every character c of the vocabulary,
// with S the new start symbol and A the start of `spec`. Fresh names are
// primed until they do not collide with existing nonterminals.
GrammarSpec build_suffix_grammar(const GrammarSpec& spec, const Vocabulary& vocab);

}  // namespace sufcon
