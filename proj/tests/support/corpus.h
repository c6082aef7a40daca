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
#include <vector>

#include "sufcon/grammar.h"
#include "sufcon/vocabulary.h"

namespace sufcon::testing {

struct CorpusGrammar {
  std::string name;
  GrammarSpec spec;
  std::u32string alphabet;  // at most four characters
};

// Small grammars shared by the oracle, suffix and property suites.
const std::vector<CorpusGrammar>& grammar_corpus();

ContextFreeGrammar dyck_grammar();

// Every string of length 1..max_len over `alphabet`, shortest first.
Vocabulary exhaustive_vocabulary(std::u32string_view alphabet, std::size_t max_len);

// Single characters covering the shipped answer templates plus a few
// multi-character tokens, some of which straddle the answer boundary.
Vocabulary answer_vocabulary();

}  // namespace sufcon::testing
