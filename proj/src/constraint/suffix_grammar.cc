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

#include "sufcon/suffix_grammar.h"

namespace sufcon {

ContextFreeGrammar right_linear_grammar(const Dfa& dfa, const std::string& prefix) {
  auto name = [&](std::size_t s) { return prefix + std::to_string(s); };
  ContextFreeGrammar g;
  g.start = name(static_cast<std::size_t>(dfa.start));
  for (std::size_t s = 0; s < dfa.num_states(); ++s) {
    if (dfa.accepting[s]) g.rules.push_back({name(s), {}});
    for (const auto& t : dfa.transitions[s]) {
      g.rules.push_back({name(s), {GrammarSymbol::term(CharClass::range(t.lo, t.hi)),
                                   GrammarSymbol::nonterm(name(static_cast<std::size_t>(t.target)))}});
    }
  }
  return g;
}

ContextFreeGrammar to_context_free(const GrammarSpec& spec, const RegexOptions& options) {
  if (spec.kind == GrammarKind::kContextFree) return spec.cfg;
  return right_linear_grammar(compile_regex(spec.pattern, options));
}

GrammarSpec build_suffix_grammar(const GrammarSpec& spec, const Vocabulary& vocab) {
  ContextFreeGrammar base = to_context_free(spec);
  auto fresh = [&](std::string n) {
    while (base.has_nonterminal(n)) n += "'";
    return n;
  };
  std::string s = fresh("S");
  std::string r = fresh("R");

  ContextFreeGrammar out;
  out.start = s;
  out.rules.push_back({s, {GrammarSymbol::nonterm(r), GrammarSymbol::nonterm(base.start)}});
  out.rules.push_back({r, {}});
  for (char32_t c : vocab.alphabet()) {
    out.rules.push_back({r, {GrammarSymbol::term(c), GrammarSymbol::nonterm(r)}});
  }
  out.rules.insert(out.rules.end(), base.rules.begin(), base.rules.end());
  return GrammarSpec::context_free(std::move(out));
}

}  // namespace sufcon
