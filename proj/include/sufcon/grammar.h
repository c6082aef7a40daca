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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sufcon/char_class.h"

namespace sufcon {

// One right-hand-side item: a terminal character class or a nonterminal name.
struct GrammarSymbol {
  bool terminal = false;
  CharClass chars;
  std::string nonterminal;

  static GrammarSymbol term(CharClass cc) { return {true, std::move(cc), {}}; }
  static GrammarSymbol term(char32_t c) { return term(CharClass::single(c)); }
  static GrammarSymbol nonterm(std::string name) { return {false, {}, std::move(name)}; }

  friend bool operator==(const GrammarSymbol&, const GrammarSymbol&) = default;
};

struct GrammarRule {
  std::string lhs;
  std::vector<GrammarSymbol> rhs;  // empty for an epsilon rule

  friend bool operator==(const GrammarRule&, const GrammarRule&) = default;
};

struct ContextFreeGrammar {
  std::string start;
  std::vector<GrammarRule> rules;

  bool has_nonterminal(std::string_view name) const;
  std::vector<std::string> nonterminals() const;
};

enum class GrammarKind { kRegular, kContextFree };

struct GrammarSpec {
  GrammarKind kind = GrammarKind::kRegular;
  std::string pattern;  // regular: implicitly anchored at both ends
  ContextFreeGrammar cfg;

  static GrammarSpec regular(std::string pattern) { return {GrammarKind::kRegular, std::move(pattern), {}}; }
  static GrammarSpec context_free(ContextFreeGrammar g) { return {GrammarKind::kContextFree, {}, std::move(g)}; }
};

// Throws ValidationError unless the start symbol exists and every
// right-hand-side nonterminal has a rule.
void validate(const ContextFreeGrammar& g);

// Rule notation: `NT -> item item ... | ...` with quoted strings, bracket
// classes, nonterminal names and `~` for the empty sequence. Quoted strings
// expand into one terminal per character.
ContextFreeGrammar parse_cfg_rules(std::string_view start, std::string_view rules_text, std::size_t first_line = 1);

// Grammar file: `kind: regular` + one pattern line, or `kind: cfg` +
// `start: NT` + rule lines. Lines starting with '#' are comments.
GrammarSpec parse_grammar_file_text(std::string_view text);
GrammarSpec load_grammar_file(const std::filesystem::path& path);

std::string format_grammar_file(const GrammarSpec& spec);

}  // namespace sufcon
