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

#include "sufcon/grammar.h"

#include <gtest/gtest.h>

#include "sufcon/errors.h"

namespace sufcon {
namespace {

TEST(ParseCfgRules, LiteralsExpandPerCharacter) {
  ContextFreeGrammar g = parse_cfg_rules("S", "S -> \"ab\" T | ~\nT -> [0-9] | \"\\\"\"");
  ASSERT_EQ(g.rules.size(), 4u);
  EXPECT_EQ(g.rules[0].lhs, "S");
  ASSERT_EQ(g.rules[0].rhs.size(), 3u);
  EXPECT_EQ(g.rules[0].rhs[0], GrammarSymbol::term(U'a'));
  EXPECT_EQ(g.rules[0].rhs[1], GrammarSymbol::term(U'b'));
  EXPECT_EQ(g.rules[0].rhs[2], GrammarSymbol::nonterm("T"));
  EXPECT_TRUE(g.rules[1].rhs.empty());
  EXPECT_EQ(g.rules[2].rhs[0], GrammarSymbol::term(CharClass::range(U'0', U'9')));
  EXPECT_EQ(g.rules[3].rhs[0], GrammarSymbol::term(U'"'));
}

TEST(ParseCfgRules, ContinuationAndComments) {
  ContextFreeGrammar g = parse_cfg_rules("S", "# leading comment\nS -> \"a\"\n   | \"b\"   # trailing\n");
  EXPECT_EQ(g.rules.size(), 2u);
}

TEST(ParseCfgRules, ErrorsNameLine) {
  try {
    parse_cfg_rules("S", "S -> \"a\"\nT \"b\"");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_cfg_rules("S", "S -> \"a"), ParseError);
  EXPECT_THROW(parse_cfg_rules("S", "S -> [a-"), ParseError);
}

TEST(Validate, Invariants) {
  EXPECT_THROW(validate(parse_cfg_rules("S", "S -> T")), ValidationError);
  EXPECT_THROW(validate(parse_cfg_rules("X", "S -> ~")), ValidationError);
  EXPECT_NO_THROW(validate(parse_cfg_rules("S", "S -> ~")));
}

TEST(GrammarFile, Regular) {
  GrammarSpec s = parse_grammar_file_text("kind: regular\nThe answer is: [+-]?\\d+\n");
  EXPECT_EQ(s.kind, GrammarKind::kRegular);
  EXPECT_EQ(s.pattern, "The answer is: [+-]?\\d+");
}

TEST(GrammarFile, ContextFree) {
  GrammarSpec s = parse_grammar_file_text("kind: cfg\nstart: S\nS -> ~ | \"(\" S \")\" S\n");
  EXPECT_EQ(s.kind, GrammarKind::kContextFree);
  EXPECT_EQ(s.cfg.start, "S");
  EXPECT_EQ(s.cfg.rules.size(), 2u);
}

TEST(GrammarFile, Errors) {
  EXPECT_THROW(parse_grammar_file_text("kind: pcre\nabc\n"), ParseError);
  EXPECT_THROW(parse_grammar_file_text("kind: cfg\nS -> ~\n"), ParseError);
  EXPECT_THROW(parse_grammar_file_text(""), ParseError);
  EXPECT_THROW(parse_grammar_file_text("kind: regular\n"), ParseError);
}

TEST(GrammarFile, FormatRoundTrip) {
  for (const char* text : {"kind: regular\na|b*\n", "kind: cfg\nstart: B\nB -> ~ | [^{}] B | \"{\" B \"}\" B\n",
                           "kind: cfg\nstart: S\nS -> \"a\\\"\\\\\\n\\u0001\\uD83D\\uDE00\" [a-c] \"x\" [\\u0000-z] S | ~\n"}) {
    GrammarSpec s = parse_grammar_file_text(text);
    GrammarSpec back = parse_grammar_file_text(format_grammar_file(s));
    EXPECT_EQ(back.kind, s.kind);
    EXPECT_EQ(back.pattern, s.pattern);
    EXPECT_EQ(back.cfg.start, s.cfg.start);
    EXPECT_EQ(back.cfg.rules, s.cfg.rules);
  }
}

TEST(GrammarFile, FormatMergesLiteralsAndNegatesClasses) {
  GrammarSpec s = parse_grammar_file_text("kind: cfg\nstart: S\nS -> \"ab\" \"c\" [^{}] [xy] S | ~\n");
  EXPECT_EQ(format_grammar_file(s), "kind: cfg\nstart: S\nS -> \"abc\" [^{}] [xy] S\nS -> ~\n");
}

}  // namespace
}  // namespace sufcon
