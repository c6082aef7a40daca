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

#include <gtest/gtest.h>

#include <random>

#include "corpus.h"
#include "oracles.h"
#include "sufcon/automaton.h"
#include "sufcon/utf8.h"

namespace sufcon {
namespace {

bool accepts(const ConstraintAutomaton& a, std::u32string_view s) {
  auto c = try_step_text(initial_cursor(a), s);
  return c && is_accepting(*c);
}

std::vector<std::u32string> all_strings(std::u32string_view alphabet, std::size_t n) {
  std::vector<std::u32string> out{U""};
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k].size() < n)
      for (char32_t c : alphabet) out.push_back(out[k] + c);
  return out;
}

TEST(RightLinearGrammar, SameLanguage) {
  Dfa d = compile_regex("a(b|c)*d");
  auto cfg = ConstraintAutomaton::compile(GrammarSpec::context_free(right_linear_grammar(d)));
  testing::RegexOracle oracle(U"a(b|c)*d");
  for (const auto& s : all_strings(U"abcd", 5)) EXPECT_EQ(accepts(cfg, s), oracle.in_language(s));
}

TEST(BuildSuffixGrammar, RegularAb) {
  auto a = ConstraintAutomaton::compile(build_suffix_grammar(GrammarSpec::regular("ab"), Vocabulary::from_utf8({"a", "b"})));
  for (const auto& s : all_strings(U"ab", 6)) {
    bool ends = s.size() >= 2 && s.substr(s.size() - 2) == U"ab";
    EXPECT_EQ(accepts(a, s), ends) << utf8::encode(s);
  }
}

TEST(BuildSuffixGrammar, SingleLetter) {
  auto a = ConstraintAutomaton::compile(build_suffix_grammar(GrammarSpec::regular("x"), Vocabulary::from_utf8({"x"})));
  EXPECT_FALSE(accepts(a, U""));
  for (const auto& s : {U"x", U"xx", U"xxx", U"xxxxxxx"}) EXPECT_TRUE(accepts(a, s));
}

TEST(BuildSuffixGrammar, DyckBySuffixSplitting) {
  Vocabulary v = Vocabulary::from_utf8({"(", ")"});
  ContextFreeGrammar dyck = testing::dyck_grammar();
  GrammarSpec sfx = build_suffix_grammar(GrammarSpec::context_free(dyck), v);
  auto a = ConstraintAutomaton::compile(sfx);
  testing::CfgOracle inner(dyck);
  for (const auto& s : all_strings(U"()", 4)) {
    bool split = false;
    for (std::size_t k = 0; k <= s.size(); ++k) split = split || inner.in_language(s.substr(k));
    EXPECT_EQ(accepts(a, s), split) << utf8::encode(s);
  }
  EXPECT_TRUE(accepts(a, U"((()"));
}

TEST(BuildSuffixGrammar, RenamesCollidingNonterminals) {
  ContextFreeGrammar g = parse_cfg_rules("S", "S -> \"a\" R\nR -> \"b\"");
  GrammarSpec sfx = build_suffix_grammar(GrammarSpec::context_free(g), Vocabulary::from_utf8({"a", "b"}));
  EXPECT_NE(sfx.cfg.start, "S");
  auto a = ConstraintAutomaton::compile(sfx);
  EXPECT_TRUE(accepts(a, U"bbab"));
  EXPECT_FALSE(accepts(a, U"ba"));
}

TEST(BuildSuffixGrammar, CoversMultiCharacterTokens) {
  // The free part ranges over characters of the vocabulary, not token ids.
  Vocabulary v = Vocabulary::from_utf8({"q", "zz"});
  auto a = ConstraintAutomaton::compile(build_suffix_grammar(GrammarSpec::regular("q"), v));
  EXPECT_TRUE(accepts(a, U"zq"));
  EXPECT_TRUE(accepts(a, U"zzzq"));
}

TEST(SuffixGrammarProperty, MaskIsFullVocabulary) {
  std::mt19937 rng(5);
  for (const auto& g : testing::grammar_corpus()) {
    Vocabulary v = testing::exhaustive_vocabulary(g.alphabet, 3);
    auto a = ConstraintAutomaton::compile(build_suffix_grammar(g.spec, v));
    std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(v.size()) - 1);
    Cursor c = initial_cursor(a);
    for (int step = 0; step < 20; ++step) {
      TokenMask m = allowed_tokens(c, v);
      ASSERT_EQ(m.allowed.size(), v.size()) << g.name;
      c = step_token(c, pick(rng), v);
    }
  }
}

}  // namespace
}  // namespace sufcon
