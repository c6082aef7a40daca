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

#include "sufcon/vocabulary.h"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "sufcon/errors.h"

namespace sufcon {
namespace {

Vocabulary abc() { return Vocabulary::from_utf8({"a", "b", "ab"}); }

TEST(LoadVocabulary, ThreeTokens) {
  Vocabulary v = load_vocabulary("0\ta\n1\tb\n2\tab\n");
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.eog_id(), 3);
  EXPECT_EQ(v.text_utf8(2), "ab");
}

TEST(LoadVocabulary, FourTokens) {
  Vocabulary v = load_vocabulary("0\ta\n1\tb\n2\tc\n3\tab\n");
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.eog_id(), 4);
}

TEST(LoadVocabulary, DuplicateIdIsValidationError) {
  EXPECT_THROW(load_vocabulary("0\ta\n1\tb\n1\tc\n"), ValidationError);
}

TEST(LoadVocabulary, GapIsValidationError) { EXPECT_THROW(load_vocabulary("0\ta\n2\tb\n"), ValidationError); }

TEST(LoadVocabulary, MalformedLineNamesLine) {
  try {
    load_vocabulary("0\ta\nnonsense\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadVocabulary, EmptyTextRejected) { EXPECT_THROW(load_vocabulary("0\t\n"), ValidationError); }

TEST(LoadVocabulary, BadEscapeIsParseError) { EXPECT_THROW(load_vocabulary("0\t\\q\n"), ParseError); }

TEST(LoadVocabulary, Escapes) {
  Vocabulary v = load_vocabulary("0\t\\t\n1\t\\n\n2\t\\\\\n3\t\\u00e9\n4\t\\ud83d\\ude00\n");
  EXPECT_EQ(v.text(0), U"\t");
  EXPECT_EQ(v.text(1), U"\n");
  EXPECT_EQ(v.text(2), U"\\");
  EXPECT_EQ(v.text(3), U"é");
  EXPECT_EQ(v.text(4), U"\U0001F600");
}

TEST(LoadVocabulary, ToleratesCrlfAndTrailingBlank) {
  Vocabulary v = load_vocabulary("0\ta\r\n1\tb\r\n");
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.text(1), U"b");
}

TEST(Vocabulary, EogIsNotAToken) {
  Vocabulary v = abc();
  EXPECT_FALSE(v.contains(v.eog_id()));
  EXPECT_THROW(v.text(v.eog_id()), LookupError);
}

TEST(Vocabulary, Alphabet) { EXPECT_EQ(abc().alphabet(), U"ab"); }

TEST(Vocabulary, DistinctUids) { EXPECT_NE(abc().uid(), abc().uid()); }

TEST(Detokenize, Examples) {
  Vocabulary v = abc();
  std::vector<TokenId> seq{2, 1, v.eog_id()};
  EXPECT_EQ(detokenize(v, seq), "abb");
  EXPECT_EQ(detokenize(Vocabulary::from_utf8({"a"}), std::vector<TokenId>{}), "");
  EXPECT_EQ(detokenize(Vocabulary::from_utf8({"a", "b"}), std::vector<TokenId>{0, 0, 1}), "aab");
}

TEST(Detokenize, UnknownIdIsLookupError) {
  EXPECT_THROW(detokenize(abc(), std::vector<TokenId>{7}), LookupError);
  EXPECT_THROW(detokenize(abc(), std::vector<TokenId>{-1}), LookupError);
}

TEST(ValidateSequence, EogOnlyLast) {
  Vocabulary v = abc();
  EXPECT_NO_THROW(validate_sequence(v, std::vector<TokenId>{0, v.eog_id()}));
  EXPECT_THROW(validate_sequence(v, std::vector<TokenId>{v.eog_id(), 0}), ValidationError);
  EXPECT_TRUE(is_finished(v, std::vector<TokenId>{1, v.eog_id()}));
  EXPECT_FALSE(is_finished(v, std::vector<TokenId>{1}));
}

TEST(TokenizeLongestMatch, PrefersLongest) {
  Vocabulary v = abc();
  EXPECT_EQ(tokenize_longest_match(v, "abab"), (TokenSequence{2, 2}));
  EXPECT_EQ(tokenize_longest_match(v, "ba"), (TokenSequence{1, 0}));
  EXPECT_THROW(tokenize_longest_match(v, "c"), LookupError);
}

TEST(TokenTrie, IndexesEveryToken) {
  Vocabulary v = abc();
  const TokenTrie& t = v.trie();
  std::vector<TokenId> seen;
  std::vector<std::int32_t> stack{TokenTrie::kRoot};
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (TokenId id : t.node(n).tokens) seen.push_back(id);
    for (auto [c, child] : t.node(n).children) stack.push_back(child);
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen, (std::vector<TokenId>{0, 1, 2}));
}

TEST(VocabularyProperty, DetokenizeIsHomomorphism) {
  Vocabulary v = Vocabulary::from_utf8({"a", "bc", "\xc3\xa9", "d\te", "ff"});
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> tok(0, 4), len(0, 6);
  for (int trial = 0; trial < 500; ++trial) {
    TokenSequence u(len(rng)), w(len(rng));
    for (auto& t : u) t = tok(rng);
    for (auto& t : w) t = tok(rng);
    TokenSequence uw = u;
    uw.insert(uw.end(), w.begin(), w.end());
    EXPECT_EQ(detokenize(v, uw), detokenize(v, u) + detokenize(v, w));
  }
}

TEST(VocabularyProperty, DocumentRoundTrip) {
  std::mt19937 rng(11);
  const std::u32string pool = U"ab\t\n\\é\U0001F600 x";
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(1, 4), count(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::u32string> texts(count(rng));
    for (auto& t : texts)
      for (std::size_t k = len(rng); k > 0; --k) t.push_back(pool[pick(rng)]);
    Vocabulary v(texts);
    std::string doc = serialize_vocabulary(v);
    Vocabulary back = load_vocabulary(doc);
    EXPECT_TRUE(back == v);
    EXPECT_EQ(serialize_vocabulary(back), doc);
  }
}

}  // namespace
}  // namespace sufcon
