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

#include <cmath>
#include <random>

#include "sufcon/errors.h"
#include "sufcon/logprob.h"
#include "sufcon/provider.h"

namespace sufcon {
namespace {

Vocabulary ab() { return Vocabulary::from_utf8({"a", "b"}); }

TEST(LogProbVector, ValidatesNormalization) {
  EXPECT_NO_THROW(LogProbVector::from_probabilities(std::vector<double>{0.6, 0.3, 0.1}));
  EXPECT_THROW(LogProbVector::from_probabilities(std::vector<double>{0.6, 0.3, 0.2}), ValidationError);
  EXPECT_THROW(LogProbVector(std::vector<double>{kNegInf, kNegInf}), ValidationError);
  EXPECT_THROW(LogProbVector(std::vector<double>{std::nan(""), 0.0}), ValidationError);
  EXPECT_THROW(LogProbVector(std::vector<double>{}), ValidationError);
}

TEST(LogProbVector, NormalizedShiftsScores) {
  LogProbVector v = LogProbVector::normalized({1.0, 1.0, kNegInf});
  EXPECT_DOUBLE_EQ(v[0], std::log(0.5));
  EXPECT_EQ(v[2], kNegInf);
  EXPECT_EQ(v.eog_id(), 2);
}

TEST(LogSumExp, HandlesExtremes) {
  std::vector<double> big{1000.0, 1000.0};
  EXPECT_DOUBLE_EQ(logsumexp(big), 1000.0 + std::log(2.0));
  std::vector<double> none{kNegInf, kNegInf};
  EXPECT_EQ(logsumexp(none), kNegInf);
}

TEST(TableProvider, ReadsRows) {
  auto p = TableProvider::from_probabilities(ab(), {{{}, {0.6, 0.3, 0.1}}});
  LogProbVector d = p->next_dist(TokenSequence{});
  EXPECT_EQ(d[0], std::log(0.6));
  EXPECT_EQ(d[1], std::log(0.3));
  EXPECT_EQ(d[2], std::log(0.1));
}

TEST(TableProvider, MissingPrefixNamesIt) {
  auto p = TableProvider::from_probabilities(ab(), {{{}, {0.6, 0.3, 0.1}}});
  try {
    p->next_dist(TokenSequence{0, 1});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("[0,1]"), std::string::npos) << e.what();
  }
}

TEST(TableProvider, FallbackAnswersUnknownPrefixes) {
  auto p = TableProvider::from_probabilities(ab(), {{{}, {0.6, 0.3, 0.1}}}, std::vector<double>{0.2, 0.2, 0.6});
  EXPECT_EQ(p->next_dist(TokenSequence{1})[2], std::log(0.6));
}

TEST(TableProvider, RejectsBadRows) {
  EXPECT_THROW(TableProvider::from_probabilities(ab(), {{{}, {0.6, 0.3, 0.3}}}), ConfigError);
  EXPECT_THROW(TableProvider::from_probabilities(ab(), {{{}, {0.5, 0.5}}}), ConfigError);
}

TEST(UniformProvider, AllEqual) {
  UniformProvider p(Vocabulary::from_utf8({"a", "b", "c"}));
  LogProbVector d = p.next_dist(TokenSequence{0, 2});
  ASSERT_EQ(d.size(), 4u);
  for (double x : d.values()) EXPECT_DOUBLE_EQ(x, std::log(0.25));
}

TEST(NgramProvider, BigramAbab) {
  NgramProvider p(ab(), {{0, 1, 0, 1}}, {.order = 2, .k = 1.0});
  EXPECT_NEAR(std::exp(p.next_dist(TokenSequence{0})[1]), 3.0 / 5.0, 1e-15);
  NgramProvider q(ab(), {{0, 1, 0, 1}}, {.order = 2, .k = 1.0, .append_eog = false});
  EXPECT_NEAR(std::exp(q.next_dist(TokenSequence{0})[1]), 3.0 / 5.0, 1e-15);
}

TEST(NgramProvider, UnigramCounts) {
  // a,a,b: without a terminal eog the total is 3, with it 4.
  NgramProvider bare(ab(), {{0, 0, 1}}, {.order = 1, .k = 1.0, .append_eog = false});
  EXPECT_NEAR(std::exp(bare.next_dist(TokenSequence{})[0]), 1.0 / 2.0, 1e-15);
  NgramProvider with_eog(ab(), {{0, 0, 1}}, {.order = 1, .k = 1.0});
  EXPECT_NEAR(std::exp(with_eog.next_dist(TokenSequence{})[0]), 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(std::exp(with_eog.next_dist(TokenSequence{})[2]), 2.0 / 7.0, 1e-15);
}

TEST(NgramProvider, IndependentCount) {
  std::mt19937 rng(7);
  Vocabulary v = Vocabulary::from_utf8({"a", "b", "c"});
  std::vector<TokenSequence> corpus;
  for (int i = 0; i < 20; ++i) {
    TokenSequence s;
    for (int j = 0, n = static_cast<int>(rng() % 6); j < n; ++j) s.push_back(static_cast<TokenId>(rng() % 3));
    corpus.push_back(s);
  }
  NgramProvider p(v, corpus, {.order = 3, .k = 0.5});
  // Counts recomputed by scanning every padded sequence for the context.
  auto expected = [&](const TokenSequence& ctx, TokenId next) {
    double hit = 0, total = 0;
    for (TokenSequence s : corpus) {
      s.push_back(3);
      for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t from = i >= ctx.size() ? i - ctx.size() : 0;
        if (i - from != ctx.size()) continue;
        if (!std::equal(ctx.begin(), ctx.end(), s.begin() + static_cast<long>(from))) continue;
        total += 1;
        if (s[i] == next) hit += 1;
      }
    }
    return (hit + 0.5) / (total + 0.5 * 4);
  };
  for (TokenSequence ctx : std::vector<TokenSequence>{{0, 1}, {2, 2}, {1, 0}})
    for (TokenId t = 0; t <= 3; ++t) EXPECT_NEAR(std::exp(p.next_dist(ctx)[t]), expected(ctx, t), 1e-12);
  // A long prefix only uses its last two ids.
  EXPECT_EQ(p.next_dist(TokenSequence{2, 2, 0, 1}).values(), p.next_dist(TokenSequence{1, 0, 1}).values());
}

TEST(NgramProvider, UnseenContextIsUniform) {
  NgramProvider p(ab(), {{0, 0}}, {.order = 2});
  LogProbVector d = p.next_dist(TokenSequence{1});
  for (double x : d.values()) EXPECT_NEAR(x, std::log(1.0 / 3.0), 1e-15);
}

TEST(NgramProvider, LargeKApproachesUniform) {
  double prev = 1.0;
  for (double k : {1.0, 10.0, 100.0, 1e6}) {
    NgramProvider p(ab(), {{0, 0, 0, 1}}, {.order = 1, .k = k});
    double gap = std::abs(std::exp(p.next_dist(TokenSequence{})[0]) - 1.0 / 3.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(NgramProvider, RejectsBadOptions) {
  EXPECT_THROW(NgramProvider(ab(), {}, {.order = 0}), ConfigError);
  EXPECT_THROW(NgramProvider(ab(), {}, {.order = 2, .k = 0.0}), ConfigError);
  EXPECT_THROW(NgramProvider(ab(), {{0, 5}}, {}), ValidationError);
}

TEST(ProviderSession, ForkIsIndependent) {
  auto model = std::make_shared<NgramProvider>(Vocabulary::from_utf8({"a", "b", "c"}),
                                               std::vector<TokenSequence>{{0, 1, 2, 0, 2}});
  ProviderSession base(model, {0});
  LogProbVector before = base.next_dist();
  ProviderSession copy = base.fork();
  ProviderSession b = copy.extend(1);
  ProviderSession c = base.extend(2);
  EXPECT_EQ(base.next_dist(), before);
  EXPECT_EQ(b.prefix(), (TokenSequence{0, 1}));
  EXPECT_EQ(c.prefix(), (TokenSequence{0, 2}));
  EXPECT_EQ(b.next_dist(), model->next_dist(TokenSequence{0, 1}));
}

TEST(ProviderSession, ForksAgree) {
  auto model = std::make_shared<UniformProvider>(ab());
  ProviderSession s(model);
  ProviderSession t = s.fork();
  EXPECT_EQ(s.next_dist(), t.next_dist());
  EXPECT_EQ(s.extend(0).extend(1).next_dist(), t.extend(0).extend(1).next_dist());
}

TEST(ProviderSession, ExtendContract) {
  ProviderSession s(std::make_shared<UniformProvider>(ab()));
  EXPECT_THROW(s.extend(2), ContractError);
  EXPECT_THROW(s.extend(7), LookupError);
  EXPECT_THROW(ProviderSession(std::make_shared<UniformProvider>(ab()), {2}), Error);
}

TEST(ProviderSession, MemoizesDistribution) {
  ProviderSession s(std::make_shared<UniformProvider>(ab()));
  EXPECT_FALSE(s.has_next_dist());
  const LogProbVector& d = s.next_dist();
  EXPECT_TRUE(s.has_next_dist());
  EXPECT_EQ(&d, &s.fork().next_dist());
}

// Incremental sessions must give exactly what a fresh evaluation gives.
TEST(ProviderSession, MatchesFreshEvaluation) {
  std::mt19937 rng(3);
  Vocabulary v = Vocabulary::from_utf8({"a", "b", "c", "d"});
  std::vector<TokenSequence> corpus;
  for (int i = 0; i < 30; ++i) {
    TokenSequence s;
    for (int j = 0; j < 8; ++j) s.push_back(static_cast<TokenId>(rng() % 4));
    corpus.push_back(s);
  }
  for (std::size_t order : {1u, 2u, 4u}) {
    auto model = std::make_shared<NgramProvider>(v, corpus, NgramOptions{.order = order, .k = 0.3});
    for (int trial = 0; trial < 50; ++trial) {
      ProviderSession s(model);
      TokenSequence prefix;
      for (int len = 0; len < 8; ++len) {
        ASSERT_EQ(s.next_dist(), model->next_dist(prefix));
        TokenId t = static_cast<TokenId>(rng() % 4);
        prefix.push_back(t);
        s = s.extend(t);
      }
    }
  }
}

}  // namespace
}  // namespace sufcon
