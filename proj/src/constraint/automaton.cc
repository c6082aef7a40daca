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

#include "sufcon/automaton.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "sufcon/errors.h"

namespace sufcon {

namespace {

// Token transitions out of one DFA state.
struct StateTokens {
  std::vector<TokenId> allowed;
  std::vector<std::int32_t> targets;
};

struct DfaTokenTable {
  std::shared_mutex mutex;
  std::vector<std::shared_ptr<const StateTokens>> states;
  std::shared_ptr<const std::vector<std::size_t>> distances;
};

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kMaxCachedVocabularies = 32;

}  // namespace

struct ConstraintAutomaton::Impl {
  GrammarSpec spec;
  std::optional<Dfa> dfa;
  std::shared_ptr<const EarleyGrammar> earley;

  mutable std::mutex tables_mutex;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<DfaTokenTable>> tables;

  std::shared_ptr<DfaTokenTable> table_for(const Vocabulary& vocab) const {
    std::lock_guard lock(tables_mutex);
    auto it = tables.find(vocab.uid());
    if (it != tables.end()) return it->second;
    if (tables.size() >= kMaxCachedVocabularies) tables.clear();
    auto table = std::make_shared<DfaTokenTable>();
    table->states.resize(dfa->num_states());
    tables.emplace(vocab.uid(), table);
    return table;
  }

  std::shared_ptr<const StateTokens> state_tokens(DfaTokenTable& table, std::int32_t state, const Vocabulary& vocab) const {
    {
      std::shared_lock lock(table.mutex);
      if (auto cached = table.states[static_cast<std::size_t>(state)]) return cached;
    }
    auto computed = std::make_shared<StateTokens>();
    const auto& trie = vocab.trie();
    std::vector<std::pair<std::int32_t, std::int32_t>> stack{{TokenTrie::kRoot, state}};
    std::vector<std::pair<TokenId, std::int32_t>> found;
    while (!stack.empty()) {
      auto [node, s] = stack.back();
      stack.pop_back();
      const auto& n = trie.node(node);
      if (node != TokenTrie::kRoot)
        for (TokenId t : n.tokens) found.emplace_back(t, s);
      for (const auto& [c, child] : n.children) {
        auto next = dfa->step(s, c);
        if (next != Dfa::kNoState) stack.emplace_back(child, next);
      }
    }
    std::sort(found.begin(), found.end());
    for (const auto& [t, s] : found) {
      computed->allowed.push_back(t);
      computed->targets.push_back(s);
    }
    std::unique_lock lock(table.mutex);
    table.states[static_cast<std::size_t>(state)] = computed;
    return computed;
  }

  std::shared_ptr<const std::vector<std::size_t>> distances(DfaTokenTable& table, const Vocabulary& vocab) const {
    {
      std::shared_lock lock(table.mutex);
      if (table.distances) return table.distances;
    }
    std::size_t n = dfa->num_states();
    std::vector<std::vector<std::int32_t>> reverse(n);
    for (std::size_t s = 0; s < n; ++s) {
      auto st = state_tokens(table, static_cast<std::int32_t>(s), vocab);
      for (auto t : st->targets) reverse[static_cast<std::size_t>(t)].push_back(static_cast<std::int32_t>(s));
    }
    auto dist = std::make_shared<std::vector<std::size_t>>(n, kUnreachable);
    std::deque<std::int32_t> queue;
    for (std::size_t s = 0; s < n; ++s)
      if (dfa->is_accepting(static_cast<std::int32_t>(s))) {
        (*dist)[s] = 0;
        queue.push_back(static_cast<std::int32_t>(s));
      }
    while (!queue.empty()) {
      auto s = queue.front();
      queue.pop_front();
      for (auto p : reverse[static_cast<std::size_t>(s)]) {
        if ((*dist)[static_cast<std::size_t>(p)] != kUnreachable) continue;
        (*dist)[static_cast<std::size_t>(p)] = (*dist)[static_cast<std::size_t>(s)] + 1;
        queue.push_back(p);
      }
    }
    std::unique_lock lock(table.mutex);
    table.distances = dist;
    return dist;
  }
};

ConstraintAutomaton ConstraintAutomaton::compile(const GrammarSpec& spec, const CompileOptions& options) {
  auto impl = std::make_shared<Impl>();
  impl->spec = spec;
  if (spec.kind == GrammarKind::kRegular) {
    impl->dfa = compile_regex(spec.pattern, options.regex);
  } else {
    impl->earley = std::make_shared<const EarleyGrammar>(spec.cfg);
  }
  ConstraintAutomaton a;
  a.impl_ = std::move(impl);
  return a;
}

GrammarKind ConstraintAutomaton::kind() const { return impl_->spec.kind; }
const GrammarSpec& ConstraintAutomaton::spec() const { return impl_->spec; }
const Dfa* ConstraintAutomaton::dfa() const { return impl_->dfa ? &*impl_->dfa : nullptr; }
const std::shared_ptr<const EarleyGrammar>& ConstraintAutomaton::earley() const { return impl_->earley; }

bool TokenMask::contains(TokenId id) const { return std::binary_search(allowed.begin(), allowed.end(), id); }

Cursor initial_cursor(const ConstraintAutomaton& automaton) {
  Cursor c;
  c.automaton_ = automaton;
  if (const Dfa* dfa = automaton.dfa()) {
    c.state_ = dfa->start;
  } else {
    c.chart_ = EarleyChart::initial(automaton.earley());
  }
  return c;
}

std::optional<Cursor> try_step_char(const Cursor& cursor, char32_t ch) {
  Cursor next = cursor;
  if (const Dfa* dfa = cursor.automaton().dfa()) {
    next.state_ = dfa->step(cursor.state_, ch);
    if (next.state_ == Dfa::kNoState) return std::nullopt;
  } else {
    next.chart_ = cursor.chart_->advance(ch);
    if (!next.chart_) return std::nullopt;
  }
  ++next.consumed_;
  return next;
}

Cursor step_char(const Cursor& cursor, char32_t c) {
  auto next = try_step_char(cursor, c);
  if (!next) throw PrefixError(c, cursor.consumed());
  return *std::move(next);
}

std::optional<Cursor> try_step_text(const Cursor& cursor, std::u32string_view text) {
  std::optional<Cursor> at = cursor;
  for (char32_t c : text) {
    at = try_step_char(*at, c);
    if (!at) return std::nullopt;
  }
  return at;
}

bool is_accepting(const Cursor& cursor) {
  if (const Dfa* dfa = cursor.automaton().dfa()) return dfa->is_accepting(cursor.dfa_state());
  return cursor.chart()->accepting();
}

CharClass live_continuations(const Cursor& cursor) {
  if (const Dfa* dfa = cursor.automaton().dfa()) {
    CharClass cc;
    for (const auto& t : dfa->transitions[static_cast<std::size_t>(cursor.dfa_state())]) cc.add(t.lo, t.hi);
    return cc;
  }
  return cursor.chart()->expected();
}

TokenMask allowed_tokens(const Cursor& cursor, const Vocabulary& vocab) {
  TokenMask mask;
  mask.allow_eog = is_accepting(cursor);
  const auto& impl = cursor.automaton().impl();
  if (impl.dfa) {
    auto table = impl.table_for(vocab);
    mask.allowed = impl.state_tokens(*table, cursor.dfa_state(), vocab)->allowed;
    return mask;
  }
  const auto& trie = vocab.trie();
  std::vector<std::pair<std::int32_t, std::shared_ptr<const EarleyChart>>> stack{{TokenTrie::kRoot, cursor.chart()}};
  while (!stack.empty()) {
    auto [node, chart] = std::move(stack.back());
    stack.pop_back();
    const auto& n = trie.node(node);
    if (node != TokenTrie::kRoot) mask.allowed.insert(mask.allowed.end(), n.tokens.begin(), n.tokens.end());
    auto expected = chart->expected();
    for (const auto& [c, child] : n.children) {
      if (!expected.contains(c)) continue;
      if (auto next = chart->advance(c)) stack.emplace_back(child, std::move(next));
    }
  }
  std::sort(mask.allowed.begin(), mask.allowed.end());
  return mask;
}

Cursor step_token(const Cursor& cursor, TokenId token, const Vocabulary& vocab) {
  const auto& text = vocab.text(token);
  Cursor at = cursor;
  for (char32_t c : text) at = step_char(at, c);
  return at;
}

std::optional<std::size_t> tokens_to_accept(const Cursor& cursor, const Vocabulary& vocab) {
  const auto& impl = cursor.automaton().impl();
  if (impl.dfa) {
    auto table = impl.table_for(vocab);
    auto dist = impl.distances(*table, vocab);
    auto d = (*dist)[static_cast<std::size_t>(cursor.dfa_state())];
    if (d == kUnreachable) return std::nullopt;
    return d;
  }
  auto d = cursor.chart()->min_completion_length();
  if (d >= std::numeric_limits<std::size_t>::max() / 4) return std::nullopt;
  return d;
}

std::set<std::u32string> enumerate_prefixes(const ConstraintAutomaton& automaton, std::u32string_view alphabet,
                                            std::size_t max_len, std::size_t bound) {
  if (max_len > bound) {
    throw OracleBoundError("enumeration length " + std::to_string(max_len) + " exceeds oracle bound " +
                           std::to_string(bound));
  }
  std::u32string chars(alphabet);
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  std::set<std::u32string> out;
  std::vector<std::pair<std::u32string, Cursor>> stack{{U"", initial_cursor(automaton)}};
  while (!stack.empty()) {
    auto [text, cursor] = std::move(stack.back());
    stack.pop_back();
    if (text.size() < max_len) {
      for (char32_t c : chars)
        if (auto next = try_step_char(cursor, c)) stack.emplace_back(text + c, *std::move(next));
    }
    out.insert(std::move(text));
  }
  return out;
}

}  // namespace sufcon
