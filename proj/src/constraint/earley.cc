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

#include "sufcon/earley.h"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_set>

#include "sufcon/errors.h"

namespace sufcon {

namespace {

constexpr std::size_t kInfinity = std::numeric_limits<std::size_t>::max() / 4;

std::uint64_t pack(const EarleyItem& it) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.rule)) << 40) ^
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.dot)) << 28) ^
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.origin));
}

}  // namespace

EarleyGrammar::EarleyGrammar(const ContextFreeGrammar& g) {
  validate(g);
  std::map<std::string, std::int32_t> ids;
  // Index 0 is the augmented start symbol.
  names_.push_back(g.start + "'");
  while (ids.count(names_[0]) || g.has_nonterminal(names_[0])) names_[0] += "'";
  for (const auto& name : g.nonterminals()) {
    ids.emplace(name, static_cast<std::int32_t>(names_.size()));
    names_.push_back(name);
  }
  std::map<CharClass, std::int32_t> term_ids;
  std::vector<Rule> all;
  for (const auto& r : g.rules) {
    Rule rule{ids.at(r.lhs), {}};
    for (const auto& s : r.rhs) {
      if (s.terminal) {
        auto [it, inserted] = term_ids.emplace(s.chars, static_cast<std::int32_t>(terminals_.size()));
        if (inserted) terminals_.push_back(s.chars);
        rule.rhs.push_back(-it->second - 1);
      } else {
        rule.rhs.push_back(ids.at(s.nonterminal));
      }
    }
    all.push_back(std::move(rule));
  }
  all.push_back(Rule{0, {ids.at(g.start)}});

  // Productive nonterminals and their minimal yield length.
  std::size_t n = names_.size();
  min_length_.assign(n, kInfinity);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : all) {
      std::size_t len = 0;
      for (Symbol s : r.rhs) {
        len += s < 0 ? 1 : min_length_[static_cast<std::size_t>(s)];
        if (len >= kInfinity) break;
      }
      if (len < min_length_[static_cast<std::size_t>(r.lhs)]) {
        min_length_[static_cast<std::size_t>(r.lhs)] = len;
        changed = true;
      }
    }
  }
  if (min_length_[0] >= kInfinity) throw EmptyLanguageError("grammar for '" + g.start + "' derives no string");
  for (auto& r : all) {
    bool productive = std::all_of(r.rhs.begin(), r.rhs.end(),
                                  [&](Symbol s) { return s < 0 || min_length_[static_cast<std::size_t>(s)] < kInfinity; });
    if (productive) rules_.push_back(std::move(r));
  }
  by_lhs_.assign(n, {});
  nullable_.assign(n, 0);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    by_lhs_[static_cast<std::size_t>(rules_[i].lhs)].push_back(static_cast<std::int32_t>(i));
    if (rules_[i].lhs == 0) start_rule_ = static_cast<std::int32_t>(i);
  }
  for (std::size_t i = 0; i < n; ++i) nullable_[i] = min_length_[i] == 0;
}

std::size_t EarleyGrammar::rest_min_length(std::int32_t rule, std::int32_t dot) const {
  std::size_t len = 0;
  const auto& rhs = rules_[static_cast<std::size_t>(rule)].rhs;
  for (std::size_t k = static_cast<std::size_t>(dot); k < rhs.size(); ++k) {
    len += rhs[k] < 0 ? 1 : min_length_[static_cast<std::size_t>(rhs[k])];
  }
  return len;
}

std::vector<std::int32_t> EarleySet::waiting_on(std::int32_t nt) const {
  std::vector<std::int32_t> out;
  auto lo = std::lower_bound(waiting_.begin(), waiting_.end(), std::make_pair(nt, std::int32_t{-1}));
  for (auto it = lo; it != waiting_.end() && it->first == nt; ++it) out.push_back(it->second);
  return out;
}

std::shared_ptr<const EarleyChart> EarleyChart::initial(std::shared_ptr<const EarleyGrammar> grammar) {
  std::shared_ptr<EarleyChart> chart(new EarleyChart());
  EarleyItem seed{grammar->start_rule(), 0, 0};
  chart->grammar_ = std::move(grammar);
  chart->build({seed});
  return chart;
}

void EarleyChart::build(std::vector<EarleyItem> kernel) {
  rows_.push_back(&row_);
  const auto j = static_cast<std::int32_t>(rows_.size()) - 1;
  const EarleyGrammar& g = *grammar_;
  auto& items = row_.items_;
  std::unordered_set<std::uint64_t> seen;
  std::vector<char> predicted(g.num_nonterminals(), 0);
  auto add = [&](EarleyItem it) {
    if (seen.insert(pack(it)).second) items.push_back(it);
  };
  for (const auto& it : kernel) add(it);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const EarleyItem it = items[i];
    const auto& rule = g.rules()[static_cast<std::size_t>(it.rule)];
    if (static_cast<std::size_t>(it.dot) < rule.rhs.size()) {
      auto sym = rule.rhs[static_cast<std::size_t>(it.dot)];
      if (sym < 0) {
        row_.scannable_.push_back(static_cast<std::int32_t>(i));
        continue;
      }
      row_.waiting_.emplace_back(sym, static_cast<std::int32_t>(i));
      if (!predicted[static_cast<std::size_t>(sym)]) {
        predicted[static_cast<std::size_t>(sym)] = 1;
        for (auto r : g.rules_of(sym)) add({r, 0, j});
      }
      // Aycock-Horspool: a nullable nonterminal may be skipped immediately.
      if (g.nullable(sym)) add({it.rule, it.dot + 1, it.origin});
    } else if (it.origin < j) {
      const EarleySet& origin = *rows_[static_cast<std::size_t>(it.origin)];
      for (auto w : origin.waiting_on(rule.lhs)) {
        const auto& parent = origin.items_[static_cast<std::size_t>(w)];
        add({parent.rule, parent.dot + 1, parent.origin});
      }
    }
    if (it.rule == g.start_rule() && it.origin == 0 &&
        static_cast<std::size_t>(it.dot) == rule.rhs.size()) {
      row_.accepting_ = true;
    }
  }
  std::sort(row_.waiting_.begin(), row_.waiting_.end());
}

std::shared_ptr<const EarleyChart> EarleyChart::advance(char32_t c) const {
  const EarleyGrammar& g = *grammar_;
  std::vector<EarleyItem> kernel;
  for (auto idx : row_.scannable_) {
    const auto& it = row_.items_[static_cast<std::size_t>(idx)];
    auto sym = g.rules()[static_cast<std::size_t>(it.rule)].rhs[static_cast<std::size_t>(it.dot)];
    if (g.terminal(sym).contains(c)) kernel.push_back({it.rule, it.dot + 1, it.origin});
  }
  if (kernel.empty()) return nullptr;
  std::shared_ptr<EarleyChart> next(new EarleyChart());
  next->grammar_ = grammar_;
  next->parent_ = shared_from_this();
  next->rows_ = rows_;
  next->build(std::move(kernel));
  return next;
}

CharClass EarleyChart::expected() const {
  const EarleyGrammar& g = *grammar_;
  CharClass cc;
  for (auto idx : row_.scannable_) {
    const auto& it = row_.items_[static_cast<std::size_t>(idx)];
    cc.add(g.terminal(g.rules()[static_cast<std::size_t>(it.rule)].rhs[static_cast<std::size_t>(it.dot)]));
  }
  return cc;
}

std::size_t EarleyChart::min_completion_length() const {
  const EarleyGrammar& g = *grammar_;
  // up[k][A]: fewest terminals needed after a completed A that started at row k.
  std::vector<std::vector<std::size_t>> up(rows_.size());
  auto item_cost = [&](const EarleyItem& it, std::int32_t dot) -> std::size_t {
    std::size_t rest = g.rest_min_length(it.rule, dot);
    if (it.rule == g.start_rule()) return rest;
    const auto lhs = static_cast<std::size_t>(g.rules()[static_cast<std::size_t>(it.rule)].lhs);
    std::size_t above = up[static_cast<std::size_t>(it.origin)][lhs];
    return above >= kInfinity ? kInfinity : rest + above;
  };
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    up[k].assign(g.num_nonterminals(), kInfinity);
    const EarleySet& row = *rows_[k];
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& it : row.items()) {
        const auto& rhs = g.rules()[static_cast<std::size_t>(it.rule)].rhs;
        if (static_cast<std::size_t>(it.dot) >= rhs.size()) continue;
        auto sym = rhs[static_cast<std::size_t>(it.dot)];
        if (sym < 0) continue;
        std::size_t cost = item_cost(it, it.dot + 1);
        if (cost < up[k][static_cast<std::size_t>(sym)]) {
          up[k][static_cast<std::size_t>(sym)] = cost;
          changed = true;
        }
      }
    }
  }
  std::size_t best = kInfinity;
  for (const auto& it : row_.items()) best = std::min(best, item_cost(it, it.dot));
  return best;
}

}  // namespace sufcon
