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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sufcon/char_class.h"
#include "sufcon/grammar.h"

namespace sufcon {

// A context-free grammar preprocessed for incremental Earley recognition.
// Unproductive rules are dropped so that every non-empty chart row witnesses
// a viable prefix.
class EarleyGrammar {
 public:
  // Symbols >= 0 are nonterminal indices; symbol s < 0 is terminal class -s-1.
  using Symbol = std::int32_t;

  struct Rule {
    std::int32_t lhs;
    std::vector<Symbol> rhs;
  };

  explicit EarleyGrammar(const ContextFreeGrammar& g);

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<std::int32_t>& rules_of(std::int32_t nt) const { return by_lhs_[static_cast<std::size_t>(nt)]; }
  const CharClass& terminal(Symbol s) const { return terminals_[static_cast<std::size_t>(-s - 1)]; }
  bool nullable(std::int32_t nt) const { return nullable_[static_cast<std::size_t>(nt)] != 0; }
  std::size_t min_length(std::int32_t nt) const { return min_length_[static_cast<std::size_t>(nt)]; }
  std::size_t num_nonterminals() const { return names_.size(); }
  const std::string& name(std::int32_t nt) const { return names_[static_cast<std::size_t>(nt)]; }

  // Index of the augmented rule `S' -> start`.
  std::int32_t start_rule() const { return start_rule_; }

  // Minimal number of terminals derivable from rhs[dot..] of `rule`.
  std::size_t rest_min_length(std::int32_t rule, std::int32_t dot) const;

 private:
  std::vector<std::string> names_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::int32_t>> by_lhs_;
  std::vector<CharClass> terminals_;
  std::vector<char> nullable_;
  std::vector<std::size_t> min_length_;
  std::int32_t start_rule_ = 0;
};

struct EarleyItem {
  std::int32_t rule;
  std::int32_t dot;
  std::int32_t origin;
};

// One chart row, sealed after construction.
class EarleySet {
 public:
  const std::vector<EarleyItem>& items() const { return items_; }
  const std::vector<std::int32_t>& scannable() const { return scannable_; }
  // Items whose next symbol is `nt`.
  std::vector<std::int32_t> waiting_on(std::int32_t nt) const;
  bool accepting() const { return accepting_; }

 private:
  friend class EarleyChart;
  std::vector<EarleyItem> items_;
  std::vector<std::int32_t> scannable_;
  std::vector<std::pair<std::int32_t, std::int32_t>> waiting_;  // (nt, item), sorted
  bool accepting_ = false;
};

// Persistent chart: advancing returns a new chart sharing all earlier rows.
class EarleyChart : public std::enable_shared_from_this<EarleyChart> {
 public:
  static std::shared_ptr<const EarleyChart> initial(std::shared_ptr<const EarleyGrammar> grammar);

  // nullptr when `c` leaves the prefix language.
  std::shared_ptr<const EarleyChart> advance(char32_t c) const;

  bool accepting() const { return row_.accepting(); }
  std::size_t length() const { return rows_.size() - 1; }
  const EarleySet& row() const { return row_; }
  // Characters that extend the consumed string within the prefix language.
  CharClass expected() const;

  // Fewest terminals that complete the consumed string to a sentence.
  std::size_t min_completion_length() const;

  const EarleyGrammar& grammar() const { return *grammar_; }

 private:
  EarleyChart() = default;
  void build(std::vector<EarleyItem> kernel);

  std::shared_ptr<const EarleyGrammar> grammar_;
  std::shared_ptr<const EarleyChart> parent_;
  std::vector<const EarleySet*> rows_;  // rows_[k] is row k; rows_.back() == &row_
  EarleySet row_;
};

}  // namespace sufcon
