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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sufcon {

struct RegexOptions {
  // Largest count allowed in a bounded repetition `{n,m}`.
  std::size_t repetition_cap = 256;
  // Hard limit on DFA states during subset construction.
  std::size_t max_states = 200000;
};

// Deterministic automaton over code points. Every state is live: some string
// leads from it to an accepting state.
struct Dfa {
  struct Transition {
    char32_t lo;
    char32_t hi;
    std::int32_t target;
  };

  static constexpr std::int32_t kNoState = -1;

  std::vector<std::vector<Transition>> transitions;  // per state, sorted by lo
  std::vector<char> accepting;
  std::int32_t start = 0;

  std::size_t num_states() const { return accepting.size(); }
  std::int32_t step(std::int32_t state, char32_t c) const;
  bool is_accepting(std::int32_t state) const { return accepting[static_cast<std::size_t>(state)] != 0; }
};

// Compiles a pattern anchored at both ends. Throws CompileError on malformed
// patterns and EmptyLanguageError when nothing is accepted.
Dfa compile_regex(std::string_view pattern, const RegexOptions& options = {});

}  // namespace sufcon
