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

#include <string>
#include <utility>
#include <vector>

namespace sufcon {

inline constexpr char32_t kMaxCodePoint = 0x10FFFF;

// A set of code points stored as sorted, disjoint, non-adjacent ranges.
class CharClass {
 public:
  using Range = std::pair<char32_t, char32_t>;

  CharClass() = default;

  static CharClass single(char32_t c) { return range(c, c); }
  static CharClass range(char32_t lo, char32_t hi);
  static CharClass any();
  static CharClass digit();
  static CharClass word();
  static CharClass space();

  void add(char32_t lo, char32_t hi);
  void add(const CharClass& other);
  CharClass complement() const;

  bool contains(char32_t c) const;
  bool empty() const { return ranges_.empty(); }
  const std::vector<Range>& ranges() const { return ranges_; }

  // Bracket-expression rendering, e.g. "[0-9a]".
  std::string to_string() const;

  friend bool operator==(const CharClass&, const CharClass&) = default;
  friend auto operator<=>(const CharClass&, const CharClass&) = default;

 private:
  void normalize();
  std::vector<Range> ranges_;
};

inline bool is_word_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c == U'_';
}

}  // namespace sufcon
