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
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sufcon {

using TokenId = std::int32_t;

// Token ids; the end-of-generation id may only appear as the last element.
using TokenSequence = std::vector<TokenId>;

// Character trie over token texts, used to walk every token from a parser
// state while sharing common prefixes.
class TokenTrie {
 public:
  struct Node {
    std::vector<std::pair<char32_t, std::int32_t>> children;  // sorted by character
    std::vector<TokenId> tokens;                               // tokens ending here
  };

  static constexpr std::int32_t kRoot = 0;

  const Node& node(std::int32_t index) const { return nodes_[index]; }
  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  friend class Vocabulary;
  void insert(std::u32string_view text, TokenId id);
  void finalize();

  std::vector<Node> nodes_{1};
};

// Immutable token alphabet plus the reserved end-of-generation symbol, which
// is assigned the id one past the last token.
class Vocabulary {
 public:
  Vocabulary();
  explicit Vocabulary(std::vector<std::u32string> texts);

  static Vocabulary from_utf8(const std::vector<std::string>& texts);

  std::size_t size() const;
  TokenId eog_id() const { return static_cast<TokenId>(size()); }
  bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < size(); }

  const std::u32string& text(TokenId id) const;
  std::string text_utf8(TokenId id) const;

  const TokenTrie& trie() const;

  // Sorted distinct characters occurring in any token.
  const std::u32string& alphabet() const;

  // Process-unique identity, distinct for every constructed vocabulary.
  std::uint64_t uid() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b);

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Parses the line-oriented `<id>\t<escaped text>` document.
Vocabulary load_vocabulary(std::string_view document);
Vocabulary load_vocabulary_file(const std::filesystem::path& path);

std::string serialize_vocabulary(const Vocabulary& vocab);

std::string escape_token_text(std::u32string_view text);
std::u32string unescape_token_text(std::string_view escaped, std::size_t line = 0);

// Concatenated token texts; the end-of-generation id contributes nothing.
std::string detokenize(const Vocabulary& vocab, std::span<const TokenId> seq);
std::u32string detokenize_chars(const Vocabulary& vocab, std::span<const TokenId> seq);

// Throws ValidationError unless every id is known and the end-of-generation id
// appears at most once, in final position.
void validate_sequence(const Vocabulary& vocab, std::span<const TokenId> seq);

inline bool is_finished(const Vocabulary& vocab, std::span<const TokenId> seq) {
  return !seq.empty() && seq.back() == vocab.eog_id();
}

// Greedy longest-match segmentation of `text`; throws LookupError when some
// character is not covered by any token.
TokenSequence tokenize_longest_match(const Vocabulary& vocab, std::string_view text);

}  // namespace sufcon
