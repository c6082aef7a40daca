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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sufcon/errors.h"
#include "sufcon/utf8.h"

namespace sufcon {

namespace {

std::atomic<std::uint64_t> next_uid{1};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

void TokenTrie::insert(std::u32string_view text, TokenId id) {
  std::int32_t at = kRoot;
  for (char32_t c : text) {
    auto& children = nodes_[at].children;
    auto it = std::find_if(children.begin(), children.end(), [c](const auto& p) { return p.first == c; });
    if (it == children.end()) {
      auto next = static_cast<std::int32_t>(nodes_.size());
      nodes_[at].children.emplace_back(c, next);
      nodes_.emplace_back();
      at = next;
    } else {
      at = it->second;
    }
  }
  nodes_[at].tokens.push_back(id);
}

void TokenTrie::finalize() {
  for (auto& n : nodes_) std::sort(n.children.begin(), n.children.end());
}

struct Vocabulary::Impl {
  std::vector<std::u32string> texts;
  TokenTrie trie;
  std::u32string alphabet;
  std::uint64_t uid = 0;
};

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::u32string>{}) {}

Vocabulary::Vocabulary(std::vector<std::u32string> texts) {
  auto impl = std::make_shared<Impl>();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw ValidationError("token " + std::to_string(i) + " has empty text");
    impl->trie.insert(texts[i], static_cast<TokenId>(i));
    impl->alphabet += texts[i];
  }
  impl->trie.finalize();
  std::sort(impl->alphabet.begin(), impl->alphabet.end());
  impl->alphabet.erase(std::unique(impl->alphabet.begin(), impl->alphabet.end()), impl->alphabet.end());
  impl->texts = std::move(texts);
  impl->uid = next_uid.fetch_add(1);
  impl_ = std::move(impl);
}

Vocabulary Vocabulary::from_utf8(const std::vector<std::string>& texts) {
  std::vector<std::u32string> decoded;
  decoded.reserve(texts.size());
  for (const auto& t : texts) decoded.push_back(utf8::decode(t));
  return Vocabulary(std::move(decoded));
}

std::size_t Vocabulary::size() const { return impl_->texts.size(); }

const std::u32string& Vocabulary::text(TokenId id) const {
  if (!contains(id)) throw LookupError("unknown token id " + std::to_string(id));
  return impl_->texts[static_cast<std::size_t>(id)];
}

std::string Vocabulary::text_utf8(TokenId id) const { return utf8::encode(text(id)); }

const TokenTrie& Vocabulary::trie() const { return impl_->trie; }

const std::u32string& Vocabulary::alphabet() const { return impl_->alphabet; }

std::uint64_t Vocabulary::uid() const { return impl_->uid; }

bool operator==(const Vocabulary& a, const Vocabulary& b) {
  return a.impl_ == b.impl_ || a.impl_->texts == b.impl_->texts;
}

std::u32string unescape_token_text(std::string_view escaped, std::size_t line) {
  std::string raw;
  std::u32string out;
  auto flush = [&] {
    if (raw.empty()) return;
    try {
      out += utf8::decode(raw);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line);
    }
    raw.clear();
  };
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\') {
      raw.push_back(c);
      continue;
    }
    flush();
    if (++i >= escaped.size()) throw ParseError("dangling backslash", line);
    switch (escaped[i]) {
      case 't': out.push_back(U'\t'); break;
      case 'n': out.push_back(U'\n'); break;
      case '\\': out.push_back(U'\\'); break;
      case 'u': {
        auto read4 = [&](std::size_t at) {
          if (at + 4 > escaped.size()) throw ParseError("truncated \\u escape", line);
          char32_t v = 0;
          for (std::size_t k = 0; k < 4; ++k) {
            int h = hex_value(escaped[at + k]);
            if (h < 0) throw ParseError("bad hex digit in \\u escape", line);
            v = (v << 4) | static_cast<char32_t>(h);
          }
          return v;
        };
        char32_t v = read4(i + 1);
        i += 4;
        if (v >= 0xD800 && v <= 0xDBFF) {
          if (i + 2 >= escaped.size() || escaped[i + 1] != '\\' || escaped[i + 2] != 'u') {
            throw ParseError("unpaired surrogate in \\u escape", line);
          }
          char32_t lo = read4(i + 3);
          if (lo < 0xDC00 || lo > 0xDFFF) throw ParseError("unpaired surrogate in \\u escape", line);
          v = 0x10000 + ((v - 0xD800) << 10) + (lo - 0xDC00);
          i += 6;
        } else if (v >= 0xDC00 && v <= 0xDFFF) {
          throw ParseError("unpaired surrogate in \\u escape", line);
        }
        out.push_back(v);
        break;
      }
      default:
        throw ParseError(std::string("unknown escape \\") + escaped[i], line);
    }
  }
  flush();
  return out;
}

std::string escape_token_text(std::u32string_view text) {
  std::string out;
  for (char32_t c : text) {
    if (c == U'\t') {
      out += "\\t";
    } else if (c == U'\n') {
      out += "\\n";
    } else if (c == U'\\') {
      out += "\\\\";
    } else if (c < 0x20 || c == 0x7F) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\u%04X", static_cast<unsigned>(c));
      out += buf;
    } else {
      utf8::append(out, c);
    }
  }
  return out;
}

Vocabulary load_vocabulary(std::string_view document) {
  std::vector<std::u32string> texts;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < document.size()) {
    std::size_t end = document.find('\n', pos);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected <id><TAB><text>", line_no);
    std::int64_t id = -1;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, id);
    if (ec != std::errc() || ptr != line.data() + tab || tab == 0) {
      throw ParseError("malformed token id '" + std::string(line.substr(0, tab)) + "'", line_no);
    }
    auto expected = static_cast<std::int64_t>(texts.size());
    if (id < expected) throw ValidationError("line " + std::to_string(line_no) + ": duplicate or out-of-order id " + std::to_string(id));
    if (id > expected) throw ValidationError("line " + std::to_string(line_no) + ": ids must be dense, expected " + std::to_string(expected) + " got " + std::to_string(id));
    auto text = unescape_token_text(line.substr(tab + 1), line_no);
    if (text.empty()) throw ValidationError("line " + std::to_string(line_no) + ": token text is empty");
    texts.push_back(std::move(text));
  }
  return Vocabulary(std::move(texts));
}

Vocabulary load_vocabulary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_vocabulary(ss.str());
}

std::string serialize_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += std::to_string(i);
    out.push_back('\t');
    out += escape_token_text(vocab.text(static_cast<TokenId>(i)));
    out.push_back('\n');
  }
  return out;
}

std::u32string detokenize_chars(const Vocabulary& vocab, std::span<const TokenId> seq) {
  std::u32string out;
  for (TokenId id : seq) {
    if (id == vocab.eog_id()) continue;
    out += vocab.text(id);
  }
  return out;
}

std::string detokenize(const Vocabulary& vocab, std::span<const TokenId> seq) {
  return utf8::encode(detokenize_chars(vocab, seq));
}

void validate_sequence(const Vocabulary& vocab, std::span<const TokenId> seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == vocab.eog_id()) {
      if (i + 1 != seq.size()) throw ValidationError("end-of-generation id before the end of the sequence");
    } else if (!vocab.contains(seq[i])) {
      throw ValidationError("unknown token id " + std::to_string(seq[i]));
    }
  }
}

TokenSequence tokenize_longest_match(const Vocabulary& vocab, std::string_view text) {
  auto chars = utf8::decode(text);
  const auto& trie = vocab.trie();
  TokenSequence out;
  std::size_t i = 0;
  while (i < chars.size()) {
    std::int32_t at = TokenTrie::kRoot;
    TokenId best = -1;
    std::size_t best_len = 0;
    for (std::size_t j = i; j < chars.size(); ++j) {
      const auto& children = trie.node(at).children;
      auto it = std::lower_bound(children.begin(), children.end(), std::make_pair(chars[j], std::int32_t{-1}));
      if (it == children.end() || it->first != chars[j]) break;
      at = it->second;
      if (!trie.node(at).tokens.empty()) {
        best = trie.node(at).tokens.front();
        best_len = j - i + 1;
      }
    }
    if (best < 0) throw LookupError("no token covers character " + utf8::describe(chars[i]));
    out.push_back(best);
    i += best_len;
  }
  return out;
}

}  // namespace sufcon
