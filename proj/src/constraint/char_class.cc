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

#include "sufcon/char_class.h"

#include <algorithm>
#include <cstdio>

#include "sufcon/utf8.h"

namespace sufcon {

CharClass CharClass::range(char32_t lo, char32_t hi) {
  CharClass cc;
  cc.add(lo, hi);
  return cc;
}

CharClass CharClass::any() { return range(0, kMaxCodePoint); }

CharClass CharClass::digit() { return range(U'0', U'9'); }

CharClass CharClass::word() {
  CharClass cc;
  cc.add(U'0', U'9');
  cc.add(U'A', U'Z');
  cc.add(U'_', U'_');
  cc.add(U'a', U'z');
  return cc;
}

CharClass CharClass::space() {
  CharClass cc;
  cc.add(U'\t', U'\r');
  cc.add(U' ', U' ');
  return cc;
}

void CharClass::add(char32_t lo, char32_t hi) {
  if (lo > hi) std::swap(lo, hi);
  ranges_.emplace_back(lo, hi);
  normalize();
}

void CharClass::add(const CharClass& other) {
  ranges_.insert(ranges_.end(), other.ranges_.begin(), other.ranges_.end());
  normalize();
}

void CharClass::normalize() {
  std::sort(ranges_.begin(), ranges_.end());
  std::vector<Range> merged;
  for (const auto& r : ranges_) {
    if (!merged.empty() && r.first <= merged.back().second + 1) {
      merged.back().second = std::max(merged.back().second, r.second);
    } else {
      merged.push_back(r);
    }
  }
  ranges_ = std::move(merged);
}

CharClass CharClass::complement() const {
  CharClass out;
  char32_t next = 0;
  for (const auto& [lo, hi] : ranges_) {
    if (lo > next) out.ranges_.emplace_back(next, lo - 1);
    next = hi + 1;
  }
  if (next <= kMaxCodePoint) out.ranges_.emplace_back(next, kMaxCodePoint);
  return out;
}

bool CharClass::contains(char32_t c) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), c,
                             [](char32_t v, const Range& r) { return v < r.first; });
  if (it == ranges_.begin()) return false;
  --it;
  return c <= it->second;
}

namespace {

void render(std::string& out, char32_t c) {
  switch (c) {
    case U'\\': case U']': case U'[': case U'-': case U'^': case U'"':
      out.push_back('\\');
      out.push_back(static_cast<char>(c));
      return;
    case U'\n': out += "\\n"; return;
    case U'\t': out += "\\t"; return;
    default: break;
  }
  if (c < 0x20 || c == 0x7F || (c > 0xFFFF)) {
    char buf[16];
    if (c > 0xFFFF) {
      // Encoded as a UTF-16 surrogate pair so the grammar reader can round-trip it.
      char32_t v = c - 0x10000;
      std::snprintf(buf, sizeof(buf), "\\u%04X\\u%04X", static_cast<unsigned>(0xD800 + (v >> 10)),
                    static_cast<unsigned>(0xDC00 + (v & 0x3FF)));
    } else {
      std::snprintf(buf, sizeof(buf), "\\u%04X", static_cast<unsigned>(c));
    }
    out += buf;
    return;
  }
  if (c >= 0xD800 && c <= 0xDFFF) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "\\u%04X", static_cast<unsigned>(c));
    out += buf;
    return;
  }
  utf8::append(out, c);
}

}  // namespace

std::string CharClass::to_string() const {
  std::string out = "[";
  for (const auto& [lo, hi] : ranges_) {
    render(out, lo);
    if (hi != lo) {
      if (hi != lo + 1) out.push_back('-');
      render(out, hi);
    }
  }
  out.push_back(']');
  return out;
}

}  // namespace sufcon
