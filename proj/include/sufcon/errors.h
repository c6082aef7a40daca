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
#include <stdexcept>
#include <string>

namespace sufcon {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document; `line` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed pattern or rule; `position` is a character offset into the source.
class CompileError : public Error {
 public:
  CompileError(const std::string& what, std::size_t position)
      : Error("at position " + std::to_string(position) + ": " + what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EmptyLanguageError : public Error {
 public:
  using Error::Error;
};

// Raised when a character would leave the prefix language.
class PrefixError : public Error {
 public:
  PrefixError(char32_t c, std::size_t consumed);
  char32_t character() const { return character_; }
  std::size_t consumed() const { return consumed_; }

 private:
  char32_t character_;
  std::size_t consumed_;
};

class OracleBoundError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure talking to a model endpoint.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int attempts, bool retryable)
      : Error(what), attempts_(attempts), retryable_(retryable) {}
  int attempts() const { return attempts_; }
  bool retryable() const { return retryable_; }

 private:
  int attempts_;
  bool retryable_;
};

// Response body does not follow the wire protocol; `field` names the culprit.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& field, const std::string& what)
      : Error("protocol error in '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class HandshakeError : public Error {
 public:
  using Error::Error;
};

// A constrained state with no admissible continuation.
class StuckConstraintError : public Error {
 public:
  explicit StuckConstraintError(const std::string& consumed)
      : Error("constraint is stuck after \"" + consumed + "\""), consumed_(consumed) {}
  const std::string& consumed() const { return consumed_; }

 private:
  std::string consumed_;
};

}  // namespace sufcon
