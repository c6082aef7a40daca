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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sufcon/decode.h"

namespace sufcon {

// Trace file: `#` header lines followed by tab-separated records with the
// columns step, hyp, token, logprob, best_logprob, penalty, event, mask_size.
// Absent values are written as `-`; doubles round-trip exactly.
struct TraceHeader {
  Algorithm algorithm = Algorithm::kGreedy;
  DecodeConfig config;
  TokenSequence prompt;
};

struct TraceFile {
  TraceHeader header;
  std::vector<TraceRecord> records;
};

std::string format_trace(const TraceHeader& header, const std::vector<TraceRecord>& records);
TraceFile parse_trace(std::string_view text);
void write_trace(const std::filesystem::path& path, const TraceHeader& header, const std::vector<TraceRecord>& records);
TraceFile read_trace(const std::filesystem::path& path);

struct ReplayOutcome {
  int track = kGreedyTrack;
  TokenSequence tokens;
  bool finished = false;
  std::optional<std::size_t> bifurcation_pos;
  double score = 0.0;
  std::optional<double> penalty;
  std::size_t steps = 0;
};

// Rebuilds every track from the records and returns the one named by the
// final terminate record. Throws ParseError when the trace is inconsistent.
ReplayOutcome replay_trace(const std::vector<TraceRecord>& records, TokenId eog);

// Re-queries `model` along every track and checks each recorded log-prob and
// each choice against the mask in force. Returns one message per mismatch.
std::vector<std::string> verify_trace(const TraceFile& trace, const std::shared_ptr<const LanguageModel>& model,
                                      const ConstraintAutomaton& automaton);

}  // namespace sufcon
