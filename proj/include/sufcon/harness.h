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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sufcon/decode.h"
#include "sufcon/grammar.h"
#include "sufcon/provider.h"
#include "sufcon/trace.h"

namespace sufcon {

// One line of a task file:
//   {"id": "q1", "prompt": "2+2?", "prompt_ids": [4, 7], "gold": "4"}
// `id` and `gold` are required strings; at least one of `prompt` and
// `prompt_ids` must be present. Other keys are ignored.
struct Task {
  std::string id;
  std::string prompt_text;
  std::optional<TokenSequence> prompt_ids;
  std::string gold;
};

// Blank lines are skipped. Malformed lines and duplicate ids raise ParseError
// with the 1-based line number.
std::vector<Task> parse_tasks(std::string_view text);
std::vector<Task> load_tasks(const std::filesystem::path& path);

// An answer format from which both the constraint grammar and the extraction
// pattern are generated, so the two cannot drift apart.
struct AnswerTemplate {
  enum class Shape { kPattern, kBalancedBraces };

  std::string name;
  std::string lead;  // literal text before the answer
  Shape shape = Shape::kPattern;
  // kPattern: regular sub-pattern of the answer. kBalancedBraces: literal
  // command that opens the braced answer, e.g. "\boxed".
  std::string body;

  GrammarSpec grammar() const;
  // Capture group 1 holds the answer.
  std::string extraction_pattern() const;
};

// integer, mcq and boxed.
const std::vector<AnswerTemplate>& shipped_templates();
// Throws ConfigError for unknown names.
const AnswerTemplate& find_template(const std::string& name);

// Backslash-escapes regex metacharacters.
std::string regex_escape(std::string_view literal);

// Compiled extraction pattern (ECMAScript syntax plus `(?N)` recursion).
class AnswerExtractor {
 public:
  // Throws ConfigError when the pattern does not compile.
  explicit AnswerExtractor(const std::string& pattern);

  // Capture group 1 (or the whole match) of the last non-overlapping match.
  std::optional<std::string> extract(std::string_view text) const;
  const std::string& pattern() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

std::optional<std::string> extract_answer(std::string_view text, const std::string& pattern);

// True iff `extracted` is present and equals `gold` once surrounding
// whitespace is trimmed from both.
bool score(const std::optional<std::string>& extracted, std::string_view gold);

struct ProviderSpec {
  enum class Kind { kRemote, kNgram, kTable, kUniform };

  Kind kind = Kind::kUniform;
  std::string endpoint;
  std::size_t timeout_ms = 30000;
  int max_retries = 2;
  std::filesystem::path vocab;   // mocks
  std::filesystem::path corpus;  // ngram: one text per line
  std::size_t ngram_order = 3;
  double ngram_k = 0.1;
  std::filesystem::path table;  // table: JSONL rows {"prefix": [...], "probs": [...]}
};

std::string to_string(ProviderSpec::Kind kind);

struct RunConfig {
  Algorithm algorithm = Algorithm::kBifurcation;
  DecodeConfig decode;
  std::string template_name;  // empty when grammar_file and extraction are given
  std::filesystem::path grammar_file;
  GrammarSpec grammar;
  std::string extraction;
  std::string prompt_template = "{question}";
  ProviderSpec provider;
  std::size_t parallelism = 1;
  bool write_traces = false;
  std::filesystem::path out_dir;

  // Throws ConfigError unless the decode options are valid, the prompt
  // template has a {question} placeholder, the extraction pattern compiles
  // and the grammar compiles.
  void validate() const;
};

// `key = value` lines; '#' starts a comment line. Values may use \n, \t and
// \\ escapes. Keys:
//   algorithm, budget, completion_allowance, penalty_space, selection,
//   template | (grammar, extraction), prompt_template,
//   provider (remote | ngram | table | uniform), endpoint, timeout_ms,
//   max_retries, vocab, corpus, ngram_order, ngram_k, table,
//   parallelism, traces, out.
// Relative paths resolve against `base_dir`. Throws ConfigError; messages
// carry the line number.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Throws ConfigError for unreadable mock inputs; remote providers perform the
// handshake here.
std::shared_ptr<const LanguageModel> make_provider(const ProviderSpec& spec);

// Task prompt ids when present, otherwise the rendered template tokenized by
// longest match.
TokenSequence build_prompt(const RunConfig& cfg, const Vocabulary& vocab, const Task& task);
std::string render_prompt(const std::string& prompt_template, const std::string& question);

struct ReportRow {
  std::string id;
  std::string output;  // generated text, eog excluded
  std::optional<std::string> extracted;
  std::string gold;
  bool correct = false;
  bool finished = false;
  std::size_t steps = 0;
  std::size_t length = 0;  // generated tokens, eog excluded
  std::optional<std::size_t> bifurcation_pos;
  std::optional<std::string> error;
  std::optional<TraceFile> trace;  // not part of the serialized row

  friend bool operator==(const ReportRow& a, const ReportRow& b);
};

struct ReportSummary {
  std::size_t tasks = 0;
  std::size_t correct = 0;
  std::size_t extracted = 0;
  std::size_t finished = 0;
  std::size_t errors = 0;
  // Undefined (nullopt) when nothing is averaged.
  std::optional<double> accuracy;       // percent
  std::optional<double> prop_finished;  // percent
  std::optional<double> mean_length;
  std::optional<double> mean_bifurcation_pos;
};

struct Report {
  Algorithm algorithm = Algorithm::kGreedy;
  std::vector<ReportRow> rows;

  ReportSummary summary() const;
};

// Builds one row from a decoded token sequence.
ReportRow make_row(const Task& task, const Vocabulary& vocab, const AnswerExtractor& extractor,
                   const TokenSequence& tokens, bool finished, std::size_t steps,
                   std::optional<std::size_t> bifurcation_pos);

// Rows in task order; `parallelism` tasks decode at once. Per-task errors are
// recorded in the row and scored false.
Report run_experiment(const RunConfig& cfg, const std::shared_ptr<const LanguageModel>& model,
                      const std::vector<Task>& tasks);
Report run_experiment(const RunConfig& cfg, const std::vector<Task>& tasks);

// Rebuilds a report from stored traces, one per task in order. A missing
// trace yields an error row.
Report replay_report(const RunConfig& cfg, const Vocabulary& vocab, const std::vector<Task>& tasks,
                     const std::vector<std::optional<TraceFile>>& traces);

// report.jsonl, one row per line:
//   {"id", "output", "extracted", "gold", "correct", "finished", "steps",
//    "length", "bifurcation_pos", "error"}
// with null for absent values.
std::string format_report_rows(const Report& report);
std::string format_summary_json(const Report& report);
std::string format_summary_table(const Report& report);

// Writes report.jsonl, summary.json and summary.txt, plus
// traces/<index>.tsv (index is the 0-based task position, zero-padded to six
// digits) for rows that carry a trace when `with_traces` is set.
void write_report(const Report& report, const std::filesystem::path& dir, bool with_traces = true);
std::filesystem::path trace_path(const std::filesystem::path& dir, std::size_t index);
std::vector<std::optional<TraceFile>> load_traces(const std::filesystem::path& dir, std::size_t count);

struct EntropyAnalysis {
  std::vector<double> mean;  // per greedy step
  std::vector<std::size_t> count;
  std::vector<std::pair<std::string, std::string>> errors;  // task id, message
};

// Mean of entropy_diff_trace per position over tasks. Positions past a trace's
// end and NaN entries are left out of that position's mean.
EntropyAnalysis analyze_entropy(const RunConfig& cfg, const std::shared_ptr<const LanguageModel>& model,
                                const std::vector<Task>& tasks);
EntropyAnalysis analyze_entropy(const RunConfig& cfg, const std::vector<Task>& tasks);
EntropyAnalysis mean_series(const std::vector<std::vector<double>>& traces);

// TSV: position, mean, count.
std::string format_entropy_series(const EntropyAnalysis& analysis);

}  // namespace sufcon
