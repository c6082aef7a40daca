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

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sufcon/automaton.h"
#include "sufcon/errors.h"
#include "sufcon/harness.h"
#include "sufcon/remote_provider.h"
#include "sufcon/trace.h"
#include "sufcon/utf8.h"
#include "sufcon/vocabulary.h"

namespace {

using namespace sufcon;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

// Errors in user-supplied inputs; everything else is a runtime failure.
int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const CompileError*>(&e) || dynamic_cast<const EmptyLanguageError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const OracleBoundError*>(&e))
    return kConfigError;
  return kRuntimeError;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

int cmd_run(const std::string& config_path, const std::string& tasks_path, std::string out_dir) {
  RunConfig cfg = load_run_config(config_path);
  std::vector<Task> tasks = load_tasks(tasks_path);
  if (out_dir.empty()) out_dir = cfg.out_dir.string();
  if (out_dir.empty()) throw ConfigError("no output directory: pass --out or set 'out' in the config");

  std::shared_ptr<const LanguageModel> model;
  try {
    model = make_provider(cfg.provider);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // Every task fails; the report still lists them.
    Report report;
    report.algorithm = cfg.algorithm;
    for (const Task& t : tasks) {
      ReportRow row;
      row.id = t.id;
      row.gold = t.gold;
      row.error = std::string("provider unavailable: ") + e.what();
      report.rows.push_back(std::move(row));
    }
    write_report(report, out_dir, false);
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  Report report = run_experiment(cfg, model, tasks);
  write_report(report, out_dir, cfg.write_traces);
  std::cout << format_summary_table(report);
  for (const auto& row : report.rows)
    if (row.error) std::cerr << "task " << row.id << ": " << *row.error << "\n";
  return report.summary().errors ? kRuntimeError : kOk;
}

int cmd_entropy(const std::string& config_path, const std::string& tasks_path, const std::string& out) {
  RunConfig cfg = load_run_config(config_path);
  std::vector<Task> tasks = load_tasks(tasks_path);
  EntropyAnalysis analysis = analyze_entropy(cfg, tasks);
  write_output(out, format_entropy_series(analysis));
  for (const auto& [id, message] : analysis.errors) std::cerr << "task " << id << ": " << message << "\n";
  return analysis.errors.empty() ? kOk : kRuntimeError;
}

// Both ends of every transition range, enough to exercise every edge.
std::u32string representative_alphabet(const ConstraintAutomaton& automaton) {
  std::u32string out;
  if (const Dfa* dfa = automaton.dfa()) {
    for (const auto& state : dfa->transitions)
      for (const auto& t : state) out += {t.lo, t.hi};
  } else {
    for (const auto& rule : automaton.spec().cfg.rules)
      for (const auto& sym : rule.rhs)
        if (sym.terminal)
          for (const auto& r : sym.chars.ranges()) out += {r.first, r.second};
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int cmd_grammar_check(const std::string& path, std::size_t enumerate, const std::optional<std::string>& alphabet) {
  GrammarSpec spec = load_grammar_file(path);
  ConstraintAutomaton automaton = ConstraintAutomaton::compile(spec);
  std::cout << "ok: " << (spec.kind == GrammarKind::kRegular ? "regular" : "context-free") << " grammar";
  if (const Dfa* dfa = automaton.dfa()) std::cout << ", " << dfa->num_states() << " states";
  std::cout << "\n";
  if (enumerate == 0) return kOk;
  std::u32string chars = alphabet ? utf8::decode(*alphabet) : representative_alphabet(automaton);
  auto prefixes = enumerate_prefixes(automaton, chars, enumerate, std::max(enumerate, kDefaultOracleBound));
  std::vector<std::u32string> sorted(prefixes.begin(), prefixes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (const auto& p : sorted) {
    Cursor c = initial_cursor(automaton);
    for (char32_t ch : p) c = step_char(c, ch);
    std::cout << nlohmann::json(utf8::encode(p)).dump() << (is_accepting(c) ? "\taccepting" : "") << "\n";
  }
  return kOk;
}

int cmd_vocab_fetch(const std::string& endpoint, const std::string& out, std::size_t timeout_ms) {
  RemoteOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms);
  VocabularyHandshake h = fetch_vocabulary(endpoint, options);
  write_output(out, h.document);
  std::cerr << h.vocab.size() << " tokens, eog_id " << h.eog_id << "\n";
  return kOk;
}

int cmd_replay(const std::string& trace_path, const std::string& config_path, const std::string& vocab_path) {
  TraceFile trace = read_trace(trace_path);
  std::shared_ptr<const LanguageModel> model;
  std::optional<Vocabulary> vocab;
  std::optional<RunConfig> cfg;
  if (!config_path.empty()) {
    cfg = load_run_config(config_path);
    model = make_provider(cfg->provider);
    vocab = model->vocabulary();
  } else if (!vocab_path.empty()) {
    vocab = load_vocabulary_file(vocab_path);
  } else {
    throw ConfigError("replay needs --config or --vocab");
  }
  ReplayOutcome o = replay_trace(trace.records, vocab->eog_id());
  nlohmann::ordered_json j;
  j["track"] = track_tag(o.track);
  j["finished"] = o.finished;
  j["length"] = o.tokens.size() - (o.finished ? 1 : 0);
  j["steps"] = o.steps;
  j["bifurcation_pos"] = o.bifurcation_pos ? nlohmann::ordered_json(*o.bifurcation_pos) : nlohmann::ordered_json();
  j["score"] = o.score;
  j["penalty"] = o.penalty ? nlohmann::ordered_json(*o.penalty) : nlohmann::ordered_json();
  TokenSequence text = o.tokens;
  if (o.finished) text.pop_back();
  j["output"] = detokenize(*vocab, text);
  std::cout << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
  if (!model) return kOk;
  auto problems = verify_trace(trace, model, ConstraintAutomaton::compile(cfg->grammar));
  for (const auto& p : problems) std::cerr << "mismatch: " << p << "\n";
  return problems.empty() ? kOk : kRuntimeError;
}

int cmd_template(const std::string& name) {
  const AnswerTemplate& t = find_template(name);
  std::cout << "# extraction: " << t.extraction_pattern() << "\n" << format_grammar_file(t.grammar());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suffix-constrained decoding experiments"};
  app.name("decode");
  app.require_subcommand(1);

  std::string config, tasks, out, endpoint, trace, vocab, name, grammar_path;
  std::size_t enumerate = 0;
  std::size_t timeout_ms = 30000;
  std::optional<std::string> alphabet;

  auto* run = app.add_subcommand("run", "Decode every task and write a report");
  run->add_option("--config", config, "Run config file")->required();
  run->add_option("--tasks", tasks, "Task file (JSON lines)")->required();
  run->add_option("--out", out, "Output directory (overrides 'out' in the config)");

  auto* entropy = app.add_subcommand("analyze-entropy", "Mean min-entropy difference per greedy step");
  entropy->add_option("--config", config, "Run config file")->required();
  entropy->add_option("--tasks", tasks, "Task file (JSON lines)")->required();
  entropy->add_option("--out", out, "Output TSV file (default stdout)");

  auto* grammar = app.add_subcommand("grammar", "Grammar tools");
  grammar->require_subcommand(1);
  auto* check = grammar->add_subcommand("check", "Compile a grammar file and list its short prefixes");
  check->add_option("file", grammar_path, "Grammar file")->required();
  check->add_option("--enumerate", enumerate, "Print prefix-language strings up to this length");
  check->add_option("--alphabet", alphabet, "Characters to enumerate over (default: both ends of each transition range)");

  auto* vocab_cmd = app.add_subcommand("vocab", "Vocabulary tools");
  vocab_cmd->require_subcommand(1);
  auto* fetch = vocab_cmd->add_subcommand("fetch", "Download the vocabulary document from a server");
  fetch->add_option("--endpoint", endpoint, "Server base URL")->required();
  fetch->add_option("--out", out, "Output file (default stdout)");
  fetch->add_option("--timeout-ms", timeout_ms, "Request timeout");

  auto* replay = app.add_subcommand("replay", "Rebuild a decode result from its trace");
  replay->add_option("trace", trace, "Trace file")->required();
  replay->add_option("--config", config, "Run config; the trace is also checked against its model");
  replay->add_option("--vocab", vocab, "Vocabulary document, when no config is given");

  auto* tmpl = app.add_subcommand("template", "Print a shipped answer template as a grammar file");
  tmpl->add_option("name", name, "integer, mcq or boxed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, tasks, out);
    if (*entropy) return cmd_entropy(config, tasks, out);
    if (*check) return cmd_grammar_check(grammar_path, enumerate, alphabet);
    if (*fetch) return cmd_vocab_fetch(endpoint, out, timeout_ms);
    if (*replay) return cmd_replay(trace, config, vocab);
    if (*tmpl) return cmd_template(name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return kConfigError;
}
