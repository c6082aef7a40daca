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

#include <atomic>
#include <cmath>
#include <thread>

#include "sufcon/automaton.h"
#include "sufcon/errors.h"
#include "sufcon/harness.h"
#include "sufcon/vocabulary.h"

namespace sufcon {

namespace {

// Runs f(0..n-1) on up to `threads` workers. f must not throw.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
  };
  threads = std::min(threads, n);
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

ReportRow error_row(const Task& task, const std::string& message) {
  ReportRow row;
  row.id = task.id;
  row.gold = task.gold;
  row.error = message;
  return row;
}

}  // namespace

bool operator==(const ReportRow& a, const ReportRow& b) {
  return a.id == b.id && a.output == b.output && a.extracted == b.extracted && a.gold == b.gold &&
         a.correct == b.correct && a.finished == b.finished && a.steps == b.steps && a.length == b.length &&
         a.bifurcation_pos == b.bifurcation_pos && a.error == b.error;
}

ReportRow make_row(const Task& task, const Vocabulary& vocab, const AnswerExtractor& extractor,
                   const TokenSequence& tokens, bool finished, std::size_t steps,
                   std::optional<std::size_t> bifurcation_pos) {
  ReportRow row;
  row.id = task.id;
  row.gold = task.gold;
  std::span<const TokenId> text(tokens);
  if (!text.empty() && text.back() == vocab.eog_id()) text = text.first(text.size() - 1);
  row.output = detokenize(vocab, text);
  row.length = text.size();
  row.extracted = extractor.extract(row.output);
  row.correct = score(row.extracted, task.gold);
  row.finished = finished;
  row.steps = steps;
  row.bifurcation_pos = bifurcation_pos;
  return row;
}

ReportSummary Report::summary() const {
  ReportSummary s;
  s.tasks = rows.size();
  double length = 0.0;
  double bif = 0.0;
  std::size_t with_bif = 0;
  for (const auto& r : rows) {
    s.correct += r.correct;
    s.extracted += r.extracted.has_value();
    s.finished += r.finished;
    s.errors += r.error.has_value();
    length += static_cast<double>(r.length);
    if (r.bifurcation_pos) {
      bif += static_cast<double>(*r.bifurcation_pos);
      ++with_bif;
    }
  }
  if (s.tasks) {
    double n = static_cast<double>(s.tasks);
    s.accuracy = 100.0 * static_cast<double>(s.correct) / n;
    s.prop_finished = 100.0 * static_cast<double>(s.finished) / n;
    s.mean_length = length / n;
  }
  if (with_bif) s.mean_bifurcation_pos = bif / static_cast<double>(with_bif);
  return s;
}

Report run_experiment(const RunConfig& cfg, const std::shared_ptr<const LanguageModel>& model,
                      const std::vector<Task>& tasks) {
  cfg.validate();
  const Vocabulary& vocab = model->vocabulary();
  const ConstraintAutomaton automaton = ConstraintAutomaton::compile(cfg.grammar);
  const AnswerExtractor extractor(cfg.extraction);
  Report report;
  report.algorithm = cfg.algorithm;
  report.rows.resize(tasks.size());
  parallel_for(tasks.size(), cfg.parallelism, [&](std::size_t i) {
    const Task& task = tasks[i];
    ReportRow& row = report.rows[i];
    TokenSequence prompt;
    try {
      prompt = build_prompt(cfg, vocab, task);
      DecodeResult r = decode(cfg.algorithm, model, prompt, automaton, cfg.decode);
      row = make_row(task, vocab, extractor, r.tokens, r.finished, r.stats.steps, r.bifurcation_pos);
      row.trace = TraceFile{{cfg.algorithm, cfg.decode, prompt}, std::move(r.trace)};
    } catch (const DecodeFailure& f) {
      const DecodeResult& p = f.partial();
      row = make_row(task, vocab, extractor, p.tokens, false, p.stats.steps, p.bifurcation_pos);
      row.correct = false;
      row.error = f.what();
    } catch (const std::exception& e) {
      row = error_row(task, e.what());
    }
  });
  return report;
}

Report run_experiment(const RunConfig& cfg, const std::vector<Task>& tasks) {
  return run_experiment(cfg, make_provider(cfg.provider), tasks);
}

Report replay_report(const RunConfig& cfg, const Vocabulary& vocab, const std::vector<Task>& tasks,
                     const std::vector<std::optional<TraceFile>>& traces) {
  if (traces.size() != tasks.size()) throw ContractError("replay_report: one trace slot per task is required");
  const AnswerExtractor extractor(cfg.extraction);
  Report report;
  report.algorithm = cfg.algorithm;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!traces[i]) {
      report.rows.push_back(error_row(tasks[i], "no trace"));
      continue;
    }
    try {
      ReplayOutcome o = replay_trace(traces[i]->records, vocab.eog_id());
      report.rows.push_back(make_row(tasks[i], vocab, extractor, o.tokens, o.finished, o.steps, o.bifurcation_pos));
      report.rows.back().trace = traces[i];
    } catch (const Error& e) {
      report.rows.push_back(error_row(tasks[i], e.what()));
    }
  }
  return report;
}

EntropyAnalysis mean_series(const std::vector<std::vector<double>>& traces) {
  EntropyAnalysis out;
  for (const auto& t : traces) {
    if (t.size() > out.mean.size()) {
      out.mean.resize(t.size(), 0.0);
      out.count.resize(t.size(), 0);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (std::isnan(t[i])) continue;
      out.mean[i] += t[i];
      ++out.count[i];
    }
  }
  for (std::size_t i = 0; i < out.mean.size(); ++i)
    out.mean[i] = out.count[i] ? out.mean[i] / static_cast<double>(out.count[i]) : std::nan("");
  return out;
}

EntropyAnalysis analyze_entropy(const RunConfig& cfg, const std::shared_ptr<const LanguageModel>& model,
                                const std::vector<Task>& tasks) {
  cfg.validate();
  const ConstraintAutomaton automaton = ConstraintAutomaton::compile(cfg.grammar);
  std::vector<std::vector<double>> traces(tasks.size());
  std::vector<std::optional<std::string>> errors(tasks.size());
  parallel_for(tasks.size(), cfg.parallelism, [&](std::size_t i) {
    try {
      traces[i] = entropy_diff_trace(model, build_prompt(cfg, model->vocabulary(), tasks[i]), automaton, cfg.decode);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  EntropyAnalysis out = mean_series(traces);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (errors[i]) out.errors.emplace_back(tasks[i].id, *errors[i]);
  return out;
}

EntropyAnalysis analyze_entropy(const RunConfig& cfg, const std::vector<Task>& tasks) {
  return analyze_entropy(cfg, make_provider(cfg.provider), tasks);
}

}  // namespace sufcon
