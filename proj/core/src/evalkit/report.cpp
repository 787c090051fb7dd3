// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cnat/evalkit/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "cnat/error.hpp"
#include "cnat/evalkit/metrics.hpp"
#include "cnat/tokens.hpp"

namespace cnat::evalkit {

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["examples"] = r.examples;
  j["accuracy"] = r.accuracy;
  j["ne_accuracy"] = r.ne_accuracy;
  if (r.bleu) j["bleu"] = *r.bleu;
  if (r.perplexity) j["perplexity"] = *r.perplexity;
  j["inter_rep"] = r.inter_rep;
  if (r.rationality) j["rationality"] = *r.rationality;
  j["mean_latency_ns"] = r.mean_latency_ns;
  if (r.speedup) {
    j["speedup"] = *r.speedup;
    j["baseline"] = r.baseline;
  }
  return j.dump();
}

std::string report_to_table(const EvalReport& r) {
  std::ostringstream os;
  auto row = [&](const char* name, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-14s %s\n", name, value.c_str());
    os << buf;
  };
  auto num = [](double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return std::string(buf);
  };
  row("examples", std::to_string(r.examples));
  row("Acc", num(r.accuracy));
  row("NE-Acc", num(r.ne_accuracy));
  row("BLEU", r.bleu ? num(*r.bleu) : "-");
  row("PPL", r.perplexity ? num(*r.perplexity) : "-");
  row("Inter-Rep", num(r.inter_rep, 4));
  row("Rationality", r.rationality ? num(*r.rationality) : "-");
  row("Latency(ms)", num(r.mean_latency_ns / 1e6, 3));
  if (r.speedup) row("Speedup", num(*r.speedup) + "x vs " + r.baseline);
  return os.str();
}

Generations generate_all(const model::CnatModel<float>& model, const std::vector<data::Example>& examples,
                         const data::Vocab& vocab) {
  Generations g;
  const bool ar = model.config().mode == model::DecodeMode::kAutoregressive;
  model::GenerateOptions with_text;
  model::GenerateOptions label_only;
  label_only.explain = false;
  for (const auto& ex : examples) {
    const auto input = data::encode_input(ex, vocab);
    const auto out = ar ? model.generate_autoregressive(input, with_text) : model.generate(input, with_text);
    const auto ne = ar ? model.generate_autoregressive(input, label_only) : model.generate(input, label_only);
    g.labels.push_back(out.label);
    g.ne_labels.push_back(ne.label);
    g.explanations.push_back(out.explanation);
    g.latency_ns.push_back(static_cast<double>(out.latency_ns));
  }
  return g;
}

double scorer_perplexity(const model::LanguageModel<float>& scorer, const std::vector<std::vector<int>>& sentences) {
  std::vector<std::vector<double>> log_probs;
  const int V = scorer.config().vocab_size;
  for (auto s : sentences) {
    if (s.empty()) continue;
    if (static_cast<int>(s.size()) > scorer.config().max_length) s.resize(static_cast<std::size_t>(scorer.config().max_length));
    for (auto& id : s) {
      if (id < 0 || id >= V) id = kUnkId;
    }
    log_probs.push_back(scorer.token_log_probs(s));
  }
  return perplexity_from_log_probs(log_probs);
}

EvalReport evaluate_model(const model::CnatModel<float>& model, const std::vector<data::Example>& examples,
                          const data::Vocab& vocab, const model::LanguageModel<float>* scorer,
                          const JudgeClassifier* judge, Generations* generations) {
  if (examples.empty()) raise(ErrorCode::kEmptyEval, "evaluation set is empty");
  std::vector<int> golds;
  for (const auto& ex : examples) {
    if (!ex.label) raise(ErrorCode::kEmptyEval, "record '" + ex.id + "' has no gold label");
    golds.push_back(*ex.label);
  }
  auto g = generate_all(model, examples, vocab);

  EvalReport r;
  r.examples = static_cast<int>(examples.size());
  r.accuracy = accuracy(g.labels, golds);
  r.ne_accuracy = accuracy(g.ne_labels, golds);

  std::vector<std::string> texts;
  for (const auto& e : g.explanations) texts.push_back(vocab.detokenize(e));
  std::vector<std::string> cands, refs;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!examples[i].explanation) continue;
    cands.push_back(texts[i]);
    refs.push_back(*examples[i].explanation);
  }
  if (!cands.empty()) r.bleu = bleu(cands, refs);
  r.inter_rep = inter_rep(texts);
  if (scorer) {
    bool any = false;
    for (const auto& e : g.explanations) any = any || !e.empty();
    if (any) r.perplexity = scorer_perplexity(*scorer, g.explanations);
  }
  if (judge) {
    std::vector<int> verdicts;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      verdicts.push_back(judge->predict(data::encode_input(examples[i], vocab), g.explanations[i]));
    }
    r.rationality = rationality(verdicts, g.labels);
  }
  double total = 0;
  for (double v : g.latency_ns) total += v;
  r.mean_latency_ns = total / static_cast<double>(g.latency_ns.size());
  if (generations) *generations = std::move(g);
  return r;
}

}  // namespace cnat::evalkit
