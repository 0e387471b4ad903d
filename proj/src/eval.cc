// Copyright 2026 The Stylomask Authors
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

#include "stylomask/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "stylomask/embeddings.h"
#include "stylomask/errors.h"

namespace stylomask {
namespace {

constexpr int kReportVersion = 1;

std::string Num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double ParseNum(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("bad number in report: " + s);
  }
  return v;
}

struct Block {
  size_t r, h, len;
};

// Longest run of equal ids in r[r0,r1) x h[h0,h1); earliest on ties.
Block LongestBlock(const std::vector<int>& r, const std::vector<int>& h, size_t r0,
                   size_t r1, size_t h0, size_t h1) {
  Block best{r0, h0, 0};
  std::vector<size_t> prev(h1 - h0 + 1, 0), cur(h1 - h0 + 1, 0);
  for (size_t i = r0; i < r1; ++i) {
    for (size_t j = h0; j < h1; ++j) {
      const size_t k = j - h0 + 1;
      cur[k] = r[i] == h[j] ? prev[k - 1] + 1 : 0;
      if (cur[k] > best.len) best = {i + 1 - cur[k], j + 1 - cur[k], cur[k]};
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

double Accuracy(const TextClassifier& model, std::span<const Document> docs) {
  if (docs.empty()) throw DataError("accuracy of an empty document set");
  size_t correct = 0;
  for (const auto& d : docs) {
    if (!d.label) throw DataError("accuracy needs labeled documents");
    if (model.Predict(d) == *d.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

double ChanceLevel(std::span<const Document> docs) {
  if (docs.empty()) throw DataError("chance level of an empty document set");
  std::map<std::string, size_t> counts;
  for (const auto& d : docs) {
    if (!d.label) throw DataError("chance level needs labeled documents");
    ++counts[*d.label];
  }
  size_t top = 0;
  for (const auto& [label, n] : counts) top = std::max(top, n);
  return static_cast<double>(top) / static_cast<double>(docs.size());
}

double Meteor(std::span<const std::string> reference,
              std::span<const std::string> hypothesis, const MeteorParams& params) {
  if (reference.empty() || hypothesis.empty()) return 0.0;
  std::unordered_map<std::string_view, int> ids;
  auto id_of = [&](std::string_view s) {
    return ids.emplace(s, static_cast<int>(ids.size())).first->second;
  };
  std::vector<int> r, h;
  for (const auto& s : reference) r.push_back(id_of(s));
  for (const auto& s : hypothesis) h.push_back(id_of(s));

  std::vector<long> r_to_h(r.size(), -1), h_to_r(h.size(), -1);
  struct Span {
    size_t r0, r1, h0, h1;
  };
  std::vector<Span> stack{{0, r.size(), 0, h.size()}};
  while (!stack.empty()) {
    const Span s = stack.back();
    stack.pop_back();
    if (s.r0 >= s.r1 || s.h0 >= s.h1) continue;
    const Block b = LongestBlock(r, h, s.r0, s.r1, s.h0, s.h1);
    if (b.len == 0) continue;
    for (size_t k = 0; k < b.len; ++k) {
      r_to_h[b.r + k] = static_cast<long>(b.h + k);
      h_to_r[b.h + k] = static_cast<long>(b.r + k);
    }
    stack.push_back({b.r + b.len, s.r1, b.h + b.len, s.h1});
    stack.push_back({s.r0, b.r, s.h0, b.h});
  }

  // Crossing matches the monotone pass could not use.
  std::unordered_map<int, std::deque<size_t>> free_ref;
  for (size_t i = 0; i < r.size(); ++i) {
    if (r_to_h[i] < 0) free_ref[r[i]].push_back(i);
  }
  for (size_t j = 0; j < h.size(); ++j) {
    if (h_to_r[j] >= 0) continue;
    auto it = free_ref.find(h[j]);
    if (it == free_ref.end() || it->second.empty()) continue;
    const size_t i = it->second.front();
    it->second.pop_front();
    h_to_r[j] = static_cast<long>(i);
    r_to_h[i] = static_cast<long>(j);
  }

  size_t matches = 0, chunks = 0;
  long prev_r = -2;
  bool prev_matched = false;
  for (size_t j = 0; j < h.size(); ++j) {
    if (h_to_r[j] < 0) {
      prev_matched = false;
      continue;
    }
    ++matches;
    if (!prev_matched || h_to_r[j] != prev_r + 1) ++chunks;
    prev_r = h_to_r[j];
    prev_matched = true;
  }
  if (matches == 0) return 0.0;
  const double m = static_cast<double>(matches);
  const double p = m / static_cast<double>(h.size());
  const double rc = m / static_cast<double>(r.size());
  const double fmean = p * rc / (params.alpha * p + (1.0 - params.alpha) * rc);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

TokenEncoder ProviderTokenEncoder(LmProvider& lm) {
  return [&lm](std::span<const std::string> tokens) {
    if (tokens.empty()) return std::vector<std::vector<double>>{};
    EncodeRequest req;
    req.tokens.assign(tokens.begin(), tokens.end());
    req.target_index = 0;
    return lm.Encode(req).vectors;
  };
}

EncodingScore EncodingF1(std::span<const std::string> reference,
                         std::span<const std::string> hypothesis,
                         const TokenEncoder& encode) {
  if (reference.empty() || hypothesis.empty()) return {};
  const auto ref = encode(reference);
  const auto hyp = encode(hypothesis);
  if (ref.size() != reference.size() || hyp.size() != hypothesis.size()) {
    throw ProviderError("encoder returned the wrong number of vectors");
  }
  std::vector<double> best_ref(ref.size(), -1.0), best_hyp(hyp.size(), -1.0);
  for (size_t i = 0; i < ref.size(); ++i) {
    for (size_t j = 0; j < hyp.size(); ++j) {
      const double c = std::clamp(Cosine(ref[i], hyp[j]), -1.0, 1.0);
      best_ref[i] = std::max(best_ref[i], c);
      best_hyp[j] = std::max(best_hyp[j], c);
    }
  }
  EncodingScore s;
  for (double c : best_hyp) s.precision += c;
  for (double c : best_ref) s.recall += c;
  s.precision /= static_cast<double>(hyp.size());
  s.recall /= static_cast<double>(ref.size());
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

double ChangeRate(const Document& original, std::span<const Edit> edits) {
  if (original.tokens.empty()) return 0.0;
  return static_cast<double>(edits.size()) / static_cast<double>(original.tokens.size());
}

ConditionResult EvaluateCondition(std::string condition, std::string substitute_corpus,
                                  std::string target_model,
                                  const TextClassifier* substitute,
                                  const TextClassifier& target,
                                  std::span<const AttackedDocument> docs,
                                  const TokenEncoder& encode,
                                  const MeteorParams& params) {
  if (docs.empty()) throw DataError("no attacked documents to evaluate");
  std::vector<Document> originals, adversarial;
  for (const auto& d : docs) {
    originals.push_back(d.original);
    adversarial.push_back(d.adversarial);
    adversarial.back().label = d.original.label;
  }
  ConditionResult row;
  row.condition = std::move(condition);
  row.substitute_corpus = std::move(substitute_corpus);
  row.target_model = std::move(target_model);
  row.n_docs = docs.size();
  row.chance = ChanceLevel(originals);
  row.target_pre = Accuracy(target, originals);
  row.target_post = Accuracy(target, adversarial);
  if (substitute) {
    row.substitute_pre = Accuracy(*substitute, originals);
    row.substitute_post = Accuracy(*substitute, adversarial);
  }
  for (const auto& d : docs) {
    const auto a = d.original.Surfaces();
    const auto b = d.adversarial.Surfaces();
    row.change_rate += ChangeRate(d.original, d.edits);
    row.meteor += Meteor(a, b, params);
    if (encode) row.encoding_f1 += EncodingF1(a, b, encode).f1;
    row.queries += static_cast<double>(d.queries);
  }
  const double n = static_cast<double>(docs.size());
  row.change_rate /= n;
  row.meteor /= n;
  row.encoding_f1 /= n;
  row.queries /= n;
  return row;
}

constexpr const char* kReportHeader =
    "condition\tsubstitute_corpus\ttarget_model\tsubstitute_pre\tsubstitute_post"
    "\ttarget_pre\ttarget_post\tchance\tsuccess\tchange_rate\tmeteor"
    "\tencoding_f1\tqueries\tn_docs";

void WriteReportTsv(std::ostream& out, std::span<const ConditionResult> rows,
                    const MeteorParams& params) {
  out << "# stylomask-report version " << kReportVersion << "\n"
      << "# meteor alpha=" << Num(params.alpha) << " beta=" << Num(params.beta)
      << " gamma=" << Num(params.gamma) << " exact-match\n"
      << "# averaging: macro over documents; success: target_post <= chance\n"
      << kReportHeader << "\n";
  for (const auto& r : rows) {
    out << r.condition << '\t' << r.substitute_corpus << '\t' << r.target_model << '\t'
        << Num(r.substitute_pre) << '\t' << Num(r.substitute_post) << '\t'
        << Num(r.target_pre) << '\t' << Num(r.target_post) << '\t' << Num(r.chance)
        << '\t' << (r.success() ? 1 : 0) << '\t' << Num(r.change_rate) << '\t'
        << Num(r.meteor) << '\t' << Num(r.encoding_f1) << '\t' << Num(r.queries)
        << '\t' << r.n_docs << '\n';
  }
}

std::vector<ConditionResult> ReadReportTsv(std::istream& in) {
  std::vector<ConditionResult> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kReportHeader) throw DataError("not a stylomask report: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    if (f.size() != 14) throw DataError("report row has " + std::to_string(f.size()) + " columns");
    ConditionResult r;
    r.condition = f[0];
    r.substitute_corpus = f[1];
    r.target_model = f[2];
    r.substitute_pre = ParseNum(f[3]);
    r.substitute_post = ParseNum(f[4]);
    r.target_pre = ParseNum(f[5]);
    r.target_post = ParseNum(f[6]);
    r.chance = ParseNum(f[7]);
    r.change_rate = ParseNum(f[9]);
    r.meteor = ParseNum(f[10]);
    r.encoding_f1 = ParseNum(f[11]);
    r.queries = ParseNum(f[12]);
    r.n_docs = static_cast<size_t>(ParseNum(f[13]));
    if ((f[8] == "1") != r.success()) throw DataError("success flag disagrees with accuracies");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string FormatReportTable(std::span<const ConditionResult> rows) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "condition" << std::setw(14) << "substitute"
      << std::setw(10) << "target" << std::right << std::setw(8) << "f' pre"
      << std::setw(8) << "f' post" << std::setw(8) << "f pre" << std::setw(8)
      << "f post" << std::setw(8) << "chance" << std::setw(4) << "ok" << std::setw(8)
      << "change" << std::setw(8) << "meteor" << std::setw(8) << "encF1"
      << std::setw(9) << "queries" << "\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    out << std::left << std::setw(24) << r.condition << std::setw(14)
        << r.substitute_corpus << std::setw(10) << r.target_model << std::right
        << std::setw(8) << r.substitute_pre << std::setw(8) << r.substitute_post
        << std::setw(8) << r.target_pre << std::setw(8) << r.target_post
        << std::setw(8) << r.chance << std::setw(4) << (r.success() ? "*" : "")
        << std::setw(8) << r.change_rate << std::setw(8) << r.meteor << std::setw(8)
        << r.encoding_f1 << std::setw(9) << std::setprecision(1) << r.queries
        << std::setprecision(3) << "\n";
  }
  return out.str();
}

}  // namespace stylomask
