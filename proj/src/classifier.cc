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

#include "stylomask/classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "stylomask/errors.h"

namespace stylomask {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

std::vector<std::string> BinaryLabelSet(std::span<const std::string> y) {
  std::set<std::string> labels(y.begin(), y.end());
  if (labels.size() < 2) {
    throw DataError("training data must contain both classes");
  }
  if (labels.size() > 2) {
    throw ConfigError("only binary classification is supported");
  }
  return {labels.begin(), labels.end()};
}

std::vector<double> SignedLabels(std::span<const std::string> y,
                                 const std::string& positive) {
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& label : y) out.push_back(label == positive ? 1.0 : -1.0);
  return out;
}

void CheckShapes(std::span<const SparseVector> x, std::span<const std::string> y,
                 size_t dimension) {
  if (x.size() != y.size()) throw ConfigError("x and y differ in length");
  for (const auto& v : x) {
    if (!v.indices.empty() && v.indices.back() >= dimension) {
      throw ConfigError("feature index out of range");
    }
  }
}

// log(1 + exp(-m)) without overflow.
double LogLoss(double margin) {
  if (margin > 0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

struct LogisticState {
  std::vector<double> w;
  double b = 0.0;
};

struct LogisticEval {
  double objective = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

LogisticEval EvaluateLogistic(const LogisticState& s,
                              std::span<const SparseVector> x,
                              std::span<const double> ys, double C) {
  LogisticEval e;
  e.grad_w = s.w;
  double reg = 0.0;
  for (double wi : s.w) reg += wi * wi;
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double z = x[i].Dot(s.w) + s.b;
    const double m = ys[i] * z;
    loss += LogLoss(m);
    // d/dz log(1 + exp(-y z)) = -y * sigmoid(-y z)
    const double coeff = -ys[i] * Sigmoid(-m) * C;
    for (size_t k = 0; k < x[i].indices.size(); ++k) {
      e.grad_w[x[i].indices[k]] += coeff * x[i].values[k];
    }
    e.grad_b += coeff;
  }
  e.objective = 0.5 * reg + C * loss;
  return e;
}

double GradientNorm(const LogisticEval& e) {
  double s = e.grad_b * e.grad_b;
  for (double g : e.grad_w) s += g * g;
  return std::sqrt(s);
}

}  // namespace

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kLogistic ? "logistic" : "hinge";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "logistic" || name == "lr") return LossKind::kLogistic;
  if (name == "hinge" || name == "svm" || name == "ngram") return LossKind::kHinge;
  throw ConfigError("unknown model kind: " + std::string(name));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LinearClassifier::LinearClassifier(std::vector<double> weights, double bias,
                                   LossKind kind,
                                   std::vector<std::string> label_set)
    : weights_(std::move(weights)),
      bias_(bias),
      kind_(kind),
      label_set_(std::move(label_set)) {
  if (label_set_.size() != 2 || label_set_[0] == label_set_[1]) {
    throw ConfigError("a linear classifier needs exactly two distinct labels");
  }
}

double LinearClassifier::DecisionValue(const SparseVector& x) const {
  return x.Dot(weights_) + bias_;
}

double LinearClassifier::Sign(std::string_view label) const {
  if (label == label_set_[1]) return 1.0;
  if (label == label_set_[0]) return -1.0;
  throw ConfigError("label '" + std::string(label) + "' not in the label set");
}

double LinearClassifier::Logit(const SparseVector& x, std::string_view label) const {
  return Sign(label) * DecisionValue(x);
}

const std::string& LinearClassifier::Predict(const SparseVector& x) const {
  return DecisionValue(x) >= 0.0 ? label_set_[1] : label_set_[0];
}

const std::string& LinearClassifier::Other(std::string_view label) const {
  return Sign(label) > 0 ? label_set_[0] : label_set_[1];
}

LinearClassifier TrainLogistic(std::span<const SparseVector> x,
                               std::span<const std::string> y, size_t dimension,
                               const LogisticOptions& options, TrainTrace* trace) {
  CheckShapes(x, y, dimension);
  if (!(options.C > 0)) throw ConfigError("C must be positive");
  auto labels = BinaryLabelSet(y);
  const auto ys = SignedLabels(y, labels[1]);

  LogisticState state{std::vector<double>(dimension, 0.0), 0.0};
  LogisticEval eval = EvaluateLogistic(state, x, ys, options.C);
  if (trace) trace->objective.push_back(eval.objective);

  double step = 1.0;
  int it = 0;
  double gnorm = GradientNorm(eval);
  for (; it < options.max_iterations && gnorm > options.gradient_tolerance; ++it) {
    LogisticState next;
    LogisticEval next_eval;
    bool accepted = false;
    // Once the objective cannot fall in floating point, the run is over.
    for (int halvings = 0; halvings < 60; ++halvings) {
      next.w = state.w;
      for (size_t k = 0; k < dimension; ++k) next.w[k] -= step * eval.grad_w[k];
      next.b = state.b - step * eval.grad_b;
      next_eval = EvaluateLogistic(next, x, ys, options.C);
      if (next_eval.objective < eval.objective &&
          next_eval.objective <= eval.objective - 1e-4 * step * gnorm * gnorm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    // Barzilai-Borwein length for the next trial step.
    double ss = 0.0, sy = 0.0;
    for (size_t k = 0; k < dimension; ++k) {
      const double sk = next.w[k] - state.w[k];
      ss += sk * sk;
      sy += sk * (next_eval.grad_w[k] - eval.grad_w[k]);
    }
    const double sb = next.b - state.b;
    ss += sb * sb;
    sy += sb * (next_eval.grad_b - eval.grad_b);
    step = sy > 0 ? std::min(ss / sy, 1e10) : 1.0;

    state = std::move(next);
    eval = std::move(next_eval);
    gnorm = GradientNorm(eval);
    if (trace) trace->objective.push_back(eval.objective);
  }
  if (trace) {
    trace->iterations = it;
    trace->final_gradient_norm = gnorm;
  }
  return LinearClassifier(std::move(state.w), state.b, LossKind::kLogistic,
                          std::move(labels));
}

LinearClassifier TrainHingeSvm(std::span<const SparseVector> x,
                               std::span<const std::string> y, size_t dimension,
                               const SvmOptions& options) {
  CheckShapes(x, y, dimension);
  if (!(options.C > 0)) throw ConfigError("C must be positive");
  if (options.iterations < 1) throw ConfigError("iterations must be >= 1");
  auto labels = BinaryLabelSet(y);
  const auto ys = SignedLabels(y, labels[1]);
  const double n = static_cast<double>(x.size());
  const double lambda = 1.0 / (options.C * n);
  const double radius = 1.0 / std::sqrt(lambda);

  // Last coordinate is the bias.
  std::vector<double> w(dimension + 1, 0.0);
  std::vector<double> avg(dimension + 1, 0.0);
  std::vector<double> acc(dimension + 1, 0.0);
  int averaged = 0;
  const int average_from = options.iterations / 2;
  for (int t = 1; t <= options.iterations; ++t) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (size_t i = 0; i < x.size(); ++i) {
      const double z = x[i].Dot(w) + w[dimension];
      if (ys[i] * z < 1.0) {
        for (size_t k = 0; k < x[i].indices.size(); ++k) {
          acc[x[i].indices[k]] += ys[i] * x[i].values[k];
        }
        acc[dimension] += ys[i];
      }
    }
    const double eta = 1.0 / (lambda * t);
    const double shrink = 1.0 - eta * lambda;
    double norm2 = 0.0;
    for (size_t k = 0; k <= dimension; ++k) {
      w[k] = shrink * w[k] + (eta / n) * acc[k];
      norm2 += w[k] * w[k];
    }
    if (norm2 > radius * radius) {
      const double scale = radius / std::sqrt(norm2);
      for (double& wk : w) wk *= scale;
    }
    if (t > average_from) {
      for (size_t k = 0; k <= dimension; ++k) avg[k] += w[k];
      ++averaged;
    }
  }
  for (double& a : avg) a /= averaged;
  const double bias = avg.back();
  avg.pop_back();
  return LinearClassifier(std::move(avg), bias, LossKind::kHinge, std::move(labels));
}

double TextClassifier::Logit(std::span<const std::string> surfaces,
                             std::string_view label) const {
  return model_.Logit(space_.Vectorize(surfaces), label);
}

std::string TextClassifier::Predict(std::span<const std::string> surfaces) const {
  return model_.Predict(space_.Vectorize(surfaces));
}

double TextClassifier::Logit(const Document& doc, std::string_view label) const {
  return model_.Logit(space_.Vectorize(doc), label);
}

std::string TextClassifier::Predict(const Document& doc) const {
  return model_.Predict(space_.Vectorize(doc));
}

void TextClassifier::Save(std::ostream& out) const {
  const auto& cfg = space_.config();
  json j = {
      {"format", "stylomask-model"},
      {"version", kModelFormatVersion},
      {"kind", LossKindName(model_.kind())},
      {"label_set", model_.label_set()},
      {"config",
       {{"word_ngram_orders", cfg.word_ngram_orders},
        {"char_ngram_orders", cfg.char_ngram_orders},
        {"sublinear_tf", cfg.sublinear_tf},
        {"min_df", cfg.min_df}}},
      {"bias", model_.bias()},
      {"features", space_.features()},
      {"idf", space_.idf()},
      {"weights", model_.weights()},
  };
  out << j.dump() << '\n';
}

TextClassifier TextClassifier::Load(std::istream& in) {
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "stylomask-model") {
      throw DataError("not a stylomask model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model file version");
    }
    FeatureConfig cfg;
    const auto& c = j.at("config");
    cfg.word_ngram_orders = c.at("word_ngram_orders").get<std::vector<int>>();
    cfg.char_ngram_orders = c.at("char_ngram_orders").get<std::vector<int>>();
    cfg.sublinear_tf = c.at("sublinear_tf").get<bool>();
    cfg.min_df = c.at("min_df").get<int>();
    auto space = FeatureSpace::FromParts(
        cfg, j.at("features").get<std::vector<std::string>>(),
        j.at("idf").get<std::vector<double>>());
    auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != space.dimension()) {
      throw DataError("weight dimension does not match the feature space");
    }
    LinearClassifier model(std::move(weights), j.at("bias").get<double>(),
                           ParseLossKind(j.at("kind").get<std::string>()),
                           j.at("label_set").get<std::vector<std::string>>());
    return TextClassifier(std::move(space), std::move(model));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void TextClassifier::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  Save(out);
}

TextClassifier TextClassifier::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return Load(in);
}

TextClassifier TrainTextClassifier(std::span<const Document> docs,
                                   const TrainSpec& spec) {
  std::vector<std::vector<std::string>> surfaces;
  std::vector<std::string> labels;
  for (const auto& d : docs) {
    if (!d.label) continue;
    surfaces.push_back(d.Surfaces());
    labels.push_back(*d.label);
  }
  if (surfaces.empty()) throw DataError("no labeled documents to train on");
  auto space = FeatureSpace::Fit(std::span<const std::vector<std::string>>(surfaces),
                                 spec.features);
  std::vector<SparseVector> x;
  x.reserve(surfaces.size());
  for (const auto& s : surfaces) x.push_back(space.Vectorize(s));
  LinearClassifier model =
      spec.kind == LossKind::kLogistic
          ? TrainLogistic(x, labels, space.dimension(), LogisticOptions{.C = spec.C})
          : TrainHingeSvm(x, labels, space.dimension(), SvmOptions{.C = spec.C});
  return TextClassifier(std::move(space), std::move(model));
}

}  // namespace stylomask
