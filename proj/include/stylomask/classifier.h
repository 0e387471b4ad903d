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

#ifndef STYLOMASK_CLASSIFIER_H_
#define STYLOMASK_CLASSIFIER_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylomask/corpus.h"
#include "stylomask/features.h"

namespace stylomask {

enum class LossKind { kLogistic, kHinge };

std::string_view LossKindName(LossKind kind);
LossKind ParseLossKind(std::string_view name);

// Binary linear model. The decision value s(x) = w.x + b is the logit of the
// positive label; the other label gets -s(x). Ties (s = 0) go to positive.
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(std::vector<double> weights, double bias, LossKind kind,
                   std::vector<std::string> label_set);

  double DecisionValue(const SparseVector& x) const;
  double Logit(const SparseVector& x, std::string_view label) const;
  const std::string& Predict(const SparseVector& x) const;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  LossKind kind() const { return kind_; }
  const std::vector<std::string>& label_set() const { return label_set_; }
  const std::string& positive_label() const { return label_set_[1]; }
  const std::string& negative_label() const { return label_set_[0]; }
  // The label that is not `label`.
  const std::string& Other(std::string_view label) const;
  // +1 for the positive label, -1 for the negative one.
  double Sign(std::string_view label) const;

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  LossKind kind_ = LossKind::kLogistic;
  std::vector<std::string> label_set_;
};

struct LogisticOptions {
  double C = 1.0;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-6;
};

// Objective value after each accepted step, starting at the zero model.
struct TrainTrace {
  std::vector<double> objective;
  double final_gradient_norm = 0.0;
  int iterations = 0;
};

// Minimizes 0.5*|w|^2 + C * sum log(1 + exp(-y (w.x + b))) by full-batch
// gradient descent. Each step starts from a Barzilai-Borwein length and
// backtracks until the Armijo condition holds with a strict decrease, so the
// objective falls at every step. Stops early when no step lowers the
// objective in floating point.
// The bias is not regularized.
LinearClassifier TrainLogistic(std::span<const SparseVector> x,
                               std::span<const std::string> y, size_t dimension,
                               const LogisticOptions& options = {},
                               TrainTrace* trace = nullptr);

struct SvmOptions {
  double C = 1.0;
  int iterations = 400;
};

// Hinge-loss linear SVM, 0.5*|(w,b)|^2 + C * sum max(0, 1 - y (w.x + b)),
// trained by full-batch projected subgradient descent with step 1/(lambda t)
// and iterate averaging over the second half of the run. The bias is an
// augmented constant feature and is regularized like the weights.
LinearClassifier TrainHingeSvm(std::span<const SparseVector> x,
                               std::span<const std::string> y, size_t dimension,
                               const SvmOptions& options = {});

// A feature space paired with a classifier trained in it.
class TextClassifier {
 public:
  TextClassifier() = default;
  TextClassifier(FeatureSpace space, LinearClassifier model)
      : space_(std::move(space)), model_(std::move(model)) {}

  SparseVector Vectorize(std::span<const std::string> surfaces) const {
    return space_.Vectorize(surfaces);
  }
  double Logit(std::span<const std::string> surfaces, std::string_view label) const;
  std::string Predict(std::span<const std::string> surfaces) const;
  double Logit(const Document& doc, std::string_view label) const;
  std::string Predict(const Document& doc) const;

  const FeatureSpace& space() const { return space_; }
  const LinearClassifier& model() const { return model_; }

  void Save(std::ostream& out) const;
  static TextClassifier Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static TextClassifier LoadFile(const std::string& path);

 private:
  FeatureSpace space_;
  LinearClassifier model_;
};

struct TrainSpec {
  LossKind kind = LossKind::kLogistic;
  FeatureConfig features = FeatureConfig::WordUniBigram();
  double C = 1.0;
};

// Fits features on the labeled documents and trains the requested model.
TextClassifier TrainTextClassifier(std::span<const Document> docs,
                                   const TrainSpec& spec);

// Logistic link: probability of `label` given its logit.
double Sigmoid(double z);

}  // namespace stylomask

#endif  // STYLOMASK_CLASSIFIER_H_
