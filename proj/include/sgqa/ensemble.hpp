#pragma once

// Solver combination: per-option features (four derived from each base
// solver's scores, eleven from the support graph) fed to a logistic
// regression trained by batch gradient descent.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgqa/support_graph.hpp"

namespace sgqa {

// Scores one base solver assigned to each answer option of one question.
struct SolverScores {
  std::string solver;
  std::vector<double> scores;
};

// raw score, normalized score, softmax score, best-option indicator
inline std::vector<double> solver_independent_features(
    const std::vector<double>& scores, int option) {
  const double raw = scores[option];
  double sum = 0.0, max_score = scores[0];
  for (double s : scores) {
    sum += s;
    max_score = std::max(max_score, s);
  }
  const double normalized = std::abs(sum) > 1e-12 ? raw / sum : 0.0;
  double soft_sum = 0.0;
  for (double s : scores) soft_sum += std::exp(s - max_score);
  const double softmax = std::exp(raw - max_score) / soft_sum;
  int best_index = 0;
  for (size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[best_index]) best_index = static_cast<int>(j);
  const double best = option == best_index ? 1.0 : 0.0;
  return {raw, normalized, softmax, best};
}

// One feature row per option: base-solver features in solver order, then
// the support-graph features.
inline std::vector<std::vector<double>> assemble_option_features(
    const std::vector<SolverScores>& base,
    const std::vector<FeatureVector>& graph_features) {
  const int n_options = static_cast<int>(graph_features.size());
  std::vector<std::vector<double>> rows(n_options);
  for (int m = 0; m < n_options; ++m) {
    for (const auto& solver : base) {
      auto f = solver_independent_features(solver.scores, m);
      rows[m].insert(rows[m].end(), f.begin(), f.end());
    }
    auto g = graph_features[m].to_vector();
    rows[m].insert(rows[m].end(), g.begin(), g.end());
  }
  return rows;
}

struct EnsembleModel {
  std::vector<double> weights;
  double bias = 0.0;
  bool trained = false;

  double predict_one(const std::vector<double>& features) const {
    double z = bias;
    for (size_t j = 0; j < weights.size() && j < features.size(); ++j)
      z += weights[j] * features[j];
    return 1.0 / (1.0 + std::exp(-z));
  }

  nlohmann::json to_json() const {
    return {{"weights", weights}, {"bias", bias}, {"trained", trained}};
  }
  static EnsembleModel from_json(const nlohmann::json& j) {
    EnsembleModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.trained = j.value("trained", true);
    return m;
  }
};

struct TrainingExample {
  std::vector<double> features;
  int label = 0;  // 1 when this option is the gold answer
};

// Batch gradient descent on mean logistic loss, run until the gradient's
// max component drops below tol. All-equal labels yield the zero model.
inline EnsembleModel train_ensemble(const std::vector<TrainingExample>& data,
                                    double tol = 1e-6,
                                    long max_iterations = 200000,
                                    double learning_rate = 0.5) {
  EnsembleModel model;
  model.trained = true;
  if (data.empty()) return model;
  const size_t dim = data[0].features.size();
  model.weights.assign(dim, 0.0);

  bool any0 = false, any1 = false;
  for (const auto& ex : data) (ex.label ? any1 : any0) = true;
  if (!any0 || !any1) return model;  // degenerate: nothing to separate

  const double n = static_cast<double>(data.size());
  std::vector<double> grad(dim, 0.0);
  for (long it = 0; it < max_iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (const auto& ex : data) {
      const double err = model.predict_one(ex.features) - ex.label;
      for (size_t j = 0; j < dim; ++j) grad[j] += err * ex.features[j];
      grad_bias += err;
    }
    double max_grad = std::abs(grad_bias) / n;
    for (size_t j = 0; j < dim; ++j)
      max_grad = std::max(max_grad, std::abs(grad[j]) / n);
    if (max_grad < tol) break;
    for (size_t j = 0; j < dim; ++j)
      model.weights[j] -= learning_rate * grad[j] / n;
    model.bias -= learning_rate * grad_bias / n;
  }
  return model;
}

inline std::vector<double> predict_ensemble(
    const EnsembleModel& model,
    const std::vector<std::vector<double>>& option_features) {
  std::vector<double> out;
  for (const auto& f : option_features) out.push_back(model.predict_one(f));
  return out;
}

// Highest-probability options; near-equal probabilities form a tie set.
inline std::vector<int> ensemble_answer(const std::vector<double>& probs,
                                        double tie_epsilon = 1e-9) {
  std::vector<int> tie;
  if (probs.empty()) return tie;
  double best = *std::max_element(probs.begin(), probs.end());
  for (size_t m = 0; m < probs.size(); ++m)
    if (best - probs[m] < tie_epsilon) tie.push_back(static_cast<int>(m));
  return tie;
}

}  // namespace sgqa
