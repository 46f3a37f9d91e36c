#pragma once

#include "chdnet/common.hpp"

#include <vector>

namespace chdnet {

/// Fully connected tansig network with a softmax output layer.
///
/// All parameters live in one flat vector so optimizers can treat the model as
/// a point in R^P. Layer l (l = 0 .. depth-1) stores its weight matrix
/// (fan_out x fan_in, column-major) followed by its bias vector.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(std::vector<Index> layer_sizes, Vector parameters);

  static Index parameter_count(const std::vector<Index>& layer_sizes);

  const std::vector<Index>& layer_sizes() const { return sizes_; }
  const Vector& parameters() const { return params_; }
  std::size_t depth() const { return sizes_.size() - 1; }
  Index inputs() const { return sizes_.front(); }
  Index outputs() const { return sizes_.back(); }
  /// Number of weight entries, biases excluded.
  Index weight_count() const { return weight_count_; }

  Eigen::Map<const Matrix> weights(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  MlpModel with_parameters(Vector parameters) const { return MlpModel(sizes_, std::move(parameters)); }

 private:
  std::vector<Index> sizes_;
  Vector params_;
  std::vector<Index> offsets_;
  Index weight_count_ = 0;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpModel init_model(const std::vector<Index>& layer_sizes, std::uint64_t seed);

/// Architecture used throughout: inputs -> 60 -> 60 -> 60 -> 2.
std::vector<Index> default_layer_sizes(Index inputs);

template <typename Derived>
auto tansig(const Eigen::ArrayBase<Derived>& z) {
  return 2.0 / (1.0 + (-2.0 * z).exp()) - 1.0;
}

double tansig(double z);

/// Class probabilities, one row per input row.
Matrix forward(const MlpModel& model, const Matrix& x);
Matrix predict_proba(const MlpModel& model, const Matrix& x);
/// argmax of predict_proba, ties to Case.
Labels predict(const MlpModel& model, const Matrix& x);

/// One-hot targets, column = class index.
Matrix one_hot(const Labels& labels);

inline constexpr double kLogFloor = 1e-12;

/// (1 - gamma) * mean cross-entropy + gamma * mean squared weight.
double loss(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma);

/// Loss together with its exact gradient (same layout as parameters()).
double loss_and_gradient(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma,
                         Vector& gradient);

Vector gradient(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma);

}  // namespace chdnet
