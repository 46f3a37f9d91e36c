#include "chdnet/mlp.hpp"

#include <cmath>
#include <random>

namespace chdnet {

MlpModel::MlpModel(std::vector<Index> layer_sizes, Vector parameters)
    : sizes_(std::move(layer_sizes)), params_(std::move(parameters)) {
  if (sizes_.size() < 2) throw Error(ErrorKind::InvalidInput, "an MLP needs at least input and output sizes");
  for (auto s : sizes_)
    if (s < 1) throw Error(ErrorKind::InvalidInput, "layer sizes must be positive");
  if (params_.size() != parameter_count(sizes_))
    throw Error(ErrorKind::Dimension, "parameter vector does not match layer sizes");
  if (!params_.allFinite()) throw Error(ErrorKind::Numeric, "non-finite MLP parameter");
  Index off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    weight_count_ += sizes_[l + 1] * sizes_[l];
  }
}

Index MlpModel::parameter_count(const std::vector<Index>& sizes) {
  Index n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l + 1] * sizes[l] + sizes[l + 1];
  return n;
}

Eigen::Map<const Matrix> MlpModel::weights(std::size_t layer) const {
  return {params_.data() + offsets_.at(layer), sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Vector> MlpModel::bias(std::size_t layer) const {
  return {params_.data() + offsets_.at(layer) + sizes_[layer + 1] * sizes_[layer], sizes_[layer + 1]};
}

MlpModel init_model(const std::vector<Index>& layer_sizes, std::uint64_t seed) {
  Vector p = Vector::Zero(MlpModel::parameter_count(layer_sizes));
  std::mt19937_64 rng(seed);
  Index off = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const Index fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Index i = 0; i < fan_in * fan_out; ++i) p(off + i) = u(rng);
    off += fan_in * fan_out + fan_out;
  }
  return MlpModel(layer_sizes, std::move(p));
}

std::vector<Index> default_layer_sizes(Index inputs) { return {inputs, 60, 60, 60, 2}; }

double tansig(double z) { return 2.0 / (1.0 + std::exp(-2.0 * z)) - 1.0; }

namespace {

void check_inputs(const MlpModel& model, const Matrix& x) {
  if (x.cols() != model.inputs())
    throw Error(ErrorKind::Dimension, "input has " + std::to_string(x.cols()) + " features, model expects " +
                                          std::to_string(model.inputs()));
}

/// Hidden activations per layer (index 0 is the input) and output logits.
struct Trace {
  std::vector<Matrix> activations;
  Matrix logits;
};

Trace run(const MlpModel& model, const Matrix& x) {
  Trace t;
  t.activations.reserve(model.depth());
  t.activations.push_back(x);
  for (std::size_t l = 0; l < model.depth(); ++l) {
    Matrix z = t.activations.back() * model.weights(l).transpose();
    z.rowwise() += model.bias(l).transpose();
    if (l + 1 == model.depth())
      t.logits = std::move(z);
    else
      t.activations.push_back(z.array().tanh().matrix());
  }
  return t;
}

/// Row-wise log-softmax.
Matrix log_softmax(const Matrix& logits) {
  const Vector peak = logits.rowwise().maxCoeff();
  Matrix shifted = logits.colwise() - peak;
  const Vector lse = shifted.array().exp().rowwise().sum().log().matrix();
  return shifted.colwise() - lse;
}

double mean_squared_weight(const MlpModel& model) {
  double s = 0.0;
  for (std::size_t l = 0; l < model.depth(); ++l) s += model.weights(l).squaredNorm();
  return s / double(model.weight_count());
}

void check_targets(const Matrix& x, const Matrix& targets, const MlpModel& model) {
  if (targets.rows() != x.rows() || targets.cols() != model.outputs())
    throw Error(ErrorKind::Dimension, "target matrix shape mismatch");
}

}  // namespace

Matrix forward(const MlpModel& model, const Matrix& x) {
  check_inputs(model, x);
  return log_softmax(run(model, x).logits).array().exp().matrix();
}

Matrix predict_proba(const MlpModel& model, const Matrix& x) { return forward(model, x); }

Labels predict(const MlpModel& model, const Matrix& x) {
  const Matrix p = forward(model, x);
  Labels out(static_cast<std::size_t>(p.rows()));
  for (Index i = 0; i < p.rows(); ++i)
    out[static_cast<std::size_t>(i)] = p(i, 1) > p(i, 0) ? Label::Control : Label::Case;
  return out;
}

Matrix one_hot(const Labels& labels) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), 2);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Index>(i), class_index(labels[i])) = 1.0;
  return y;
}

double loss(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma) {
  check_inputs(model, x);
  check_targets(x, targets, model);
  const Matrix logp = log_softmax(run(model, x).logits).cwiseMax(std::log(kLogFloor));
  const double ce = -(targets.cwiseProduct(logp)).sum() / double(x.rows());
  return (1.0 - gamma) * ce + gamma * mean_squared_weight(model);
}

double loss_and_gradient(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma,
                         Vector& gradient) {
  check_inputs(model, x);
  check_targets(x, targets, model);
  const auto t = run(model, x);
  const Matrix logp = log_softmax(t.logits);
  const double n = double(x.rows());
  const double ce = -(targets.cwiseProduct(logp.cwiseMax(std::log(kLogFloor)))).sum() / n;
  const double reg_scale = 2.0 * gamma / double(model.weight_count());

  gradient.resize(model.parameters().size());
  // softmax + cross-entropy: dL/dlogits = (p - y) / n
  Matrix delta = (1.0 - gamma) * (logp.array().exp().matrix() - targets) / n;
  Index end = gradient.size();
  for (std::size_t l = model.depth(); l-- > 0;) {
    const auto w = model.weights(l);
    const Index wsize = w.size(), bsize = w.rows();
    const Index off = end - wsize - bsize;
    Eigen::Map<Matrix> gw(gradient.data() + off, w.rows(), w.cols());
    gw.noalias() = delta.transpose() * t.activations[l];
    gw += reg_scale * w;
    gradient.segment(off + wsize, bsize) = delta.colwise().sum().transpose();
    if (l > 0) {
      const Matrix& a = t.activations[l];
      delta = (delta * w).cwiseProduct((1.0 - a.array().square()).matrix());
    }
    end = off;
  }
  return (1.0 - gamma) * ce + gamma * mean_squared_weight(model);
}

Vector gradient(const MlpModel& model, const Matrix& x, const Matrix& targets, double gamma) {
  Vector g;
  loss_and_gradient(model, x, targets, gamma, g);
  return g;
}

}  // namespace chdnet
