#include "chdnet/linear.hpp"

#include <cmath>

namespace chdnet {

namespace {

struct ClassStats {
  Eigen::Matrix<double, 2, Eigen::Dynamic> means;
  Matrix centered;  // rows centered on their own class mean
  std::size_t n[2] = {0, 0};
};

ClassStats class_stats(const Matrix& x, const Labels& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error(ErrorKind::Dimension, "label count mismatch");
  if (x.cols() < 1) throw Error(ErrorKind::InvalidInput, "need at least one feature");
  ClassStats s;
  s.means = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, x.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int c = class_index(y[i]);
    s.means.row(c) += x.row(static_cast<Index>(i));
    ++s.n[c];
  }
  if (s.n[0] < 2 || s.n[1] < 2) throw Error(ErrorKind::InvalidInput, "each class needs at least 2 samples");
  s.means.row(0) /= double(s.n[0]);
  s.means.row(1) /= double(s.n[1]);
  s.centered = x;
  for (std::size_t i = 0; i < y.size(); ++i) s.centered.row(static_cast<Index>(i)) -= s.means.row(class_index(y[i]));
  return s;
}

LinearPrediction from_scores(Vector scores) {
  Labels labels(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) labels[static_cast<std::size_t>(i)] = scores(i) > 0.0 ? Label::Control : Label::Case;
  return {std::move(scores), std::move(labels)};
}

}  // namespace

LdaModel lda_fit(const Matrix& x, const Labels& y) {
  const auto s = class_stats(x, y);
  const double dof = double(s.n[0] + s.n[1] - 2);
  Matrix pooled = (s.centered.transpose() * s.centered) / dof;
  const double d = double(x.cols());
  const double trace = pooled.trace();
  const double ridge = trace > 0.0 ? 1e-6 * trace / d : 1e-12;
  pooled.diagonal().array() += ridge;

  const Vector diff = (s.means.row(1) - s.means.row(0)).transpose();
  LdaModel m;
  m.weights = pooled.ldlt().solve(diff);
  const Vector midpoint = 0.5 * (s.means.row(0) + s.means.row(1)).transpose();
  m.bias = -m.weights.dot(midpoint) + std::log(double(s.n[1]) / double(s.n[0]));
  if (!m.weights.allFinite() || !std::isfinite(m.bias))
    throw Error(ErrorKind::Numeric, "LDA produced non-finite weights");
  return m;
}

LinearPrediction lda_predict(const LdaModel& model, const Matrix& x) {
  if (x.cols() != model.weights.size()) throw Error(ErrorKind::Dimension, "LDA feature count mismatch");
  return from_scores((x * model.weights).array() + model.bias);
}

NaiveBayesModel nb_fit(const Matrix& x, const Labels& y) {
  const auto c = count_classes(y);
  return nb_fit(x, y, double(c.cases) / double(y.size()), double(c.controls) / double(y.size()));
}

NaiveBayesModel nb_fit(const Matrix& x, const Labels& y, double prior_case, double prior_control) {
  const auto s = class_stats(x, y);
  NaiveBayesModel m;
  m.means = s.means;
  m.variance = s.centered.colwise().squaredNorm().transpose() / double(s.n[0] + s.n[1] - 2);
  const double mean_var = m.variance.mean();
  const double floor = mean_var > 0.0 ? 1e-9 * mean_var : 1e-12;
  m.variance = m.variance.cwiseMax(floor);
  const double total = prior_case + prior_control;
  m.log_prior << std::log(prior_case / total), std::log(prior_control / total);
  return m;
}

LinearPrediction nb_predict(const NaiveBayesModel& model, const Matrix& x) {
  if (x.cols() != model.variance.size()) throw Error(ErrorKind::Dimension, "NB feature count mismatch");
  // log p(control|x) - log p(case|x) for a shared variance collapses to w.x + b
  const Vector inv_var = model.variance.cwiseInverse();
  const Vector w = (model.means.row(1) - model.means.row(0)).transpose().cwiseProduct(inv_var);
  const double b = -0.5 * (model.means.row(1).array().square() - model.means.row(0).array().square())
                              .matrix()
                              .dot(inv_var.transpose()) +
                   (model.log_prior(1) - model.log_prior(0));
  return from_scores((x * w).array() + b);
}

double accuracy(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    throw Error(ErrorKind::Dimension, "accuracy needs equal, non-empty label lists");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return double(hit) / double(truth.size());
}

}  // namespace chdnet
