#pragma once

#include "chdnet/common.hpp"

namespace chdnet {

/// Scores and hard labels from a binary decision function. A positive score
/// means Control; zero or negative means Case.
struct LinearPrediction {
  Vector scores;
  Labels labels;
};

/// Fisher discriminant: w = inv(S + eps I) (mu_control - mu_case), with S the
/// pooled within-class covariance and eps = 1e-6 trace(S) / d.
struct LdaModel {
  Vector weights;
  double bias = 0.0;
};

/// Gaussian naive Bayes with one class-shared variance per feature, which
/// makes the log-odds linear in x.
struct NaiveBayesModel {
  Matrix means;  // 2 x d, row = class index
  Vector variance;
  Eigen::Vector2d log_prior;
};

LdaModel lda_fit(const Matrix& x, const Labels& y);
LinearPrediction lda_predict(const LdaModel& model, const Matrix& x);

NaiveBayesModel nb_fit(const Matrix& x, const Labels& y);
/// Like nb_fit() but with caller-supplied class priors (case, control).
NaiveBayesModel nb_fit(const Matrix& x, const Labels& y, double prior_case, double prior_control);
LinearPrediction nb_predict(const NaiveBayesModel& model, const Matrix& x);

double accuracy(const Labels& truth, const Labels& predicted);

}  // namespace chdnet
