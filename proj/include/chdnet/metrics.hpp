#pragma once

#include "chdnet/common.hpp"

#include <array>
#include <iosfwd>

namespace chdnet {

/// counts[true][predicted], indexed by class_index().
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t operator()(Label truth, Label predicted) const {
    return counts[class_index(truth)][class_index(predicted)];
  }
  std::size_t total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
};

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted);

/// One-vs-rest rates for a single class. A 0/0 ratio is reported as 0 and
/// sets `degenerate`.
struct ClassMetrics {
  double precision = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

struct Coefficient {
  double value = 0.0;
  bool degenerate = false;
};

ClassMetrics class_metrics(const ConfusionMatrix& cm, Label positive);
double overall_accuracy(const ConfusionMatrix& cm);
Coefficient mcc(const ConfusionMatrix& cm);
Coefficient kappa(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) anchor
};

/// Sweeps thresholds over the distinct scores in descending order, one point
/// per distinct score; starts at (0, 0) and ends at (1, 1). `positive[i]`
/// marks samples of the positive class.
std::vector<RocPoint> roc_points(const Vector& scores, const std::vector<bool>& positive);

/// Trapezoidal area under the points.
double auc(const std::vector<RocPoint>& points);

/// Area over the pooled (sample, class) indicators of an n x 2 probability
/// matrix.
double auc_micro(const Matrix& probabilities, const Labels& truth);

struct MetricsReport {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, 2> per_class{};
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_sensitivity = 0.0;
  double macro_specificity = 0.0;
  double macro_f1 = 0.0;
  Coefficient mcc;
  Coefficient kappa;
  std::array<double, 2> class_auc{};
  double macro_auc = 0.0;
  double micro_auc = 0.0;
  std::array<std::vector<RocPoint>, 2> roc;  // one-vs-rest per class
};

/// All metrics from class probabilities (n x 2) and the argmax labels.
MetricsReport evaluate_predictions(const Matrix& probabilities, const Labels& predicted, const Labels& truth);

/// `fpr,tpr,threshold`
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points);

}  // namespace chdnet
