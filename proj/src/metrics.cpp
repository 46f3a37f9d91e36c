#include "chdnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace chdnet {

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    throw Error(ErrorKind::Dimension, "confusion needs equal, non-empty label lists");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[class_index(truth[i])][class_index(predicted[i])];
  return cm;
}

namespace {

double ratio(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

}  // namespace

ClassMetrics class_metrics(const ConfusionMatrix& cm, Label positive) {
  const Label negative = other(positive);
  const double tp = double(cm(positive, positive));
  const double fn = double(cm(positive, negative));
  const double fp = double(cm(negative, positive));
  const double tn = double(cm(negative, negative));
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp, m.degenerate);
  m.sensitivity = ratio(tp, tp + fn, m.degenerate);
  m.specificity = ratio(tn, tn + fp, m.degenerate);
  m.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn, m.degenerate);
  return m;
}

double overall_accuracy(const ConfusionMatrix& cm) {
  return double(cm.counts[0][0] + cm.counts[1][1]) / double(cm.total());
}

Coefficient mcc(const ConfusionMatrix& cm) {
  const double tp = double(cm.counts[0][0]), fn = double(cm.counts[0][1]);
  const double fp = double(cm.counts[1][0]), tn = double(cm.counts[1][1]);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return {0.0, true};
  return {(tp * tn - fp * fn) / std::sqrt(den), false};
}

Coefficient kappa(const ConfusionMatrix& cm) {
  const double n = double(cm.total());
  const double observed = overall_accuracy(cm);
  double expected = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double row = double(cm.counts[c][0] + cm.counts[c][1]);
    const double col = double(cm.counts[0][c] + cm.counts[1][c]);
    expected += row * col;
  }
  expected /= n * n;
  if (expected == 1.0) return {0.0, true};
  return {(observed - expected) / (1.0 - expected), false};
}

std::vector<RocPoint> roc_points(const Vector& scores, const std::vector<bool>& positive) {
  if (static_cast<std::size_t>(scores.size()) != positive.size())
    throw Error(ErrorKind::Dimension, "score and label counts differ");
  if (!scores.allFinite()) throw Error(ErrorKind::InvalidInput, "ROC scores must be finite");
  const auto n_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const auto n_neg = static_cast<double>(positive.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw Error(ErrorKind::InvalidInput, "ROC needs both classes present");

  std::vector<std::size_t> order(positive.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores(Index(a)) > scores(Index(b)); });

  std::vector<RocPoint> pts{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores(Index(order[i]));
    for (; i < order.size() && scores(Index(order[i])) == threshold; ++i) (positive[order[i]] ? tp : fp) += 1.0;
    pts.push_back({fp / n_neg, tp / n_pos, threshold});
  }
  return pts;
}

double auc(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

double auc_micro(const Matrix& probabilities, const Labels& truth) {
  const auto n = static_cast<std::size_t>(probabilities.rows());
  if (n != truth.size() || probabilities.cols() != 2) throw Error(ErrorKind::Dimension, "probability matrix shape");
  Vector pooled(Index(2 * n));
  std::vector<bool> indicator(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) {
      pooled(Index(2 * i + c)) = probabilities(Index(i), c);
      indicator[2 * i + c] = class_index(truth[i]) == c;
    }
  return auc(roc_points(pooled, indicator));
}

MetricsReport evaluate_predictions(const Matrix& probabilities, const Labels& predicted, const Labels& truth) {
  MetricsReport r;
  r.confusion = confusion(truth, predicted);
  r.per_class = {class_metrics(r.confusion, Label::Case), class_metrics(r.confusion, Label::Control)};
  r.accuracy = overall_accuracy(r.confusion);
  r.macro_precision = 0.5 * (r.per_class[0].precision + r.per_class[1].precision);
  r.macro_sensitivity = 0.5 * (r.per_class[0].sensitivity + r.per_class[1].sensitivity);
  r.macro_specificity = 0.5 * (r.per_class[0].specificity + r.per_class[1].specificity);
  r.macro_f1 = 0.5 * (r.per_class[0].f1 + r.per_class[1].f1);
  r.mcc = mcc(r.confusion);
  r.kappa = kappa(r.confusion);

  const auto counts = count_classes(truth);
  if (counts.cases > 0 && counts.controls > 0) {
    for (int c = 0; c < 2; ++c) {
      std::vector<bool> positive(truth.size());
      for (std::size_t i = 0; i < truth.size(); ++i) positive[i] = class_index(truth[i]) == c;
      r.roc[c] = roc_points(probabilities.col(c), positive);
      r.class_auc[c] = auc(r.roc[c]);
    }
    r.macro_auc = 0.5 * (r.class_auc[0] + r.class_auc[1]);
    r.micro_auc = auc_micro(probabilities, truth);
  }
  return r;
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points) {
  out << "fpr,tpr,threshold\n";
  for (const auto& p : points)
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
        << (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) << '\n';
}

}  // namespace chdnet
