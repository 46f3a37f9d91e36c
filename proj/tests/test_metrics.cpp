#include "chdnet/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace chdnet;

namespace {

ConfusionMatrix make_cm(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn) {
  ConfusionMatrix cm;
  cm.counts = {{{tp, fn}, {fp, tn}}};
  return cm;
}

std::vector<bool> as_positive(const std::vector<int>& v) { return std::vector<bool>(v.begin(), v.end()); }

}  // namespace

TEST_CASE("confusion counts") {
  Labels truth, pred;
  for (int i = 0; i < 34; ++i) {
    truth.push_back(Label::Case);
    pred.push_back(i == 0 ? Label::Control : Label::Case);
  }
  for (int i = 0; i < 35; ++i) {
    truth.push_back(Label::Control);
    pred.push_back(i < 2 ? Label::Case : Label::Control);
  }
  auto cm = confusion(truth, pred);
  CHECK(cm.counts[0][0] == 33);
  CHECK(cm.counts[0][1] == 1);
  CHECK(cm.counts[1][0] == 2);
  CHECK(cm.counts[1][1] == 33);
  CHECK(cm.total() == 69);
  auto perfect = confusion(truth, truth);
  CHECK(perfect.counts[0][1] + perfect.counts[1][0] == 0);
  CHECK_THROWS_AS(confusion(truth, Labels{}), Error);
}

TEST_CASE("class metrics on the published matrix") {
  auto cm = make_cm(33, 1, 2, 33);
  auto c1 = class_metrics(cm, Label::Case);
  CHECK(c1.precision == doctest::Approx(33.0 / 35.0));
  CHECK(c1.sensitivity == doctest::Approx(33.0 / 34.0));
  CHECK(c1.specificity == doctest::Approx(33.0 / 35.0));
  CHECK(std::abs(c1.f1 - 0.9565) < 5e-5);
  auto c2 = class_metrics(cm, Label::Control);
  CHECK(c2.precision == doctest::Approx(33.0 / 34.0));
  CHECK(std::abs(c2.sensitivity - 0.9429) < 5e-5);
  CHECK(std::abs(overall_accuracy(cm) - 0.9565) < 5e-5);
  CHECK(mcc(cm).value == doctest::Approx(1087.0 / 1190.0).epsilon(1e-14));
  CHECK(std::abs(kappa(cm).value - 0.9131) < 5e-5);
}

TEST_CASE("degenerate conventions") {
  auto all_case = make_cm(10, 0, 10, 0);
  auto ctrl = class_metrics(all_case, Label::Control);
  CHECK(ctrl.precision == 0.0);
  CHECK(ctrl.degenerate);
  CHECK(mcc(all_case).value == 0.0);
  CHECK(mcc(all_case).degenerate);
  auto perfect = make_cm(7, 0, 0, 7);
  CHECK(mcc(perfect).value == 1.0);
  CHECK(kappa(perfect).value == 1.0);
  auto c = class_metrics(perfect, Label::Case);
  CHECK((c.precision == 1.0 && c.sensitivity == 1.0 && c.specificity == 1.0 && c.f1 == 1.0));
  auto chance = make_cm(25, 25, 25, 25);
  CHECK(mcc(chance).value == 0.0);
  CHECK(kappa(chance).value == 0.0);
}

TEST_CASE("metrics agree with the textbook formulas on random matrices") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    auto cm = make_cm(rng() % 40, rng() % 40, rng() % 40, rng() % 40);
    if (cm.total() == 0) continue;
    const oracle::BinaryFormulas ref{double(cm.counts[0][0]), double(cm.counts[0][1]), double(cm.counts[1][0]),
                                     double(cm.counts[1][1])};
    const auto m = class_metrics(cm, Label::Case);
    CHECK(m.precision == doctest::Approx(ref.precision()).epsilon(1e-12));
    CHECK(m.sensitivity == doctest::Approx(ref.recall()).epsilon(1e-12));
    CHECK(m.specificity == doctest::Approx(ref.specificity()).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(ref.f1()).epsilon(1e-12));
    CHECK(overall_accuracy(cm) == doctest::Approx(ref.accuracy()).epsilon(1e-12));
    CHECK(mcc(cm).value == doctest::Approx(ref.mcc()).epsilon(1e-12));
    CHECK(kappa(cm).value == doctest::Approx(ref.kappa()).epsilon(1e-12));
    CHECK(mcc(cm).value >= -1.0);
    CHECK(mcc(cm).value <= 1.0);
  }
}

TEST_CASE("roc and auc examples") {
  Vector s(4);
  s << 0.1, 0.4, 0.35, 0.8;
  const auto pos = as_positive({0, 0, 1, 1});
  CHECK(auc(roc_points(s, pos)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(auc(roc_points(-s, pos)) == doctest::Approx(0.25).epsilon(1e-15));

  Vector sep(4);
  sep << 0.9, 0.8, 0.2, 0.1;
  auto pts = roc_points(sep, as_positive({1, 1, 0, 0}));
  CHECK(auc(pts) == 1.0);
  bool through_corner = false;
  for (auto& p : pts) through_corner = through_corner || (p.fpr == 0.0 && p.tpr == 1.0);
  CHECK(through_corner);
  CHECK(auc({{0, 0, 1}, {1, 1, 0}}) == 0.5);

  Vector tied = Vector::Constant(6, 0.3);
  auto tp = roc_points(tied, as_positive({1, 0, 1, 0, 0, 1}));
  CHECK(tp.size() == 2);
  CHECK(auc(tp) == 0.5);
}

TEST_CASE("roc properties over random tied scores") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    Vector s(static_cast<Index>(n));
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s(Index(i)) = double(rng() % 8) / 7.0;
      pos[i] = rng() % 2;
    }
    pos[0] = true;
    pos[1] = false;
    auto pts = roc_points(s, pos);
    CHECK(pts.front().fpr == 0.0);
    CHECK(pts.front().tpr == 0.0);
    CHECK(pts.back().fpr == 1.0);
    CHECK(pts.back().tpr == 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].fpr >= pts[i - 1].fpr);
      CHECK(pts[i].tpr >= pts[i - 1].tpr);
    }
    const double a = auc(pts);
    const Vector flipped = (1.0 - s.array()).matrix();
    CHECK(a + auc(roc_points(flipped, pos)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("micro AUC matches the pooled rank-sum oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 40;
    Matrix p(static_cast<Index>(n), 2);
    Labels y(n);
    std::vector<double> pooled;
    std::vector<bool> ind;
    for (std::size_t i = 0; i < n; ++i) {
      const double pc = double(rng() % 11) / 10.0;
      p(Index(i), 0) = pc;
      p(Index(i), 1) = 1.0 - pc;
      y[i] = i % 2 ? Label::Control : Label::Case;
      pooled.insert(pooled.end(), {pc, 1.0 - pc});
      ind.insert(ind.end(), {y[i] == Label::Case, y[i] == Label::Control});
    }
    CHECK(std::abs(auc_micro(p, y) - oracle::rank_sum_auc(pooled, ind)) < 1e-12);
  }
}

TEST_CASE("evaluate_predictions: complementary scores give equal class AUCs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix p(50, 2);
  Labels y, pred;
  for (Index i = 0; i < 50; ++i) {
    y.push_back(i % 2 ? Label::Control : Label::Case);
    p(i, 0) = std::clamp(u(rng) + (i % 2 ? -0.3 : 0.3), 0.0, 1.0);
    p(i, 1) = 1.0 - p(i, 0);
    pred.push_back(p(i, 1) > p(i, 0) ? Label::Control : Label::Case);
  }
  auto r = evaluate_predictions(p, pred, y);
  CHECK(r.class_auc[0] == doctest::Approx(r.class_auc[1]).epsilon(1e-12));
  CHECK(r.macro_auc == doctest::Approx(r.class_auc[0]).epsilon(1e-12));
  std::ostringstream csv;
  write_roc_csv(csv, r.roc[0]);
  CHECK(csv.str().rfind("fpr,tpr,threshold\n0,0,inf\n", 0) == 0);
}
