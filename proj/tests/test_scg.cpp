#include "chdnet/scg.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace chdnet;

TEST_CASE("scg minimizes a convex quadratic") {
  const Index n = 30;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix q(n, n);
  for (Index i = 0; i < q.size(); ++i) q(i) = g(rng);
  const Matrix a = q.transpose() * q / double(n) + 0.1 * Matrix::Identity(n, n);
  Vector b(n);
  for (Index i = 0; i < n; ++i) b(i) = g(rng);
  const Vector opt = a.ldlt().solve(b);
  const double f_opt = 0.5 * opt.dot(a * opt) - b.dot(opt);

  Objective obj{[&](const Vector& x) { return 0.5 * x.dot(a * x) - b.dot(x); },
                [&](const Vector& x, Vector& grad) {
                  grad = a * x - b;
                  return 0.5 * x.dot(a * x) - b.dot(x);
                }};
  ScgMinimizer scg(obj, Vector::Zero(n));
  double previous = scg.value();
  while (scg.iterations() < std::size_t(5 * n) && scg.gradient_norm() >= 1e-10) {
    const auto step = scg.step();
    // below the rounding floor of f an accepted step may leave the value unchanged
    if (step.accepted && previous - f_opt > 1e-12) CHECK(scg.value() < previous);
    previous = scg.value();
  }
  CHECK(scg.value() - f_opt < 1e-10);
}

TEST_CASE("early stopping rule trace") {
  const std::vector<double> val{1.0, 0.9, 0.8, 0.85, 0.86, 0.87, 0.88, 0.89, 0.9};
  EarlyStopping es(6);
  std::size_t stopped_at = 0;
  for (std::size_t e = 1; e <= val.size(); ++e) {
    es.observe(e, val[e - 1], Vector::Constant(1, double(e)));
    if (es.should_stop()) {
      stopped_at = e;
      break;
    }
  }
  CHECK(stopped_at == 9);
  CHECK(es.best_epoch() == 3);
  CHECK(es.best_parameters()(0) == 3.0);
  CHECK(es.best_loss() == 0.8);

  EarlyStopping equal(2);
  equal.observe(0, 1.0, Vector::Zero(1));
  CHECK_FALSE(equal.observe(1, 1.0, Vector::Ones(1)));  // ties are not improvements
  CHECK(equal.fails() == 1);
}

namespace {

struct Xor {
  Matrix x{4, 2};
  Labels y{Label::Case, Label::Control, Label::Control, Label::Case};
  Xor() { x << -1, -1, -1, 1, 1, -1, 1, 1; }
};

}  // namespace

TEST_CASE("scg_train on XOR") {
  Xor data;
  TrainConfig cfg;
  cfg.gamma = 0.0;
  cfg.max_fail = 200;
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto start = init_model({2, 4, 2}, seed);
    auto r = scg_train(start, data.x, data.y, data.x, data.y, cfg);
    const auto& acc = r.history.train_accuracy;
    solved += std::find(acc.begin(), acc.end(), 1.0) != acc.end();
  }
  CHECK(solved >= 9);
}

TEST_CASE("scg_train history, snapshot integrity and stop reasons") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(60, 3), xv(20, 3);
  Labels y, yv;
  for (Index i = 0; i < 80; ++i) {
    const bool ctrl = i % 2;
    Matrix& m = i < 60 ? x : xv;
    const Index r = i < 60 ? i : i - 60;
    for (Index j = 0; j < 3; ++j) m(r, j) = g(rng) + (ctrl ? 0.8 : 0.0);
    (i < 60 ? y : yv).push_back(ctrl ? Label::Control : Label::Case);
  }
  TrainConfig cfg;
  cfg.max_epochs = 150;
  auto start = init_model({3, 10, 10, 2}, 4);
  auto r = scg_train(start, x, y, xv, yv, cfg);
  const auto& h = r.history;
  CHECK(h.val_loss.size() == h.epochs());
  CHECK(h.train_accuracy.size() == h.epochs());
  CHECK(h.val_accuracy.size() == h.epochs());
  const auto best = std::min_element(h.val_loss.begin(), h.val_loss.end());
  CHECK(std::size_t(best - h.val_loss.begin()) == h.best_epoch);
  CHECK(loss(r.model, xv, one_hot(yv), cfg.gamma) == h.val_loss[h.best_epoch]);
  CHECK(h.train_loss[h.best_epoch] <= h.train_loss[0]);
  switch (h.stop_reason) {
    case StopReason::EarlyStop: CHECK(h.epochs() - 1 - h.best_epoch == cfg.max_fail); break;
    case StopReason::MaxEpochs: CHECK(h.epochs() == cfg.max_epochs + 1); break;
    case StopReason::GradientConverged: break;
  }

  std::ostringstream csv;
  write_learning_curve_csv(csv, h);
  CHECK(csv.str().rfind("epoch,train_loss,val_loss,train_acc,val_acc\n0,", 0) == 0);

  TrainConfig unlimited = cfg;
  unlimited.max_fail = 1000000;
  unlimited.max_epochs = 40;
  auto u = scg_train(start, x, y, xv, yv, unlimited);
  CHECK(u.history.stop_reason == StopReason::MaxEpochs);
  CHECK(u.history.epochs() == 41);
  CHECK(u.history.train_loss[u.history.best_epoch] <= u.history.train_loss[0]);
}

TEST_CASE("TrainConfig validation lists every violation") {
  TrainConfig bad;
  bad.max_fail = 0;
  bad.gamma = 1.0;
  bad.validation_fraction = 0.0;
  CHECK(bad.violations().size() == 3);
  CHECK(TrainConfig{}.violations().empty());
}
