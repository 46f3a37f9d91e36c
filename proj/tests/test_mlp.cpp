#include "chdnet/mlp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace chdnet;

namespace {

Matrix random_matrix(Index r, Index c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = g(rng);
  return m;
}

MlpModel perturbed(const std::vector<Index>& sizes, std::uint64_t seed) {
  auto m = init_model(sizes, seed);
  Vector p = m.parameters() + 0.1 * random_matrix(m.parameters().size(), 1, seed + 1000);
  return m.with_parameters(p);
}

}  // namespace

TEST_CASE("init_model shapes, bounds and determinism") {
  auto m = init_model({4, 60, 60, 60, 2}, 1);
  CHECK(m.weights(0).rows() == 60);
  CHECK(m.weights(0).cols() == 4);
  CHECK(m.weights(1).rows() == 60);
  CHECK(m.weights(1).cols() == 60);
  CHECK(m.weights(2).rows() == 60);
  CHECK(m.weights(3).rows() == 2);
  CHECK(m.weights(3).cols() == 60);
  CHECK(m.weight_count() == 4 * 60 + 60 * 60 * 2 + 60 * 2);
  CHECK(m.parameters() == init_model({4, 60, 60, 60, 2}, 1).parameters());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = init_model({7, 13, 5, 2}, seed);
    for (std::size_t l = 0; l < s.depth(); ++l) {
      const double bound = std::sqrt(6.0 / double(s.weights(l).rows() + s.weights(l).cols()));
      CHECK(s.weights(l).cwiseAbs().maxCoeff() <= bound);
      CHECK(s.bias(l).isZero());
    }
  }
  CHECK_THROWS_AS(MlpModel({3, 2}, Vector::Zero(3)), Error);
}

TEST_CASE("tansig and forward") {
  CHECK(tansig(0.0) == 0.0);
  CHECK(tansig(1.0) == doctest::Approx(0.761594).epsilon(1e-6));
  Eigen::Array3d z(-2.0, 0.5, 3.0);
  const Eigen::Array3d t = tansig(z);
  CHECK((t - z.tanh()).abs().maxCoeff() < 1e-15);

  MlpModel zero({3, 5, 2}, Vector::Zero(MlpModel::parameter_count({3, 5, 2})));
  const Matrix p0 = forward(zero, random_matrix(4, 3, 2));
  CHECK((p0.array() - 0.5).abs().maxCoeff() == 0.0);

  auto m = perturbed({6, 60, 60, 60, 2}, 3);
  const Matrix p = forward(m, random_matrix(1000, 6, 4, 2.0));
  CHECK(p.minCoeff() > 0.0);
  CHECK(p.maxCoeff() < 1.0);
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(forward(m, Matrix::Zero(2, 5)), Error);
}

TEST_CASE("predict agrees with argmax of predict_proba; ties go to case") {
  auto m = perturbed({5, 8, 2}, 7);
  const Matrix x = random_matrix(1000, 5, 8, 3.0);
  const Matrix p = predict_proba(m, x);
  const Labels y = predict(m, x);
  for (Index i = 0; i < p.rows(); ++i)
    CHECK(y[std::size_t(i)] == (p(i, 1) > p(i, 0) ? Label::Control : Label::Case));
  MlpModel zero({2, 2}, Vector::Zero(6));
  CHECK(predict(zero, Matrix::Ones(1, 2)) == Labels{Label::Case});
}

TEST_CASE("loss closed forms") {
  MlpModel zero({3, 4, 2}, Vector::Zero(MlpModel::parameter_count({3, 4, 2})));
  const Matrix x = random_matrix(10, 3, 1);
  Labels y(10, Label::Case);
  std::fill(y.begin() + 5, y.end(), Label::Control);
  CHECK(loss(zero, x, one_hot(y), 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(loss(zero, x, one_hot(y), 0.0) - std::log(2.0)) < 1e-9);

  auto m = perturbed({3, 4, 2}, 2);
  double msw = 0.0;
  for (std::size_t l = 0; l < m.depth(); ++l) msw += m.weights(l).squaredNorm();
  msw /= double(m.weight_count());
  CHECK(loss(m, x, one_hot(y), 1.0) == doctest::Approx(msw).epsilon(1e-15));

  // saturated, correct predictions: cross-entropy at the floor
  Vector p = Vector::Zero(MlpModel::parameter_count({1, 2}));
  p << 0.0, 0.0, 100.0, -100.0;  // W = [0; 0], b = [100, -100]
  MlpModel sure({1, 2}, p);
  CHECK(loss(sure, Matrix::Zero(3, 1), one_hot(Labels(3, Label::Case)), 0.0) <= -std::log(kLogFloor));
  CHECK(loss(sure, Matrix::Zero(3, 1), one_hot(Labels(3, Label::Case)), 0.0) < 1e-12);
}

TEST_CASE("gradient matches central differences on a 4-2-2 net") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = perturbed({4, 2, 2}, seed);
    const Matrix x = random_matrix(6, 4, seed + 50);
    Labels y{Label::Case, Label::Control, Label::Control, Label::Case, Label::Control, Label::Case};
    const Matrix t = one_hot(y);
    const Vector analytic = gradient(m, x, t, 0.1);
    const Vector numeric = oracle::central_difference(
        [&](const Vector& w) { return loss(m.with_parameters(w), x, t, 0.1); }, m.parameters(), 1e-5);
    CHECK(oracle::max_relative_error(analytic, numeric, 1e-300) < 1e-6);
  }
}

TEST_CASE("gradient symmetry and the weight-decay term") {
  MlpModel zero({2, 3, 2}, Vector::Zero(MlpModel::parameter_count({2, 3, 2})));
  Matrix x(2, 2);
  x << 1, 2, -1, -2;
  const Vector g = gradient(zero, x, one_hot({Label::Case, Label::Control}), 0.1);
  CHECK(g.tail(2).cwiseAbs().maxCoeff() < 1e-15);

  // gamma = 1: gradient is 2 w / W_count for weights and 0 for biases
  auto m = perturbed({3, 4, 2}, 9);
  const Vector gr = gradient(m, random_matrix(5, 3, 10), one_hot(Labels(5, Label::Case)), 1.0);
  const double scale = 2.0 / double(m.weight_count());
  Index off = 0;
  for (std::size_t l = 0; l < m.depth(); ++l) {
    const auto w = m.weights(l);
    const Eigen::Map<const Vector> flat(w.data(), w.size());
    CHECK((gr.segment(off, w.size()) - scale * flat).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(gr.segment(off + w.size(), w.rows()).isZero());
    off += w.size() + w.rows();
  }
}
