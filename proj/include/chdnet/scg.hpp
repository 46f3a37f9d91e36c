#pragma once

#include "chdnet/mlp.hpp"

#include <functional>
#include <string_view>

namespace chdnet {

/// Differentiable objective over a flat parameter vector.
struct Objective {
  std::function<double(const Vector&)> value;
  /// Returns the value and writes the gradient.
  std::function<double(const Vector&, Vector&)> value_and_gradient;
};

struct ScgOptions {
  double sigma = 5e-5;
  double lambda = 5e-7;
};

/// Moller's scaled conjugate gradient, one iteration per step() call.
///
/// The curvature along the search direction comes from a finite difference
/// of gradients; lambda acts as a Levenberg-Marquardt style trust region
/// driven by the comparison ratio between predicted and actual decrease.
/// Every (number of parameters) successful steps the direction restarts at
/// steepest descent.
class ScgMinimizer {
 public:
  ScgMinimizer(Objective objective, Vector start, ScgOptions options = {});

  struct Step {
    bool accepted = false;
    double comparison = 0.0;  // Delta in Moller's notation
  };

  Step step();

  const Vector& position() const { return w_; }
  double value() const { return f_; }
  const Vector& gradient() const { return g_; }
  double gradient_norm() const { return g_.norm(); }
  double lambda() const { return lambda_; }
  std::size_t iterations() const { return iterations_; }

 private:
  Objective obj_;
  ScgOptions opt_;
  Vector w_, g_, r_, p_;
  double f_ = 0.0;
  double lambda_ = 0.0;
  double lambda_bar_ = 0.0;
  double delta_ = 0.0;
  Vector s_;
  bool success_ = true;
  std::size_t iterations_ = 0;
  std::size_t since_restart_ = 0;
};

/// Runs SCG until the gradient norm drops below `gradient_tolerance` or
/// `max_iterations` is reached.
Vector scg_minimize(const Objective& objective, Vector start, std::size_t max_iterations,
                    double gradient_tolerance = 1e-7, ScgOptions options = {});

/// Validation-loss monitor: tracks the best epoch and counts consecutive
/// epochs without strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t max_fail) : max_fail_(max_fail) {}

  /// Returns true when `val_loss` is a new strict minimum.
  bool observe(std::size_t epoch, double val_loss, const Vector& parameters);
  bool should_stop() const { return fails_ >= max_fail_; }

  std::size_t fails() const { return fails_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  const Vector& best_parameters() const { return best_params_; }

 private:
  std::size_t max_fail_;
  std::size_t fails_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = 0.0;
  bool seen_ = false;
  Vector best_params_;
};

enum class StopReason { EarlyStop, MaxEpochs, GradientConverged };

std::string_view to_string(StopReason r);

struct TrainConfig {
  std::size_t max_epochs = 200;
  std::size_t max_fail = 6;
  double gamma = 0.1;
  ScgOptions scg;
  double validation_fraction = 0.2;
  double gradient_tolerance = 1e-7;
  std::uint64_t seed = 0;

  std::vector<std::string> violations() const;
};

/// Per-epoch curves; index 0 is the untrained model.
struct TrainingHistory {
  std::vector<double> train_loss, val_loss, train_accuracy, val_accuracy;
  std::size_t best_epoch = 0;
  StopReason stop_reason = StopReason::MaxEpochs;

  std::size_t epochs() const { return train_loss.size(); }
};

struct TrainResult {
  MlpModel model;  // parameters at best_epoch
  TrainingHistory history;
};

/// Full-batch SCG on the regularized loss, one iteration per epoch, with
/// validation early stopping. Inputs are expected to be standardized.
TrainResult scg_train(const MlpModel& start, const Matrix& x_train, const Labels& y_train, const Matrix& x_val,
                      const Labels& y_val, const TrainConfig& cfg);

/// `epoch,train_loss,val_loss,train_acc,val_acc`
void write_learning_curve_csv(std::ostream& out, const TrainingHistory& history);

}  // namespace chdnet
