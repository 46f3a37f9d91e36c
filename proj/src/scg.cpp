#include "chdnet/scg.hpp"

#include "chdnet/linear.hpp"

#include <cmath>
#include <ostream>

namespace chdnet {

ScgMinimizer::ScgMinimizer(Objective objective, Vector start, ScgOptions options)
    : obj_(std::move(objective)), opt_(options), w_(std::move(start)), lambda_(options.lambda) {
  f_ = obj_.value_and_gradient(w_, g_);
  if (!std::isfinite(f_)) throw Error(ErrorKind::Numeric, "objective is not finite at the starting point");
  r_ = -g_;
  p_ = r_;
}

ScgMinimizer::Step ScgMinimizer::step() {
  ++iterations_;
  const double p_sq = p_.squaredNorm();
  if (p_sq == 0.0) return {};

  if (success_) {
    const double sigma_k = opt_.sigma / std::sqrt(p_sq);
    Vector g_probe;
    obj_.value_and_gradient(w_ + sigma_k * p_, g_probe);
    s_ = (g_probe - g_) / sigma_k;
    delta_ = p_.dot(s_);
  }

  delta_ += (lambda_ - lambda_bar_) * p_sq;
  if (delta_ <= 0.0) {
    // force a positive definite curvature estimate
    lambda_bar_ = 2.0 * (lambda_ - delta_ / p_sq);
    delta_ = -delta_ + lambda_ * p_sq;
    lambda_ = lambda_bar_;
  }

  const double mu = p_.dot(r_);
  if (mu <= 0.0) {
    // lost descent: restart from steepest descent without moving
    p_ = r_;
    success_ = true;
    lambda_bar_ = 0.0;
    return {};
  }
  const double alpha = mu / delta_;
  const Vector w_new = w_ + alpha * p_;
  const double f_new = obj_.value(w_new);
  const double comparison = std::isfinite(f_new) ? 2.0 * delta_ * (f_ - f_new) / (mu * mu) : -1.0;

  Step result{false, comparison};
  if (comparison >= 0.0) {
    w_ = w_new;
    Vector g_new;
    f_ = obj_.value_and_gradient(w_, g_new);
    const Vector r_new = -g_new;
    g_ = std::move(g_new);
    lambda_bar_ = 0.0;
    success_ = true;
    if (++since_restart_ >= static_cast<std::size_t>(w_.size())) {
      since_restart_ = 0;
      p_ = r_new;
    } else {
      const double beta = (r_new.squaredNorm() - r_new.dot(r_)) / mu;
      p_ = r_new + beta * p_;
    }
    r_ = r_new;
    if (comparison >= 0.75) lambda_ *= 0.25;
    result.accepted = true;
  } else {
    lambda_bar_ = lambda_;
    success_ = false;
  }
  if (comparison < 0.25) lambda_ += delta_ * (1.0 - comparison) / p_sq;
  return result;
}

Vector scg_minimize(const Objective& objective, Vector start, std::size_t max_iterations, double gradient_tolerance,
                    ScgOptions options) {
  ScgMinimizer scg(objective, std::move(start), options);
  while (scg.iterations() < max_iterations && scg.gradient_norm() >= gradient_tolerance) scg.step();
  return scg.position();
}

bool EarlyStopping::observe(std::size_t epoch, double val_loss, const Vector& parameters) {
  if (!seen_ || val_loss < best_loss_) {
    seen_ = true;
    best_loss_ = val_loss;
    best_epoch_ = epoch;
    best_params_ = parameters;
    fails_ = 0;
    return true;
  }
  ++fails_;
  return false;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::EarlyStop: return "early_stop";
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::GradientConverged: return "gradient_converged";
  }
  return "max_epochs";
}

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> v;
  if (max_epochs < 1) v.emplace_back("train.max_epochs must be >= 1");
  if (max_fail < 1) v.emplace_back("train.max_fail must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) v.emplace_back("train.gamma must lie in [0, 1)");
  if (!(scg.sigma > 0.0)) v.emplace_back("train.sigma must be > 0");
  if (!(scg.lambda > 0.0)) v.emplace_back("train.lambda must be > 0");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    v.emplace_back("train.validation_fraction must lie in (0, 1)");
  return v;
}

TrainResult scg_train(const MlpModel& start, const Matrix& x_train, const Labels& y_train, const Matrix& x_val,
                      const Labels& y_val, const TrainConfig& cfg) {
  if (x_train.rows() == 0 || x_val.rows() == 0) throw Error(ErrorKind::InvalidInput, "empty training or validation set");
  const Matrix t_train = one_hot(y_train);
  const Matrix t_val = one_hot(y_val);
  const double gamma = cfg.gamma;
  const MlpModel& shape = start;

  Objective objective{
      [&](const Vector& w) { return loss(shape.with_parameters(w), x_train, t_train, gamma); },
      [&](const Vector& w, Vector& g) { return loss_and_gradient(shape.with_parameters(w), x_train, t_train, gamma, g); },
  };

  TrainResult out;
  auto& h = out.history;
  EarlyStopping monitor(cfg.max_fail);
  ScgMinimizer scg(objective, start.parameters(), cfg.scg);

  auto record = [&](std::size_t epoch) {
    const MlpModel current = shape.with_parameters(scg.position());
    const double train_loss = scg.value();
    const double val_loss = loss(current, x_val, t_val, gamma);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw Error(ErrorKind::Numeric, "loss diverged at epoch " + std::to_string(epoch));
    h.train_loss.push_back(train_loss);
    h.val_loss.push_back(val_loss);
    h.train_accuracy.push_back(accuracy(y_train, predict(current, x_train)));
    h.val_accuracy.push_back(accuracy(y_val, predict(current, x_val)));
    monitor.observe(epoch, val_loss, scg.position());
  };

  record(0);
  for (std::size_t epoch = 1;; ++epoch) {
    if (scg.gradient_norm() < cfg.gradient_tolerance) {
      h.stop_reason = StopReason::GradientConverged;
      break;
    }
    if (epoch > cfg.max_epochs) {
      h.stop_reason = StopReason::MaxEpochs;
      break;
    }
    scg.step();
    record(epoch);
    if (monitor.should_stop()) {
      h.stop_reason = StopReason::EarlyStop;
      break;
    }
  }
  h.best_epoch = monitor.best_epoch();
  out.model = shape.with_parameters(monitor.best_parameters());
  return out;
}

void write_learning_curve_csv(std::ostream& out, const TrainingHistory& h) {
  out << "epoch,train_loss,val_loss,train_acc,val_acc\n";
  for (std::size_t e = 0; e < h.epochs(); ++e)
    out << e << ',' << format_double(h.train_loss[e]) << ',' << format_double(h.val_loss[e]) << ','
        << format_double(h.train_accuracy[e]) << ',' << format_double(h.val_accuracy[e]) << '\n';
}

}  // namespace chdnet
