#include "sketchls/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sketchls {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxConsecutiveFailures = 10;
}  // namespace

void SolverConfig::validate() const {
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0)) {
    throw std::invalid_argument("solver: need 0 < eta1 < eta2 < 1");
  }
  if (!(0.0 < gamma_dec && gamma_dec < 1.0 && gamma_inc > 1.0)) {
    throw std::invalid_argument("solver: need 0 < gamma_dec < 1 < gamma_inc");
  }
  if (!(delta_min > 0.0) || !(delta_max > 0.0)) {
    throw std::invalid_argument("solver: radius bounds must be positive");
  }
  if (delta0.has_value()) {
    if (!(*delta0 > delta_min && *delta0 <= delta_max)) {
      throw std::invalid_argument(
          "solver: need delta_min < delta0 <= delta_max");
    }
  } else if (!(delta_min < delta_max)) {
    throw std::invalid_argument("solver: need delta_min < delta_max");
  }
  if (max_evals < 1) {
    throw std::invalid_argument("solver: max_evals must be positive");
  }
  if (!(max_time_s > 0.0)) {
    throw std::invalid_argument("solver: max_time must be positive");
  }
  sketch.validate();
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::budget_exhausted: return "budget_exhausted";
    case SolveStatus::time_exhausted: return "time_exhausted";
    case SolveStatus::radius_converged: return "radius_converged";
    case SolveStatus::criticality: return "criticality";
    case SolveStatus::eval_failure: return "eval_failure";
  }
  return "unknown";
}

std::optional<double> compute_rho(double f_old, double f_new,
                                  double predicted_decrease) {
  if (predicted_decrease <= 1e-15 * std::max(1.0, std::abs(f_old))) {
    return std::nullopt;
  }
  return (f_old - f_new) / predicted_decrease;
}

double update_radius(double delta, std::optional<double> rho,
                     const SolverConfig& config) {
  if (rho.has_value() && *rho >= config.eta2) {
    return std::min(config.gamma_inc * delta, config.delta_max);
  }
  if (rho.has_value() && *rho >= config.eta1) {
    return delta;
  }
  return config.gamma_dec * delta;
}

Solver::Solver(Problem problem, SolverConfig config)
    : problem_(std::move(problem)), config_(std::move(config)),
      rng_(config_.seed) {
  config_.validate();
  if (problem_.dim < 1 || problem_.n_residuals < problem_.dim) {
    throw std::invalid_argument(
        "solver: problem needs n_residuals >= dim >= 1");
  }
  if (problem_.x0.size() != problem_.dim) {
    throw std::invalid_argument("solver: start point dimension mismatch");
  }
  delta_ = config_.delta0.value_or(
      0.1 * std::max(problem_.x0.lpNorm<Eigen::Infinity>(), 1.0));
  if (!(delta_ > config_.delta_min && delta_ <= config_.delta_max)) {
    throw std::invalid_argument(
        "solver: initial radius " + std::to_string(delta_) +
        " is outside (delta_min, delta_max]");
  }
  start_time_ = std::chrono::steady_clock::now();
}

double Solver::elapsed_s() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start_time_).count();
}

Eigen::VectorXd Solver::evaluate(const Eigen::VectorXd& x) {
  ScopedTimer timer(&timers_, Task::eval);
  ++n_evals_;
  Eigen::VectorXd r = problem_.residual(x);
  if (r.allFinite()) {
    const double f = 0.5 * r.squaredNorm();
    if (f < best_f_) {
      best_f_ = f;
      best_x_ = x;
    }
  }
  return r;
}

ResidualFn Solver::evaluator() {
  return [this](const Eigen::Ref<const Eigen::VectorXd>& x) {
    return evaluate(x);
  };
}

void Solver::initialize() {
  start_time_ = std::chrono::steady_clock::now();
  const auto t0 = start_time_;
  const TaskTimers before = timers_;
  set_ = init_set(problem_, problem_.x0, delta_, evaluator());
  initialized_ = true;
  // Everything in set construction beyond the evaluations is bookkeeping.
  const double wall = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count();
  const double tracked = timers_.total() - before.total();
  timers_.add(Task::other, std::max(0.0, wall - tracked));
}

void Solver::record_iteration(std::optional<double> rho, double step_norm,
                              bool accepted, int evals_before,
                              const TaskTimers& timers_before,
                              std::chrono::steady_clock::time_point iter_start) {
  const double iter_wall = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - iter_start).count();
  const double tracked = timers_.total() - timers_before.total();
  timers_.add(Task::other, std::max(0.0, iter_wall - tracked));

  IterationRecord rec;
  rec.k = static_cast<long>(trace_.size());
  rec.n_evals = n_evals_;
  rec.wall_time_s = elapsed_s();
  rec.f_best = best_f_;
  rec.delta = delta_;
  rec.rho_defined = rho.has_value();
  rec.rho = rho.value_or(std::numeric_limits<double>::quiet_NaN());
  rec.step_norm = step_norm;
  rec.accepted = accepted;
  rec.evals_this_iter = static_cast<int>(n_evals_ - evals_before);
  rec.task_times = timers_;
  trace_.push_back(std::move(rec));
}

bool Solver::step() {
  if (!initialized_) {
    throw std::logic_error("solver: step() called before initialize()");
  }
  if (status_.has_value()) return false;

  const auto iter_start = std::chrono::steady_clock::now();
  const TaskTimers timers_before = timers_;
  const long evals_before = n_evals_;
  const bool sketched = config_.sketch.kind != SketchKind::none;

  // (a) resample the sketch
  SketchOperator S;
  if (sketched) {
    ScopedTimer timer(&timers_, Task::sketch_build);
    S = make_sketch(config_.sketch, problem_.n_residuals, rng_);
  }

  // (b) interpolation system and quadratic model
  InterpolationSystem sys = assemble_system(set_, &timers_);
  std::optional<QuadraticModel> model;
  if (sketched) {
    SketchedJacobian sj = solve_sketched_jacobian(sys, S, set_.base_residual(),
                                                  &timers_, &sketch_counts_);
    model.emplace(build_model(sj.SJ, sj.Sr, std::nullopt, &timers_));
  } else {
    Eigen::MatrixXd J = solve_full_jacobian(sys, &timers_);
    model.emplace(build_model(J, set_.base_residual(), set_.base_f(),
                              &timers_));
  }

  // A vanished model gradient: shrink towards the criticality test, no
  // evaluation to spend.
  if (model->gradient().isZero(0.0)) {
    delta_ = config_.gamma_dec * delta_;
    const bool critical = delta_ <= config_.delta_min;
    if (critical) status_ = SolveStatus::criticality;
    record_iteration(std::nullopt, 0.0, false, evals_before, timers_before,
                     iter_start);
    return !critical;
  }

  // (c) trust-region step
  TrsResult trs_result;
  {
    ScopedTimer timer(&timers_, Task::trs);
    trs_result = solve_trs(*model, delta_, config_.trs);
  }
  const double step_norm = trs_result.step.norm();

  // (d) evaluate the trial point; the ratio compares true objective change
  // against the (possibly sketched) predicted decrease
  const double f_old = set_.base_f();
  const Eigen::VectorXd trial = set_.base_point() + trs_result.step;
  const Eigen::VectorXd r_trial = evaluate(trial);

  if (!r_trial.allFinite()) {
    ++consecutive_failures_;
    const std::optional<double> rho = -kInf;
    delta_ = update_radius(delta_, rho, config_);
    const bool failed = consecutive_failures_ >= kMaxConsecutiveFailures;
    if (failed) status_ = SolveStatus::eval_failure;
    record_iteration(rho, step_norm, false, evals_before, timers_before,
                     iter_start);
    return !failed;
  }
  consecutive_failures_ = 0;

  const double f_new = 0.5 * r_trial.squaredNorm();
  const std::optional<double> rho =
      compute_rho(f_old, f_new, trs_result.predicted_decrease);

  // (e)-(g) accept, update the radius, refresh the interpolation set
  const bool accepted = rho.has_value() && *rho >= config_.eta1;
  delta_ = update_radius(delta_, rho, config_);

  bool duplicate = false;
  for (const auto& y : set_.points) {
    if (y == trial) {
      duplicate = true;
      break;
    }
  }
  if (!duplicate) {
    n_geometry_evals_ +=
        update_set(set_, trial, r_trial, accepted, delta_, evaluator(),
                   &timers_);
  }

  // (h) trace record
  record_iteration(rho, step_norm, accepted, evals_before, timers_before,
                   iter_start);
  return true;
}

SolveResult Solver::result() const {
  SolveResult res;
  res.x_final = best_x_;
  res.f_final = best_f_;
  res.status = status_.value_or(SolveStatus::budget_exhausted);
  res.trace = trace_;
  res.n_evals = n_evals_;
  res.n_geometry_evals = n_geometry_evals_;
  res.wall_time_s = elapsed_s();
  res.timers = timers_;
  res.sketch_counts = sketch_counts_;
  // Loop overhead that no named region captured.
  res.timers.add(Task::other,
                 std::max(0.0, res.wall_time_s - res.timers.total()));
  return res;
}

SolveResult solve(const Problem& problem, const SolverConfig& config) {
  Solver solver(problem, config);
  solver.initialize();
  while (!solver.finished()) {
    if (solver.n_evals() >= config.max_evals) {
      solver.set_status(SolveStatus::budget_exhausted);
      break;
    }
    if (solver.elapsed_s() >= config.max_time_s) {
      solver.set_status(SolveStatus::time_exhausted);
      break;
    }
    if (solver.delta() < config.delta_min) {
      solver.set_status(SolveStatus::radius_converged);
      break;
    }
    solver.step();
  }
  return solver.result();
}

}  // namespace sketchls
