#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sketchls/instrument.hpp"
#include "sketchls/interp_model.hpp"
#include "sketchls/problems.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/trs.hpp"

namespace sketchls {

struct SolverConfig {
  // Initial trust-region radius; defaults to 0.1 * max(||x0||_inf, 1).
  std::optional<double> delta0;
  double delta_max = 1e10;
  double delta_min = 1e-8;
  double eta1 = 0.1;   // acceptance threshold
  double eta2 = 0.7;   // expansion threshold
  double gamma_dec = 0.5;
  double gamma_inc = 2.0;
  long max_evals = 1000;
  double max_time_s = std::numeric_limits<double>::infinity();
  SketchConfig sketch;
  std::uint64_t seed = 0;
  TrsOptions trs;

  void validate() const;  // throws std::invalid_argument
};

enum class SolveStatus {
  budget_exhausted,
  time_exhausted,
  radius_converged,
  criticality,
  eval_failure,
};

std::string_view to_string(SolveStatus status);

struct IterationRecord {
  long k = 0;
  long n_evals = 0;
  double wall_time_s = 0.0;
  double f_best = 0.0;
  double delta = 0.0;       // radius after the update
  double rho = 0.0;         // NaN when undefined
  bool rho_defined = false;
  double step_norm = 0.0;
  bool accepted = false;
  int evals_this_iter = 0;
  TaskTimers task_times;    // cumulative snapshot at the end of the iteration
};

struct SolveResult {
  Eigen::VectorXd x_final;
  double f_final = 0.0;
  SolveStatus status = SolveStatus::budget_exhausted;
  std::vector<IterationRecord> trace;
  long n_evals = 0;
  long n_geometry_evals = 0;
  double wall_time_s = 0.0;
  TaskTimers timers;
  OpCounts sketch_counts;  // cumulative over all sketch applications
};

// Acceptance ratio (true decrease over predicted model decrease). Returns
// nullopt when the predicted decrease is below 1e-15 * max(1, |f_old|); the
// caller treats that as a rejection.
std::optional<double> compute_rho(double f_old, double f_new,
                                  double predicted_decrease);

// rho >= eta2 grows the radius to min(gamma_inc * delta, delta_max); rho in
// [eta1, eta2) keeps it; anything else (including undefined) shrinks by
// gamma_dec.
double update_radius(double delta, std::optional<double> rho,
                     const SolverConfig& config);

// Trust-region driver with sketched or full model construction. A single
// run is sequential; independent runs may execute concurrently.
class Solver {
 public:
  Solver(Problem problem, SolverConfig config);

  // Builds the initial interpolation set (d+1 evaluations).
  void initialize();

  // One full iteration: resample the sketch, build the model, solve the
  // subproblem, evaluate the trial point, accept/reject, update the radius
  // and the interpolation set, and append a trace record. Returns false
  // once a terminal status has been set.
  bool step();

  bool finished() const { return status_.has_value(); }
  void set_status(SolveStatus status) { status_ = status; }

  long n_evals() const { return n_evals_; }
  double delta() const { return delta_; }
  double elapsed_s() const;
  const Eigen::VectorXd& x() const { return set_.base_point(); }
  double f() const { return set_.base_f(); }
  const InterpolationSet& set() const { return set_; }
  const std::vector<IterationRecord>& trace() const { return trace_; }

  SolveResult result() const;

 private:
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x);
  ResidualFn evaluator();
  void record_iteration(std::optional<double> rho, double step_norm,
                        bool accepted, int evals_before,
                        const TaskTimers& timers_before,
                        std::chrono::steady_clock::time_point iter_start);

  Problem problem_;
  SolverConfig config_;
  RandomStream rng_;
  InterpolationSet set_;
  double delta_ = 0.0;
  bool initialized_ = false;
  std::optional<SolveStatus> status_;
  long n_evals_ = 0;
  long n_geometry_evals_ = 0;
  int consecutive_failures_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x_;
  TaskTimers timers_;
  OpCounts sketch_counts_;
  std::vector<IterationRecord> trace_;
  std::chrono::steady_clock::time_point start_time_;
};

// Runs the full loop: initialization, then iterations until the evaluation
// budget, the time budget, radius convergence, criticality, or repeated
// evaluation failure. Reports the best point seen across every residual
// evaluation. Deterministic given (problem, config).
SolveResult solve(const Problem& problem, const SolverConfig& config);

}  // namespace sketchls
