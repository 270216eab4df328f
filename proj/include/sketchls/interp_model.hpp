#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "sketchls/instrument.hpp"
#include "sketchls/problems.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

// Hard failure threshold on the conditioning of the displacement matrix:
// above this the interpolation solve is numerical breakdown, not merely poor
// geometry.
inline constexpr double kKappaSolve = 1e14;

// Geometry-improvement gate: after a set update, a condition score above
// this triggers one improvement evaluation.
inline constexpr double kKappaGeom = 1e8;

// The displacement matrix is singular or conditioned beyond kKappaSolve.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A residual evaluation returned a non-finite value; the message identifies
// the offending point.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The d+1 interpolation points with cached residual vectors and objective
// values. points[base_index] is the current iterate.
struct InterpolationSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> residuals;
  std::vector<double> fvals;
  std::size_t base_index = 0;

  int dim() const {
    return points.empty() ? 0 : static_cast<int>(points.front().size());
  }
  int residual_dim() const {
    return residuals.empty() ? 0 : static_cast<int>(residuals.front().size());
  }
  const Eigen::VectorXd& base_point() const { return points[base_index]; }
  const Eigen::VectorXd& base_residual() const { return residuals[base_index]; }
  double base_f() const { return fvals[base_index]; }
};

// Builds the set {x0, x0 + delta0 e_1, ..., x0 + delta0 e_d}, evaluating the
// residual at every point (d+1 evaluations through `eval`). Throws
// EvaluationError if any point yields a non-finite residual.
InterpolationSet init_set(const Problem& problem, const Eigen::VectorXd& x0,
                          double delta0, const ResidualFn& eval);

// The linear system defining the model Jacobian: W row t holds the
// displacement (y_t - x_base)^T and R row t the residual difference
// (r(y_t) - r(x_base))^T, over the non-base points in slot order. W is
// factorized once and the factorization reused for every right-hand side.
struct InterpolationSystem {
  Eigen::MatrixXd W;  // d x d
  Eigen::MatrixXd R;  // d x n
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

// Populates W and R and factorizes W. Throws GeometryError when the
// condition estimate of W exceeds kKappaSolve. Time is charged to
// Task::interp_solve.
InterpolationSystem assemble_system(const InterpolationSet& set,
                                    TaskTimers* timers = nullptr);

// Solves W J^T = R for all n right-hand sides; returns J (n x d).
Eigen::MatrixXd solve_full_jacobian(const InterpolationSystem& sys,
                                    TaskTimers* timers = nullptr);

struct SketchedJacobian {
  Eigen::MatrixXd SJ;  // m x d
  Eigen::VectorXd Sr;  // m
};

// Forms R S^T (Task::sketch_apply) and solves W (SJ)^T = R S^T with the
// cached factorization (Task::interp_solve); the full Jacobian is never
// formed. Also returns S r_base.
SketchedJacobian solve_sketched_jacobian(const InterpolationSystem& sys,
                                         const SketchOperator& S,
                                         const Eigen::VectorXd& r_base,
                                         TaskTimers* timers = nullptr,
                                         OpCounts* counts = nullptr);

// Convex quadratic model c + g.s + 0.5 s'Hs with g = jac' r and H = jac' jac.
// The constant is stored when supplied and otherwise computed on demand from
// the retained residual vector (it does not affect steps or decreases).
class QuadraticModel {
 public:
  QuadraticModel(Eigen::MatrixXd jac, Eigen::VectorXd residual,
                 Eigen::VectorXd g, Eigen::MatrixXd H,
                 std::optional<double> c)
      : jac_(std::move(jac)), residual_(std::move(residual)),
        g_(std::move(g)), H_(std::move(H)), c_(c) {}

  int dim() const { return static_cast<int>(g_.size()); }
  const Eigen::VectorXd& gradient() const { return g_; }
  const Eigen::MatrixXd& hessian() const { return H_; }
  const Eigen::MatrixXd& jacobian() const { return jac_; }
  const Eigen::VectorXd& residual() const { return residual_; }

  double constant() const {
    if (!c_.has_value()) c_ = 0.5 * residual_.squaredNorm();
    return *c_;
  }

  double value(const Eigen::Ref<const Eigen::VectorXd>& s) const;

 private:
  Eigen::MatrixXd jac_;       // n x d or m x d, kept for diagnostics
  Eigen::VectorXd residual_;  // the residual (or sketched residual) at base
  Eigen::VectorXd g_;
  Eigen::MatrixXd H_;
  mutable std::optional<double> c_;
};

// Assembles the quadratic model from a (possibly sketched) Jacobian and the
// matching residual vector. `f_base` supplies the model constant for the
// unsketched case. Time is charged to Task::model_build.
QuadraticModel build_model(const Eigen::MatrixXd& jac,
                           const Eigen::VectorXd& residual,
                           std::optional<double> f_base = std::nullopt,
                           TaskTimers* timers = nullptr);

double model_value(const QuadraticModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& s);

// Condition estimate of the scaled displacement matrix with rows
// (y_t - x_base)^T / delta; +inf when exactly singular. Lower is better; the
// set counts as well-poised when the score is at most kKappaGeom.
double geometry_score(const InterpolationSet& set, double delta);

// Inserts (new_point, new_residual) into the set. On acceptance the new
// point becomes the base and the point farthest from it is dropped; on
// rejection the new point replaces the non-base point farthest from the
// unchanged base. If the geometry score then exceeds kKappaGeom, one
// improvement step replaces the most harmful non-base point with
// base + delta * v, where v is a unit singular direction of the scaled
// displacement matrix for its smallest singular value; this costs one extra
// residual evaluation. Returns the number of extra evaluations (0 or 1).
int update_set(InterpolationSet& set, const Eigen::VectorXd& new_point,
               const Eigen::VectorXd& new_residual, bool accepted,
               double delta, const ResidualFn& eval,
               TaskTimers* timers = nullptr);

}  // namespace sketchls
