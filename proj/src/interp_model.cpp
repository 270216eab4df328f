#include "sketchls/interp_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace sketchls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_to_string(const Eigen::VectorXd& x) {
  std::string out = "(";
  const int shown = std::min<int>(4, static_cast<int>(x.size()));
  for (int i = 0; i < shown; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(x[i]);
  }
  if (x.size() > shown) out += ", ...";
  out += ")";
  return out;
}

// Condition estimate of a square matrix via one LU factorization; +inf for
// exactly singular input.
double condition_estimate(const Eigen::MatrixXd& A) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc)) return kInf;
  return 1.0 / rc;
}

// Scaled displacement matrix with rows (y_t - base)^T / delta over non-base
// slots in order; also reports which slot produced each row.
Eigen::MatrixXd scaled_displacements(const InterpolationSet& set, double delta,
                                     std::vector<std::size_t>* slots) {
  const int d = set.dim();
  Eigen::MatrixXd What(d, d);
  if (slots != nullptr) slots->clear();
  int row = 0;
  for (std::size_t t = 0; t < set.points.size(); ++t) {
    if (t == set.base_index) continue;
    What.row(row) = (set.points[t] - set.base_point()).transpose() / delta;
    if (slots != nullptr) slots->push_back(t);
    ++row;
  }
  return What;
}

}  // namespace

InterpolationSet init_set(const Problem& problem, const Eigen::VectorXd& x0,
                          double delta0, const ResidualFn& eval) {
  if (delta0 <= 0.0) {
    throw std::invalid_argument("init_set: delta0 must be positive");
  }
  if (x0.size() != problem.dim) {
    throw std::invalid_argument(
        "init_set: start point has dimension " + std::to_string(x0.size()) +
        " but the problem expects " + std::to_string(problem.dim));
  }
  const int d = problem.dim;
  InterpolationSet set;
  set.points.reserve(d + 1);
  set.residuals.reserve(d + 1);
  set.fvals.reserve(d + 1);
  set.base_index = 0;
  for (int t = 0; t <= d; ++t) {
    Eigen::VectorXd y = x0;
    if (t > 0) y[t - 1] += delta0;
    Eigen::VectorXd r = eval(y);
    if (r.size() != problem.n_residuals) {
      throw std::invalid_argument(
          "init_set: residual has length " + std::to_string(r.size()) +
          " but the problem expects " + std::to_string(problem.n_residuals));
    }
    if (!r.allFinite()) {
      throw EvaluationError(
          "init_set: non-finite residual at initial point " +
          std::to_string(t) + " of " + std::to_string(d + 1) + ", x = " +
          point_to_string(y));
    }
    set.points.push_back(std::move(y));
    set.fvals.push_back(0.5 * r.squaredNorm());
    set.residuals.push_back(std::move(r));
  }
  return set;
}

InterpolationSystem assemble_system(const InterpolationSet& set,
                                    TaskTimers* timers) {
  ScopedTimer timer(timers, Task::interp_solve);
  const int d = set.dim();
  const int n = set.residual_dim();

  InterpolationSystem sys;
  sys.W.resize(d, d);
  sys.R.resize(d, n);

  std::vector<const double*> diffs_src;
  diffs_src.reserve(d);
  int row = 0;
  for (std::size_t t = 0; t < set.points.size(); ++t) {
    if (t == set.base_index) continue;
    sys.W.row(row) = (set.points[t] - set.base_point()).transpose();
    diffs_src.push_back(set.residuals[t].data());
    ++row;
  }

  // Fill R one column at a time: writes stay contiguous in the column-major
  // layout and each residual vector is streamed linearly.
  const double* base = set.base_residual().data();
  for (int j = 0; j < n; ++j) {
    double* col = sys.R.data() + static_cast<std::ptrdiff_t>(j) * d;
    const double rb = base[j];
    for (int t = 0; t < d; ++t) col[t] = diffs_src[t][j] - rb;
  }

  sys.lu.compute(sys.W);
  const double rc = sys.lu.rcond();
  if (!(rc > 0.0) || 1.0 / rc > kKappaSolve) {
    throw GeometryError(
        "assemble_system: displacement matrix condition estimate " +
        std::to_string(rc > 0.0 ? 1.0 / rc : kInf) + " exceeds " +
        std::to_string(kKappaSolve) + " (geometry failure)");
  }
  return sys;
}

Eigen::MatrixXd solve_full_jacobian(const InterpolationSystem& sys,
                                    TaskTimers* timers) {
  ScopedTimer timer(timers, Task::interp_solve);
  // TODO: expose an on-the-right triangular solve to skip the transpose copy.
  Eigen::MatrixXd Jt = sys.lu.solve(sys.R);  // d x n
  return Jt.transpose();
}

SketchedJacobian solve_sketched_jacobian(const InterpolationSystem& sys,
                                         const SketchOperator& S,
                                         const Eigen::VectorXd& r_base,
                                         TaskTimers* timers, OpCounts* counts) {
  if (S.n != sys.R.cols()) {
    throw std::invalid_argument(
        "solve_sketched_jacobian: sketch expects n = " + std::to_string(S.n) +
        " but the system has " + std::to_string(sys.R.cols()) + " residuals");
  }
  if (r_base.size() != sys.R.cols()) {
    throw std::invalid_argument(
        "solve_sketched_jacobian: base residual has length " +
        std::to_string(r_base.size()) + ", expected " +
        std::to_string(sys.R.cols()));
  }

  SketchedJacobian out;
  Eigen::MatrixXd RSt;
  {
    ScopedTimer timer(timers, Task::sketch_apply);
    RSt = apply_to_matrix_right(S, sys.R, counts);
    out.Sr = apply_to_vector(S, r_base, counts);
  }
  {
    ScopedTimer timer(timers, Task::interp_solve);
    Eigen::MatrixXd SJt = sys.lu.solve(RSt);  // d x m
    out.SJ = SJt.transpose();
  }
  return out;
}

double QuadraticModel::value(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  if (s.size() != g_.size()) {
    throw std::invalid_argument("model value: step has dimension " +
                                std::to_string(s.size()) + ", expected " +
                                std::to_string(g_.size()));
  }
  return constant() + g_.dot(s) + 0.5 * s.dot(H_ * s);
}

QuadraticModel build_model(const Eigen::MatrixXd& jac,
                           const Eigen::VectorXd& residual,
                           std::optional<double> f_base, TaskTimers* timers) {
  ScopedTimer timer(timers, Task::model_build);
  if (jac.rows() != residual.size()) {
    throw std::invalid_argument(
        "build_model: Jacobian has " + std::to_string(jac.rows()) +
        " rows but the residual has length " + std::to_string(residual.size()));
  }
  const Eigen::Index d = jac.cols();
  Eigen::VectorXd g = jac.transpose() * residual;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  H.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
  H = H.selfadjointView<Eigen::Lower>();
  return QuadraticModel(jac, residual, std::move(g), std::move(H), f_base);
}

double model_value(const QuadraticModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& s) {
  return model.value(s);
}

double geometry_score(const InterpolationSet& set, double delta) {
  if (delta <= 0.0) {
    throw std::invalid_argument("geometry_score: delta must be positive");
  }
  return condition_estimate(scaled_displacements(set, delta, nullptr));
}

int update_set(InterpolationSet& set, const Eigen::VectorXd& new_point,
               const Eigen::VectorXd& new_residual, bool accepted,
               double delta, const ResidualFn& eval, TaskTimers* timers) {
  const std::size_t count = set.points.size();
  for (std::size_t t = 0; t < count; ++t) {
    if (set.points[t] == new_point) {
      throw std::invalid_argument(
          "update_set: new point coincides with interpolation point " +
          std::to_string(t));
    }
  }
  const double f_new = 0.5 * new_residual.squaredNorm();

  if (accepted) {
    // The new point becomes the base; drop the point farthest from it.
    std::size_t farthest = 0;
    double best = -1.0;
    for (std::size_t t = 0; t < count; ++t) {
      const double dist = (set.points[t] - new_point).norm();
      if (dist > best) {
        best = dist;
        farthest = t;
      }
    }
    set.points[farthest] = new_point;
    set.residuals[farthest] = new_residual;
    set.fvals[farthest] = f_new;
    set.base_index = farthest;
  } else {
    std::size_t farthest = 0;
    double best = -1.0;
    for (std::size_t t = 0; t < count; ++t) {
      if (t == set.base_index) continue;
      const double dist = (set.points[t] - set.base_point()).norm();
      if (dist > best) {
        best = dist;
        farthest = t;
      }
    }
    set.points[farthest] = new_point;
    set.residuals[farthest] = new_residual;
    set.fvals[farthest] = f_new;
  }

  // Geometry phase: if the refreshed set is poorly poised, replace its most
  // harmful non-base point with a point along the weakest direction of the
  // scaled displacement matrix.
  bool improve = false;
  Eigen::VectorXd improvement_point;
  std::size_t victim = 0;
  {
    ScopedTimer timer(timers, Task::geometry);
    std::vector<std::size_t> slots;
    Eigen::MatrixXd What = scaled_displacements(set, delta, &slots);
    const double score = condition_estimate(What);
    if (score > kKappaGeom) {
      const int d = set.dim();
      Eigen::BDCSVD<Eigen::MatrixXd> svd(What, Eigen::ComputeFullV);
      Eigen::VectorXd v = svd.matrixV().col(d - 1);

      // Sign: keep the replacement as far from the existing points as we can.
      const auto min_distance = [&set](const Eigen::VectorXd& candidate) {
        double best = kInf;
        for (const auto& y : set.points) {
          best = std::min(best, (y - candidate).norm());
        }
        return best;
      };
      const Eigen::VectorXd plus = set.base_point() + delta * v;
      const Eigen::VectorXd minus = set.base_point() - delta * v;
      improvement_point = min_distance(plus) >= min_distance(minus) ? plus
                                                                    : minus;

      if (min_distance(improvement_point) > 0.0) {
        // Candidate scoring: condition estimate of the displacement matrix
        // with one row swapped for the new direction; the row sign does not
        // matter for the singular values.
        double best_score = kInf;
        Eigen::MatrixXd candidate = What;
        for (int rowidx = 0; rowidx < d; ++rowidx) {
          candidate.row(rowidx) = v.transpose();
          const double candidate_score = condition_estimate(candidate);
          if (candidate_score < best_score) {
            best_score = candidate_score;
            victim = slots[rowidx];
            improve = true;
          }
          candidate.row(rowidx) = What.row(rowidx);
        }
      }
    }
  }

  if (!improve) return 0;

  Eigen::VectorXd r = eval(improvement_point);
  if (!r.allFinite()) {
    throw EvaluationError(
        "update_set: non-finite residual at geometry improvement point x = " +
        point_to_string(improvement_point));
  }
  {
    ScopedTimer timer(timers, Task::geometry);
    set.points[victim] = improvement_point;
    set.fvals[victim] = 0.5 * r.squaredNorm();
    set.residuals[victim] = std::move(r);
  }
  return 1;
}

}  // namespace sketchls
