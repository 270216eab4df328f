#include "sketchls/trs.hpp"

#include <cmath>
#include <stdexcept>

namespace sketchls {

namespace {

// Positive root of ||s + tau p|| = delta, assuming ||s|| <= delta and p != 0.
// Uses the cancellation-free branch of the quadratic formula.
double boundary_step(const Eigen::VectorXd& s, const Eigen::VectorXd& p,
                     double delta) {
  const double sp = s.dot(p);
  const double pp = p.squaredNorm();
  const double ss = s.squaredNorm();
  const double disc =
      std::sqrt(std::max(sp * sp + pp * (delta * delta - ss), 0.0));
  if (sp <= 0.0) return (disc - sp) / pp;
  return (delta * delta - ss) / (sp + disc);
}

}  // namespace

TrsResult solve_trs(const QuadraticModel& model, double delta,
                    const TrsOptions& options) {
  if (delta <= 0.0) {
    throw std::invalid_argument("solve_trs: delta must be positive");
  }
  const Eigen::VectorXd& g = model.gradient();
  const Eigen::MatrixXd& H = model.hessian();
  const int d = model.dim();

  TrsResult result;
  result.step = Eigen::VectorXd::Zero(d);
  const double gnorm = g.norm();
  if (gnorm == 0.0) return result;

  const double tol = std::min(options.forcing_cap, std::sqrt(gnorm)) * gnorm;
  const double curvature_floor = 1e-15 * gnorm * gnorm;
  const int max_iters = options.max_iters > 0 ? options.max_iters : d;

  Eigen::VectorXd& s = result.step;
  Eigen::VectorXd r = -g;
  Eigen::VectorXd p = r;
  Eigen::VectorXd Hp(d);
  double rr = r.squaredNorm();

  for (int it = 0; it < max_iters; ++it) {
    Hp.noalias() = H * p;
    const double curvature = p.dot(Hp);
    if (curvature <= curvature_floor) {
      s += boundary_step(s, p, delta) * p;
      break;
    }
    const double alpha = rr / curvature;
    if ((s + alpha * p).norm() >= delta) {
      s += boundary_step(s, p, delta) * p;
      break;
    }
    s += alpha * p;
    r -= alpha * Hp;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= tol) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }

  result.predicted_decrease = -g.dot(s) - 0.5 * s.dot(H * s);
  return result;
}

}  // namespace sketchls
