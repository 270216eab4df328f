#pragma once

#include <Eigen/Core>

#include "sketchls/interp_model.hpp"

namespace sketchls {

struct TrsOptions {
  // The conjugate-gradient iteration stops once the residual of H s = -g
  // drops below min(forcing_cap, sqrt(||g||)) * ||g||. Lowering the cap
  // forces the interior solve towards the exact Newton point.
  double forcing_cap = 0.1;
  // Iteration limit; <= 0 means the model dimension d.
  int max_iters = 0;
};

struct TrsResult {
  Eigen::VectorXd step;
  double predicted_decrease = 0.0;  // m(0) - m(step) = -g.s - 0.5 s'Hs
};

// Approximately minimizes the model over the ball ||s|| <= delta with
// Steihaug-Toint truncated conjugate gradients: start from 0, run CG on
// H s = -g, and stop at the trust-region boundary, at the residual
// tolerance, or after the iteration limit. Directions of vanishing
// curvature (H is positive semidefinite by construction) follow the current
// direction straight to the boundary. g = 0 returns a zero step with zero
// decrease, which the caller treats as a criticality signal.
TrsResult solve_trs(const QuadraticModel& model, double delta,
                    const TrsOptions& options = {});

}  // namespace sketchls
