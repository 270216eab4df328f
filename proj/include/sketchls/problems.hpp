#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace sketchls {

using ResidualFn =
    std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&)>;

// A nonlinear least-squares instance: minimize f(x) = 0.5 * ||r(x)||^2 over
// x in R^dim, with r mapping into R^n_residuals and n_residuals >= dim.
struct Problem {
  std::string name;
  int dim = 0;
  int n_residuals = 0;
  Eigen::VectorXd x0;
  ResidualFn residual;
  std::optional<double> f_min;

  double objective(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return 0.5 * residual(x).squaredNorm();
  }
};

// Chained Rosenbrock in R^d (d >= 2): residual pairs
//   r_{2i}   = 10 * (x_{i+1} - x_i^2)
//   r_{2i+1} = x_i - 1          for i = 0..d-2,
// so n = 2(d-1). Start point alternates (-1.2, 1, -1.2, 1, ...); the global
// minimum is 0 at the all-ones point.
Problem gen_rosenbrock(int d);

enum class LinkKind { linear, logistic };

// Residual-fitting problem read from a CSV file: a required header row, p
// numeric feature columns and a final label column. Row i contributes
//   r_i(x) = phi(a_i . w + b) - y_i
// with phi the identity (linear) or the standard sigmoid (logistic). With
// `intercept`, x = (w, b) and dim = p + 1; otherwise b = 0 and dim = p.
// x0 = 0. Throws std::invalid_argument with row/column indices on malformed
// input or when the row count is below dim.
Problem dataset_problem(const std::filesystem::path& path, LinkKind link,
                        bool intercept);

// Smooth synthetic residuals r_i(x) = a_i . x + alpha * sin(b_i . x) - c_i
// with fixed seeded Gaussian data and alpha = 0.1; requires n >= d.
Problem random_nlls(int d, int n, std::uint64_t seed);

}  // namespace sketchls
