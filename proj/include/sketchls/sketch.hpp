#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sketchls/instrument.hpp"

namespace sketchls {

enum class SketchKind { none, gaussian, sampling, hashing };

std::string_view to_string(SketchKind kind);
std::optional<SketchKind> sketch_kind_from_string(std::string_view name);

// Distribution parameters for a random m x n sketching operator.
struct SketchConfig {
  SketchKind kind = SketchKind::none;
  int m = 1;            // sketch rows (ignored for kind == none)
  int hash_nnz = 1;     // nonzeros per column (hashing only)
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on m < 1 or hash_nnz outside [1, m].
  void validate() const;
};

// A realized sketching operator. Exactly one payload is populated according
// to `kind`:
//   gaussian  - `dense_payload` holds the full m x n matrix,
//   sampling  - `sample_rows` holds m source indices, output is scaled by
//               `sample_scale` = sqrt(n/m),
//   hashing   - column j owns entries [j*hash_nnz, (j+1)*hash_nnz) of
//               `hash_rows` / `hash_values`; values are +-1/sqrt(hash_nnz)
//               and row indices within a column are distinct,
//   none      - the n x n identity, no payload.
struct SketchOperator {
  SketchKind kind = SketchKind::none;
  int m = 0;
  int n = 0;

  Eigen::MatrixXd dense_payload;
  std::vector<int> sample_rows;
  double sample_scale = 0.0;
  int hash_nnz = 0;
  std::vector<int> hash_rows;
  std::vector<double> hash_values;

  // Densified m x n matrix; the brute-force reference for the structured
  // apply kernels.
  Eigen::MatrixXd dense() const;
};

using RandomStream = std::mt19937_64;

// Draws a fresh operator for residual dimension n from the configured
// distribution. Deterministic given (config, n, stream state).
SketchOperator make_sketch(const SketchConfig& config, int n,
                           RandomStream& stream);

// y = S * v, exploiting the operator structure. `counts`, when given,
// accumulates the arithmetic operations actually performed.
Eigen::VectorXd apply_to_vector(const SketchOperator& S,
                                const Eigen::Ref<const Eigen::VectorXd>& v,
                                OpCounts* counts = nullptr);

// B = R * S^T for a d x n matrix R (result is d x m). Sampling performs a
// scaled column gather with no general multiplies; hashing accumulates
// sign-flipped scaled columns.
Eigen::MatrixXd apply_to_matrix_right(
    const SketchOperator& S, const Eigen::Ref<const Eigen::MatrixXd>& R,
    OpCounts* counts = nullptr);

}  // namespace sketchls
