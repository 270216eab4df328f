#include "sketchls/sketch.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sketchls {

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::none: return "none";
    case SketchKind::gaussian: return "gaussian";
    case SketchKind::sampling: return "sampling";
    case SketchKind::hashing: return "hashing";
  }
  return "unknown";
}

std::optional<SketchKind> sketch_kind_from_string(std::string_view name) {
  if (name == "none") return SketchKind::none;
  if (name == "gaussian") return SketchKind::gaussian;
  if (name == "sampling") return SketchKind::sampling;
  if (name == "hashing") return SketchKind::hashing;
  return std::nullopt;
}

void SketchConfig::validate() const {
  if (kind == SketchKind::none) return;
  if (m < 1) {
    throw std::invalid_argument("sketch: m must be at least 1, got " +
                                std::to_string(m));
  }
  if (kind == SketchKind::hashing) {
    if (hash_nnz < 1) {
      throw std::invalid_argument("sketch: hash_nnz must be at least 1, got " +
                                  std::to_string(hash_nnz));
    }
    if (hash_nnz > m) {
      throw std::invalid_argument(
          "sketch: hash_nnz (" + std::to_string(hash_nnz) +
          ") cannot exceed the sketch size m (" + std::to_string(m) + ")");
    }
  }
}

Eigen::MatrixXd SketchOperator::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n);
  switch (kind) {
    case SketchKind::none:
      out.setIdentity();
      break;
    case SketchKind::gaussian:
      out = dense_payload;
      break;
    case SketchKind::sampling:
      for (int t = 0; t < m; ++t) out(t, sample_rows[t]) += sample_scale;
      break;
    case SketchKind::hashing:
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < hash_nnz; ++k) {
          const int idx = j * hash_nnz + k;
          out(hash_rows[idx], j) = hash_values[idx];
        }
      }
      break;
  }
  return out;
}

SketchOperator make_sketch(const SketchConfig& config, int n,
                           RandomStream& stream) {
  if (n < 1) {
    throw std::invalid_argument("make_sketch: residual dimension n must be "
                                "positive, got " + std::to_string(n));
  }
  config.validate();

  SketchOperator op;
  op.kind = config.kind;
  op.n = n;

  switch (config.kind) {
    case SketchKind::none: {
      op.m = n;  // identity
      break;
    }
    case SketchKind::gaussian: {
      op.m = config.m;
      std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(config.m));
      op.dense_payload.resize(op.m, n);
      double* data = op.dense_payload.data();
      const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(op.m) * n;
      for (std::ptrdiff_t i = 0; i < count; ++i) data[i] = gauss(stream);
      break;
    }
    case SketchKind::sampling: {
      op.m = config.m;
      std::uniform_int_distribution<int> pick(0, n - 1);
      op.sample_rows.resize(op.m);
      for (int t = 0; t < op.m; ++t) op.sample_rows[t] = pick(stream);
      op.sample_scale = std::sqrt(static_cast<double>(n) / config.m);
      break;
    }
    case SketchKind::hashing: {
      op.m = config.m;
      const int s = config.hash_nnz;
      op.hash_nnz = s;
      op.hash_rows.resize(static_cast<std::size_t>(n) * s);
      op.hash_values.resize(static_cast<std::size_t>(n) * s);
      const double mag = 1.0 / std::sqrt(static_cast<double>(s));
      std::uniform_int_distribution<int> coin(0, 1);

      // Distinct row indices per column via a partial Fisher-Yates shuffle.
      // The swaps are undone after each column (in reverse, using the
      // recorded pivots) so the scratch array stays the identity and the
      // per-column cost is O(s) rather than O(m).
      std::vector<int> scratch(op.m);
      std::iota(scratch.begin(), scratch.end(), 0);
      std::vector<int> pivots(s);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < s; ++k) {
          std::uniform_int_distribution<int> pick(k, op.m - 1);
          const int ell = pick(stream);
          pivots[k] = ell;
          std::swap(scratch[k], scratch[ell]);
          const std::size_t idx = static_cast<std::size_t>(j) * s + k;
          op.hash_rows[idx] = scratch[k];
          op.hash_values[idx] = coin(stream) == 0 ? mag : -mag;
        }
        for (int k = s - 1; k >= 0; --k) std::swap(scratch[k], scratch[pivots[k]]);
      }
      break;
    }
  }
  return op;
}

namespace {

void require_cols(const SketchOperator& S, Eigen::Index got, const char* what) {
  if (got != S.n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch, "
                                "operator expects " + std::to_string(S.n) +
                                " but got " + std::to_string(got));
  }
}

}  // namespace

Eigen::VectorXd apply_to_vector(const SketchOperator& S,
                                const Eigen::Ref<const Eigen::VectorXd>& v,
                                OpCounts* counts) {
  require_cols(S, v.size(), "apply_to_vector");
  const int n = S.n;
  switch (S.kind) {
    case SketchKind::none:
      return v;
    case SketchKind::gaussian: {
      Eigen::VectorXd out(S.m);
      out.noalias() = S.dense_payload * v;
      if (counts != nullptr) {
        const std::uint64_t mn = static_cast<std::uint64_t>(S.m) * n;
        counts->multiplies += mn;
        counts->additions += mn;
      }
      return out;
    }
    case SketchKind::sampling: {
      Eigen::VectorXd out(S.m);
      for (int t = 0; t < S.m; ++t) out[t] = S.sample_scale * v[S.sample_rows[t]];
      if (counts != nullptr) {
        counts->gathers += static_cast<std::uint64_t>(S.m);
        counts->scalings += static_cast<std::uint64_t>(S.m);
      }
      return out;
    }
    case SketchKind::hashing: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(S.m);
      const int s = S.hash_nnz;
      const double mag = 1.0 / std::sqrt(static_cast<double>(s));
      for (int j = 0; j < n; ++j) {
        const double w = s == 1 ? v[j] : mag * v[j];
        for (int k = 0; k < s; ++k) {
          const std::size_t idx = static_cast<std::size_t>(j) * s + k;
          if (S.hash_values[idx] > 0.0) {
            out[S.hash_rows[idx]] += w;
          } else {
            out[S.hash_rows[idx]] -= w;
          }
        }
      }
      if (counts != nullptr) {
        const std::uint64_t sn = static_cast<std::uint64_t>(s) * n;
        counts->additions += sn;
        counts->sign_flips += sn;
        if (s > 1) counts->scalings += static_cast<std::uint64_t>(n);
      }
      return out;
    }
  }
  throw std::logic_error("apply_to_vector: unhandled sketch kind");
}

Eigen::MatrixXd apply_to_matrix_right(
    const SketchOperator& S, const Eigen::Ref<const Eigen::MatrixXd>& R,
    OpCounts* counts) {
  require_cols(S, R.cols(), "apply_to_matrix_right");
  const int n = S.n;
  const Eigen::Index d = R.rows();
  switch (S.kind) {
    case SketchKind::none:
      return R;
    case SketchKind::gaussian: {
      Eigen::MatrixXd out(d, S.m);
      out.noalias() = R * S.dense_payload.transpose();
      if (counts != nullptr) {
        const std::uint64_t dnm =
            static_cast<std::uint64_t>(d) * n * static_cast<std::uint64_t>(S.m);
        counts->multiplies += dnm;
        counts->additions += dnm;
      }
      return out;
    }
    case SketchKind::sampling: {
      // A scaled column gather: no general multiplies are performed.
      Eigen::MatrixXd out(d, S.m);
      for (int t = 0; t < S.m; ++t) {
        out.col(t) = S.sample_scale * R.col(S.sample_rows[t]);
      }
      if (counts != nullptr) {
        counts->gathers += static_cast<std::uint64_t>(S.m);
        counts->scalings += static_cast<std::uint64_t>(S.m) * d;
      }
      return out;
    }
    case SketchKind::hashing: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, S.m);
      const int s = S.hash_nnz;
      const double mag = 1.0 / std::sqrt(static_cast<double>(s));
      Eigen::VectorXd scaled(d);
      for (int j = 0; j < n; ++j) {
        const double* col = nullptr;
        if (s == 1) {
          // values are +-1 exactly; accumulate the raw column
        } else {
          scaled = mag * R.col(j);
          col = scaled.data();
        }
        for (int k = 0; k < s; ++k) {
          const std::size_t idx = static_cast<std::size_t>(j) * s + k;
          const int row = S.hash_rows[idx];
          const bool positive = S.hash_values[idx] > 0.0;
          if (s == 1) {
            if (positive) {
              out.col(row) += R.col(j);
            } else {
              out.col(row) -= R.col(j);
            }
          } else {
            Eigen::Map<const Eigen::VectorXd> sc(col, d);
            if (positive) {
              out.col(row) += sc;
            } else {
              out.col(row) -= sc;
            }
          }
        }
      }
      if (counts != nullptr) {
        const std::uint64_t sn = static_cast<std::uint64_t>(s) * n;
        counts->additions += sn * static_cast<std::uint64_t>(d);
        counts->sign_flips += sn;
        if (s > 1) counts->scalings += static_cast<std::uint64_t>(n) * d;
      }
      return out;
    }
  }
  throw std::logic_error("apply_to_matrix_right: unhandled sketch kind");
}

}  // namespace sketchls
