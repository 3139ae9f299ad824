#pragma once

#include "erasure/closedform.hpp"
#include "erasure/dataio.hpp"
#include "erasure/glm.hpp"
#include "erasure/probe.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace erasure {

struct InlpConfig {
  Eigen::Index iterations = 1;
  /// logistic for classification, squared_error for regression.
  GlmSpec spec{GlmKind::logistic};
  ProbeBudget probe;
  std::uint64_t seed = 0;
  /// Composition steps between re-orthogonalizations of P.
  int reorthogonalize_every = 10;
};

struct InlpIteration {
  VectorXd theta;         // the direction removed at this step
  double train_metric;    // accuracy (classification) or MSE (regression) on X P_i
  double theta_norm;
};

struct InlpFit {
  /// Absent when the first direction was already ~0.
  std::optional<ErasureProjection> projection;
  /// The composed P_k (before the basis is re-orthonormalized).
  MatrixXd composed;
  std::vector<InlpIteration> iterations;
  std::vector<std::string> warnings;

  /// Projection after the first `i` iterations (1 <= i <= iterations.size()).
  ErasureProjection prefix(std::size_t i) const;
};

/// Iterative nullspace projection: train a predictor on X P_i, remove its
/// direction, repeat. Stops early when the predictor collapses to zero.
InlpFit inlp_fit(const Dataset& data, const InlpConfig& config);

struct OlsDirection {
  VectorXd direction;  // (X^T X)^-1 X^T y
  bool regularized = false;
};

/// First INLP regression direction. X^T X is ridge-regularized with 1e-8 on
/// the diagonal when it is not invertible.
OlsDirection inlp_regression_first_direction(const Dataset& data);

struct InlpRayleighFit {
  MatrixXd basis;  // k x D, the removed directions
  SymMatrix p = SymMatrix::identity(1);
  double game_value = 0.0;  // max Rayleigh quotient over range(P)
};

/// INLP for Rayleigh objectives: the inner step takes the maximizing
/// direction of theta^T P A P theta / ||P theta||^2, the outer step
/// neutralizes it.
InlpRayleighFit inlp_rayleigh(const SymMatrix& a, Eigen::Index k);

/// Top-k principal directions of the pair differences a_i - b_i. By default
/// the differences are not centered.
ErasureProjection pca_diff_fit(const RowMatrix& a, const RowMatrix& b, Eigen::Index k, bool center = false);

}  // namespace erasure
