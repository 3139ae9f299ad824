#pragma once

// Exact equilibria for the games whose inner problem has a closed form: linear
// regression under squared error, and Rayleigh-quotient objectives (PLS).

#include "erasure/dataio.hpp"
#include "erasure/linalg.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace erasure {

/// max_theta min_P theta^T P A P theta / ||P theta||^2 over rank-k neutralizers P.
struct RayleighProblem {
  SymMatrix a;
  Eigen::Index k = 0;
};

/// The adversary's projection and the predictor's best response. `basis` may
/// have zero rows (k = 0 or a degenerate instance), in which case p = I.
struct EquilibriumResult {
  SymMatrix p = SymMatrix::identity(1);
  MatrixXd basis;
  VectorXd theta_star;
  double game_value = 0.0;
  bool degenerate = false;
  std::vector<std::string> warnings;
  nlohmann::json metadata = nlohmann::json::object();

  /// Throws Error(degenerate) when nothing was neutralized.
  ErasureProjection to_projection(Method method) const;
};

/// theta^T P A P theta / ||P theta||^2. Throws when P theta = 0.
double rayleigh_quotient(const SymMatrix& a, const VectorXd& theta, const MatrixXd& p);

/// Removes the single direction X^T y. With `center` (the default) X columns
/// and y are centered first and the game value is the variance of y;
/// otherwise it is mean(y^2). Requires a regression dataset.
EquilibriumResult regression_equilibrium(const Dataset& data, bool center = true);

/// Neutralizes the top-k eigenvectors of A; theta* = v_{k+1}, value lambda_{k+1}.
EquilibriumResult rayleigh_equilibrium(const RayleighProblem& problem);

/// Rayleigh game with A = X^T y y^T X. Classification labels are recoded to
/// -1/+1 first. Data is not centered.
EquilibriumResult pls_equilibrium(const Dataset& data, Eigen::Index k);

/// A = X^T y y^T X with the same label coding as pls_equilibrium.
SymMatrix pls_matrix(const Dataset& data);

}  // namespace erasure
