#pragma once

#include "erasure/linalg.hpp"

namespace erasure {

/// Convergence budget for a linear logistic probe.
struct ProbeBudget {
  int max_iterations = 100;
  double grad_tol = 1e-6;
  double l2 = 0.0;
};

struct ProbeFit {
  VectorXd theta;
  double loss = 0.0;       // mean cross-entropy on the training rows
  double grad_norm = 0.0;  // at termination
  int iterations = 0;
  bool converged = false;
  double tie_label = 0.0;  // prediction for a zero score (training majority)
};

/// Fresh logistic probe (no intercept) from theta = 0, trained with damped
/// Newton steps and a backtracking line search until the gradient norm
/// drops below budget.grad_tol.
ProbeFit train_logistic_probe(const RowMatrix& x, const VectorXd& y, const ProbeBudget& budget = {});

struct ProbeScore {
  double accuracy = 0.0;
  double loss = 0.0;
};

/// Accuracy at the 0.5 threshold and mean cross-entropy on (x, y).
ProbeScore score_probe(const ProbeFit& fit, const RowMatrix& x, const VectorXd& y);

}  // namespace erasure
