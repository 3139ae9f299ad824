#pragma once

// Relaxed linear adversarial concept erasure.
//
// The adversary is parametrized by an eraser E in the Fantope F_k (trace k,
// eigenvalues in [0, 1]) and the predictor sees (I - E) x. Predictor and
// eraser take alternating SGD steps: descent on theta, projected ascent on E.
// Every `eval_every` outer loops the eraser is snapped to an exact rank-k
// neutralizer and a fresh probe is trained on the projected dev split; the
// eraser whose probe loss was highest is returned.

#include "erasure/dataio.hpp"
#include "erasure/glm.hpp"
#include "erasure/probe.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace erasure {

struct RlaceConfig {
  Eigen::Index k = 1;
  long outer_loops = 10000;
  int inner_loops = 1;
  double theta_lr = 0.005;
  double eraser_lr = 0.005;
  Eigen::Index batch_size = 128;
  long eval_every = 1000;  // outer loops between adversary evaluations
  ProbeBudget probe;
  double weight_decay = 0.0;  // decoupled, applied to theta only
  double dev_fraction = 0.2;
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) on out-of-range fields.
  void validate() const;
};

struct RelaxedAdversaryState {
  SymMatrix eraser = SymMatrix::zero(1);
  VectorXd theta;
  SymMatrix best_eraser = SymMatrix::zero(1);
  double best_loss = -1.0;  // no evaluation yet
  double best_accuracy = 0.0;
  long best_step = -1;
  long predictor_steps = 0;
  long adversary_steps = 0;
};

struct AdversaryEvaluation {
  long step = 0;  // outer loops completed
  double loss = 0.0;
  double accuracy = 0.0;
};

struct FitDiagnostics {
  VectorXd final_spectrum;  // eraser eigenvalues at termination, descending
  VectorXd best_spectrum;   // eigenvalues of the selected eraser
  std::vector<AdversaryEvaluation> evaluations;
  double best_loss = 0.0;
  double best_accuracy = 0.0;
  long best_step = 0;
  double snap_residual = 0.0;  // ||E_best - W^T W||_F
};

struct RlaceFit {
  ErasureProjection projection;
  FitDiagnostics diagnostics;
};

/// Splits off a seeded dev share of `data` and fits on the remainder.
RlaceFit rlace_fit(const Dataset& data, const GlmSpec& spec, const RlaceConfig& config);
/// Fits on `train`, selecting the adversary on `dev`.
RlaceFit rlace_fit(const Dataset& train, const Dataset& dev, const GlmSpec& spec, const RlaceConfig& config);

/// theta <- theta - lr * grad_theta at P = I - E (with optional decay).
void predictor_step(RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y, const GlmSpec& spec,
                    const RlaceConfig& config);
/// E <- fantope_project(sym(E + lr * grad_eraser)).
void adversary_step(RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y, const GlmSpec& spec,
                    const RlaceConfig& config);

/// Fresh probe on dev data projected by the snapped eraser; reports its
/// training loss and accuracy on the dev rows.
ProbeScore evaluate_adversary(const SymMatrix& eraser, const Dataset& dev, const RlaceConfig& config);

struct SnapResult {
  ErasureProjection projection;
  double residual = 0.0;
};

/// Neutralizes the top-k eigenvectors of the eraser.
SnapResult snap_to_projection(const SymMatrix& eraser, Eigen::Index k);

/// Initial state: theta ~ N(0, 0.01^2), eraser = Fantope projection of a
/// symmetric standard-normal matrix.
RelaxedAdversaryState initial_state(Eigen::Index dim, Eigen::Index k, std::mt19937_64& rng);

}  // namespace erasure
