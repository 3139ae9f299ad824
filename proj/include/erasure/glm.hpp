#pragma once

// Generalized linear model layer shared by both players of the erasure game.
// Scores are s = theta^T P x; losses are averaged over examples (the sum in
// the game differs by a positive constant and has the same optima). There is
// no intercept: center or augment the data if one is needed.

#include "erasure/dataio.hpp"
#include "erasure/linalg.hpp"
#include "erasure/loss.hpp"

namespace erasure {

/// A (loss, inverse link) pair.
struct GlmSpec {
  GlmKind kind = GlmKind::logistic;

  double inverse_link(double z) const { return kind == GlmKind::logistic ? sigmoid(z) : z; }
  double loss(double y, double score) const { return loss_from_score(kind, y, score); }
  double dloss(double y, double score) const { return dloss_from_score(kind, y, score); }
};

double predict(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const VectorXd& x);

double batch_loss(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                  const VectorXd& y);
double batch_loss(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const Dataset& data);

/// d(batch_loss)/d(theta) = P X^T r / N.
VectorXd grad_theta(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                    const VectorXd& y);
VectorXd grad_theta(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const Dataset& data);

/// d(batch_loss)/dP for the matrix P multiplying x, symmetrized.
MatrixXd grad_projection(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                         const VectorXd& y);

/// Gradient with respect to the eraser E when the data is multiplied by
/// (I - E): equals -grad_projection evaluated at P = I - E.
MatrixXd grad_eraser(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& eraser, const RowMatrix& x,
                     const VectorXd& y);
MatrixXd grad_eraser(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& eraser, const Dataset& data);

}  // namespace erasure
