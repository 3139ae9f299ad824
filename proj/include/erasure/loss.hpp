#pragma once

#include <cmath>
#include <string_view>

namespace erasure {

/// Loss / inverse-link pairs of the erasure game.
///   squared_error: l(y, s) = (y - s)^2, identity link
///   logistic:      binary cross-entropy on sigmoid(s), y in {0, 1}
///   pls:           l(y, s) = (y * s)^2, identity link
enum class GlmKind { squared_error, logistic, pls };

std::string_view to_string(GlmKind kind);
GlmKind glm_kind_from_string(std::string_view name);

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

/// Per-example loss as a function of the raw score s = theta^T P x.
inline double loss_from_score(GlmKind kind, double y, double s) {
  switch (kind) {
    case GlmKind::squared_error: return (y - s) * (y - s);
    case GlmKind::logistic: return softplus(s) - y * s;
    case GlmKind::pls: return (y * s) * (y * s);
  }
  return 0.0;
}

/// d loss / d score.
inline double dloss_from_score(GlmKind kind, double y, double s) {
  switch (kind) {
    case GlmKind::squared_error: return -2.0 * (y - s);
    case GlmKind::logistic: return sigmoid(s) - y;
    case GlmKind::pls: return 2.0 * y * y * s;
  }
  return 0.0;
}

}  // namespace erasure
