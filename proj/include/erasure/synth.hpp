#pragma once

// Seeded synthetic fixtures with known concept structure.
//
// The seed fixes the structure (random rotation, planted directions); `draw`
// selects an independent sample from the same distribution, so train, dev
// and test sets can be generated separately.

#include "erasure/dataio.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace erasure {

enum class SynthKind { planted_1d, planted_3d, multi_separable, no_signal, blobs };

std::string_view to_string(SynthKind kind);
SynthKind synth_kind_from_string(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::planted_1d;
  Eigen::Index n = 2000;
  Eigen::Index dim = 50;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
};

struct SynthData {
  RowMatrix x;
  VectorXd y;  // balanced 0/1 labels (blob identity for blobs)
  std::vector<std::string> ids;
  MatrixXd planted;  // rows span the class-signal subspace (empty for no-signal)

  Dataset dataset() const { return Dataset(x, y, TaskKind::binary_classification, ids); }
};

/// planted-1d: class means +-2.5 u along one random unit u, N(0, I) noise.
/// planted-3d: means +-1.5 on each of three orthonormal directions.
/// multi-separable: one dominant direction (means +-2.2, sd 1) plus two
///   correlated secondary ones (means +-3, sd 3), each separating on its own.
/// no-signal: N(0, I) with labels independent of x.
/// blobs: two unit-variance blobs centered at +-4 u.
SynthData make_synth(const SynthSpec& spec);

/// Uniformly random orthogonal matrix (QR of a Gaussian, signs fixed).
MatrixXd random_orthogonal(Eigen::Index dim, std::uint64_t seed);

}  // namespace erasure
