#include "erasure/synth.hpp"

#include "erasure/error.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace erasure {

namespace {

constexpr const char* kModule = "synth";

struct Shape {
  Eigen::Index signal_dims;
  VectorXd mean;  // latent class-mean offset, multiplied by +-1
  VectorXd sd;    // latent per-coordinate scale
};

Shape shape_for(SynthKind kind, Eigen::Index d) {
  Shape s{0, VectorXd::Zero(d), VectorXd::Ones(d)};
  switch (kind) {
    case SynthKind::planted_1d:
      s.signal_dims = 1;
      s.mean[0] = 2.5;
      break;
    case SynthKind::planted_3d:
      s.signal_dims = 3;
      s.mean.head(3).setConstant(1.5);
      break;
    case SynthKind::multi_separable:
      s.signal_dims = 3;
      s.mean[0] = 2.2;
      s.mean.segment(1, 2).setConstant(3.0);
      s.sd.segment(1, 2).setConstant(3.0);
      break;
    case SynthKind::no_signal: break;
    case SynthKind::blobs:
      s.signal_dims = 1;
      s.mean[0] = 4.0;
      break;
  }
  return s;
}

Eigen::Index min_dim(SynthKind kind) {
  switch (kind) {
    case SynthKind::planted_3d:
    case SynthKind::multi_separable: return 4;
    default: return 2;
  }
}

}  // namespace

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::planted_1d: return "planted-1d";
    case SynthKind::planted_3d: return "planted-3d";
    case SynthKind::multi_separable: return "multi-separable";
    case SynthKind::no_signal: return "no-signal";
    case SynthKind::blobs: return "blobs";
  }
  return "planted-1d";
}

SynthKind synth_kind_from_string(std::string_view name) {
  for (SynthKind k : {SynthKind::planted_1d, SynthKind::planted_3d, SynthKind::multi_separable,
                      SynthKind::no_signal, SynthKind::blobs})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::usage, kModule, "unknown fixture kind '" + std::string(name) + "'");
}

MatrixXd random_orthogonal(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

SynthData make_synth(const SynthSpec& spec) {
  if (spec.n < 4) throw Error(ErrorKind::usage, kModule, "fixture needs at least 4 rows");
  if (spec.dim < min_dim(spec.kind)) {
    std::ostringstream os;
    os << to_string(spec.kind) << " needs dim >= " << min_dim(spec.kind);
    throw Error(ErrorKind::usage, kModule, os.str());
  }
  const Eigen::Index n = spec.n;
  const Eigen::Index d = spec.dim;
  const Shape shape = shape_for(spec.kind, d);
  const MatrixXd q = random_orthogonal(d, spec.seed);

  std::seed_seq sample_seed{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                            static_cast<std::uint32_t>(spec.draw), static_cast<std::uint32_t>(spec.draw >> 32),
                            0x5eedu};
  std::mt19937_64 rng(sample_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthData out;
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.y[i] = i < n / 2 ? 1.0 : 0.0;
  std::shuffle(out.y.data(), out.y.data() + n, rng);

  RowMatrix z(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = 2.0 * out.y[i] - 1.0;
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = shape.sd[j] * normal(rng) + s * shape.mean[j];
  }
  out.x = z * q.transpose();
  out.planted = q.leftCols(shape.signal_dims).transpose();
  out.ids.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.ids.push_back("r" + std::to_string(i));
  return out;
}

}  // namespace erasure
