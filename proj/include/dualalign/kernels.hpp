#pragma once

#include "dualalign/common.hpp"
#include "dualalign/pointset.hpp"

#include <algorithm>
#include <vector>

namespace dualalign {

enum class KernelKind { Linear, Gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double bandwidth = 1.0;  // sigma; only meaningful for Gaussian

  static KernelSpec linear() { return KernelSpec{KernelKind::Linear, 1.0}; }
  static KernelSpec gaussian(double sigma) {
    if (sigma <= 0.0) {
      throw InvalidSpec("gaussian bandwidth must be > 0");
    }
    return KernelSpec{KernelKind::Gaussian, sigma};
  }
};

inline double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& y) {
  require_same_dim(x.size(), y.size(), "kernel_eval");
  if (spec.kind == KernelKind::Linear) {
    return x.dot(y);
  }
  const double sq = (x - y).squaredNorm();
  return std::exp(-sq / (2.0 * spec.bandwidth * spec.bandwidth));
}

// d k(x, y) / d x
inline Vec kernel_grad_point(const KernelSpec& spec, const Vec& x, const Vec& y) {
  require_same_dim(x.size(), y.size(), "kernel_grad_point");
  if (spec.kind == KernelKind::Linear) {
    return y;
  }
  const double k = kernel_eval(spec, x, y);
  return (-(x - y) / (spec.bandwidth * spec.bandwidth)) * k;
}

// Raw kernel matrix K_ij = k(x_i, y_j) for row-stacked point matrices.
inline Mat kernel_matrix(const KernelSpec& spec, const Mat& x, const Mat& y) {
  require_same_dim(x.cols(), y.cols(), "kernel_matrix");
  if (spec.kind == KernelKind::Linear) {
    return x * y.transpose();
  }
  const Vec xs = x.rowwise().squaredNorm();
  const Vec ys = y.rowwise().squaredNorm();
  Mat sq = -2.0 * (x * y.transpose());
  sq.colwise() += xs;
  sq.rowwise() += ys.transpose();
  sq = sq.cwiseMax(0.0);
  return (-sq / (2.0 * spec.bandwidth * spec.bandwidth)).array().exp().matrix();
}

// Label-signed kernel matrix Q_ij = y_i y_j k(x_i, x_j) with its raw blocks.
// The blocks hold unsigned kernel values; q's off-diagonal blocks carry the
// minus sign that the opposite labels induce, so q tiles exactly as
// [[q_aa, -q_ab], [-q_ab^T, q_bb]].
struct GramBlocks {
  Mat q;     // n x n, signed
  Mat q_aa;  // |A| x |A|
  Mat q_bb;  // |B| x |B|
  Mat q_ab;  // |A| x |B|

  Index size() const { return q.rows(); }
  Index a_count() const { return q_aa.rows(); }
  Index b_count() const { return q_bb.rows(); }
};

inline GramBlocks build_gram(const KernelSpec& spec, const LabeledUnion& c) {
  if (c.size() < 1) {
    throw InvalidSpec("build_gram needs a nonempty union");
  }
  GramBlocks g;
  const Mat k = kernel_matrix(spec, c.points, c.points);
  const Index na = c.a_count;
  const Index nb = c.b_count;
  g.q_aa = k.topLeftCorner(na, na);
  g.q_bb = k.bottomRightCorner(nb, nb);
  g.q_ab = k.topRightCorner(na, nb);
  g.q = k;
  g.q.topRightCorner(na, nb) = -g.q_ab;
  g.q.bottomLeftCorner(nb, na) = -g.q_ab.transpose();
  return g;
}

// Median of pairwise Euclidean distances; the conventional default bandwidth
// for Gaussian-kernel two-sample statistics.
inline double median_pairwise_distance(const Mat& points) {
  const Index n = points.rows();
  if (n < 2) {
    return 1.0;
  }
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      dists.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double med = dists[mid];
  if (med <= 0.0) {
    // Degenerate cloud (duplicated points); fall back to the mean distance.
    double sum = 0.0;
    for (double d : dists) sum += d;
    med = sum / static_cast<double>(dists.size());
  }
  return med > 0.0 ? med : 1.0;
}

// Resolves bandwidth <= 0 to the median heuristic over the stacked points.
inline KernelSpec resolve_bandwidth(const KernelSpec& spec, const Mat& points) {
  if (spec.kind != KernelKind::Gaussian || spec.bandwidth > 0.0) {
    return spec;
  }
  return KernelSpec::gaussian(median_pairwise_distance(points));
}

}  // namespace dualalign
