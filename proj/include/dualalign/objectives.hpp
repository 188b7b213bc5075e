#pragma once

#include "dualalign/common.hpp"
#include "dualalign/kernels.hpp"
#include "dualalign/pointset.hpp"

#include <cmath>

namespace dualalign {

// --- variational log-sigmoid machinery --------------------------------------
//
// log(sigma(u)) = min_{alpha in [0,1]} alpha*u + H(alpha), attained at
// alpha = sigma(-u), with H(a) = a log a + (1-a) log(1-a) (convention
// 0 log 0 = 0, so H(0) = H(1) = 0 and H <= 0 on [0,1]).
//
// Outside [0,1] (reachable only when the optimizer runs in pure-penalty mode
// with box projection off) H is continued linearly from the boundary with the
// slope it has at distance kEntropyEdge inside, keeping the objective finite
// and pushing iterates back toward the box.

inline constexpr double kEntropyEdge = 1e-6;

inline double entropy_term(double a) {
  if (a < 0.0) {
    return std::log(kEntropyEdge / (1.0 - kEntropyEdge)) * a;
  }
  if (a > 1.0) {
    return std::log((1.0 - kEntropyEdge) / kEntropyEdge) * (a - 1.0);
  }
  double v = 0.0;
  if (a > 0.0) v += a * std::log(a);
  if (a < 1.0) v += (1.0 - a) * std::log(1.0 - a);
  return v;
}

inline double entropy_grad(double a) {
  if (a <= 0.0) {
    return std::log(kEntropyEdge / (1.0 - kEntropyEdge));
  }
  if (a >= 1.0) {
    return std::log((1.0 - kEntropyEdge) / kEntropyEdge);
  }
  return std::log(a / (1.0 - a));
}

inline double entropy_sum(const Vec& alpha) {
  double s = 0.0;
  for (Index i = 0; i < alpha.size(); ++i) s += entropy_term(alpha[i]);
  return s;
}

inline double log_sigmoid_bound(double u, double alpha) {
  return alpha * u + entropy_term(alpha);
}

// Minimizer of the bound in alpha.
inline double bound_minimizer(double u) { return sigmoid(-u); }

// --- primal adversarial logistic distance ------------------------------------

struct PrimalDiscriminator {
  Vec w;
  double b = 0.0;
  double lambda = 1.0;
};

// Regularized log-likelihood of the discriminator at (w, b). The adversarial
// distance is the maximum of this over (w, b).
inline double primal_distance(const PrimalDiscriminator& disc, const LabeledUnion& c) {
  require_same_dim(disc.w.size(), c.dim(), "primal_distance");
  const Vec u = (c.points * disc.w).array() + disc.b;
  double value = 0.0;
  for (Index i = 0; i < c.size(); ++i) {
    value += log_sigmoid(c.labels[i] * u[i]);
  }
  value -= 0.5 * disc.lambda * disc.w.squaredNorm();
  return value;
}

struct PrimalGrads {
  Vec w;
  double b = 0.0;
  // One row per union point; rows for A are identically zero since only B'
  // moves under the matcher.
  Mat points;
};

inline PrimalGrads primal_grad(const PrimalDiscriminator& disc, const LabeledUnion& c) {
  require_same_dim(disc.w.size(), c.dim(), "primal_grad");
  const Vec u = (c.points * disc.w).array() + disc.b;
  Vec r(c.size());  // d/du log(sigma(u)) = sigma(-u)
  for (Index i = 0; i < c.size(); ++i) r[i] = sigmoid(-c.labels[i] * u[i]);
  const Vec ry = r.cwiseProduct(c.labels);
  PrimalGrads g;
  g.w = c.points.transpose() * ry - disc.lambda * disc.w;
  g.b = ry.sum();
  g.points = Mat::Zero(c.size(), c.dim());
  for (Index i = c.a_count; i < c.size(); ++i) {
    g.points.row(i) = ry[i] * disc.w.transpose();
  }
  return g;
}

// --- dual distance ------------------------------------------------------------

struct DualState {
  Vec alpha;                 // one weight in [0,1] per union point
  double lambda = 1.0;       // discriminator l2 coefficient
  double lambda1 = 0.0;      // balance penalty |sum alpha_A - sum alpha_B|
  double lambda2 = 0.0;      // positivity penalty sum |min(0, alpha_i)|
  double clamp_eps = 1e-6;   // projection keeps alpha in [eps, 1-eps]
};

inline double balance_gap(const Vec& alpha, Index a_count) {
  return alpha.head(a_count).sum() - alpha.tail(alpha.size() - a_count).sum();
}

inline double dual_distance(const DualState& state, const GramBlocks& gram) {
  if (state.alpha.size() != gram.size()) {
    throw DimensionError("dual_distance: alpha length must match gram size");
  }
  const double quad = state.alpha.dot(gram.q * state.alpha) / (2.0 * state.lambda);
  double value = quad + entropy_sum(state.alpha);
  if (state.lambda1 > 0.0) {
    value += state.lambda1 * std::abs(balance_gap(state.alpha, gram.a_count()));
  }
  if (state.lambda2 > 0.0) {
    for (Index i = 0; i < state.alpha.size(); ++i) {
      value += state.lambda2 * std::abs(std::min(0.0, state.alpha[i]));
    }
  }
  return value;
}

struct DualGrads {
  Vec alpha;
  // One row per union point; A rows are zero (only B' moves).
  Mat points;
};

inline DualGrads dual_grad(const DualState& state, const GramBlocks& gram,
                           const KernelSpec& kernel, const LabeledUnion& c) {
  if (state.alpha.size() != gram.size() || gram.size() != c.size()) {
    throw DimensionError("dual_grad: inconsistent shapes");
  }
  const Index n = c.size();
  const Vec qa = gram.q * state.alpha;

  DualGrads g;
  g.alpha = qa / state.lambda;
  for (Index i = 0; i < n; ++i) g.alpha[i] += entropy_grad(state.alpha[i]);
  if (state.lambda1 > 0.0) {
    const double gap = balance_gap(state.alpha, c.a_count);
    const double sgn = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
    g.alpha.head(c.a_count).array() += state.lambda1 * sgn;
    g.alpha.tail(c.b_count).array() -= state.lambda1 * sgn;
  }
  if (state.lambda2 > 0.0) {
    for (Index i = 0; i < n; ++i) {
      if (state.alpha[i] < 0.0) g.alpha[i] -= state.lambda2;
    }
  }

  g.points = Mat::Zero(n, c.dim());
  if (kernel.kind == KernelKind::Linear) {
    // sum_j alpha_j y_m y_j x_j = y_m * X^T (alpha .* y)
    const Vec v = c.points.transpose() * state.alpha.cwiseProduct(c.labels);
    for (Index m = c.a_count; m < n; ++m) {
      g.points.row(m) = (state.alpha[m] * c.labels[m] / state.lambda) * v.transpose();
    }
  } else {
    // sum_j alpha_j q_mj grad1 k(x_m, x_j) with grad1 k = -(x_m - x_j)/sigma^2 * k
    const double inv_s2 = 1.0 / (kernel.bandwidth * kernel.bandwidth);
    const Mat u = gram.q * (state.alpha.asDiagonal() * c.points);
    for (Index m = c.a_count; m < n; ++m) {
      g.points.row(m) = (state.alpha[m] / state.lambda) * (-inv_s2) *
                        (qa[m] * c.points.row(m) - u.row(m));
    }
  }
  return g;
}

// Score of the dual discriminator without bias: (1/lambda) sum_j alpha_j y_j k(x_j, .)
inline Vec dual_scores(const DualState& state, const KernelSpec& kernel,
                       const LabeledUnion& c) {
  if (state.alpha.size() != c.size()) {
    throw DimensionError("dual_scores: alpha length must match union size");
  }
  const Mat k = kernel_matrix(kernel, c.points, c.points);
  return (k * state.alpha.cwiseProduct(c.labels)) / state.lambda;
}

// Maximizes sum_i log(sigma(y_i (u0_i + b))) over b. The derivative
// sum_i y_i sigma(-y_i (u0_i + b)) is strictly decreasing, so the root is
// bracketed by doubling and polished with a fixed bisection count.
inline double optimal_bias(const Vec& u0, const Vec& labels) {
  auto slope = [&](double b) {
    double s = 0.0;
    for (Index i = 0; i < u0.size(); ++i) {
      s += labels[i] * sigmoid(-labels[i] * (u0[i] + b));
    }
    return s;
  };
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 60 && slope(lo) < 0.0; ++k) lo *= 2.0;
  for (int k = 0; k < 60 && slope(hi) > 0.0; ++k) hi *= 2.0;
  if (slope(lo) < 0.0 || slope(hi) > 0.0) {
    // One-sided labels; the likelihood has no interior stationary point.
    return slope(0.0) > 0.0 ? hi : lo;
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// w* = (1/lambda) sum_j alpha_j y_j x_j; the bias is recovered by maximizing
// the primal likelihood over b at that w. Linear kernels only.
inline PrimalDiscriminator recover_primal_w(const DualState& state, const LabeledUnion& c,
                                            const KernelSpec& kernel) {
  if (kernel.kind != KernelKind::Linear) {
    throw UnsupportedKernel("recover_primal_w requires a linear kernel");
  }
  if (state.alpha.size() != c.size()) {
    throw DimensionError("recover_primal_w: alpha length must match union size");
  }
  PrimalDiscriminator disc;
  disc.lambda = state.lambda;
  disc.w = c.points.transpose() * state.alpha.cwiseProduct(c.labels) / state.lambda;
  disc.b = optimal_bias(c.points * disc.w, c.labels);
  return disc;
}

// --- MMD ----------------------------------------------------------------------

enum class MmdNormalization {
  Standard,   // 1/|A|^2, 1/|B|^2, 2/(|A||B|)
  PaperForm,  // 1/(2|A|), 1/(2|B|), 1/(|A||B|) applied verbatim
};

inline double mmd_distance(const KernelSpec& kernel, const PointSet& a, const PointSet& b,
                           MmdNormalization norm = MmdNormalization::Standard) {
  require_same_dim(a.dim(), b.dim(), "mmd_distance");
  const double saa = kernel_matrix(kernel, a.points, a.points).sum();
  const double sbb = kernel_matrix(kernel, b.points, b.points).sum();
  const double sab = kernel_matrix(kernel, a.points, b.points).sum();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  if (norm == MmdNormalization::Standard) {
    return saa / (na * na) + sbb / (nb * nb) - 2.0 * sab / (na * nb);
  }
  return saa / (2.0 * na) + sbb / (2.0 * nb) - sab / (na * nb);
}

// Quadratic part of the dual distance written over raw kernel blocks:
// (1/2lambda) [a_A^T K_AA a_A + a_B^T K_BB a_B - 2 a_A^T K_AB a_B].
inline double weighted_mmd(const KernelSpec& kernel, const PointSet& a, const PointSet& b,
                           const Vec& alpha, double lambda) {
  require_same_dim(a.dim(), b.dim(), "weighted_mmd");
  if (alpha.size() != a.size() + b.size()) {
    throw DimensionError("weighted_mmd: alpha length must be |A| + |B|");
  }
  const Vec aa = alpha.head(a.size());
  const Vec ab = alpha.tail(b.size());
  const double qaa = aa.dot(kernel_matrix(kernel, a.points, a.points) * aa);
  const double qbb = ab.dot(kernel_matrix(kernel, b.points, b.points) * ab);
  const double qab = aa.dot(kernel_matrix(kernel, a.points, b.points) * ab);
  return (qaa + qbb - 2.0 * qab) / (2.0 * lambda);
}

// Gradient of weighted_mmd with respect to the B points (one row per B point).
inline Mat weighted_mmd_point_grad(const KernelSpec& kernel, const PointSet& a,
                                   const PointSet& b, const Vec& alpha, double lambda) {
  require_same_dim(a.dim(), b.dim(), "weighted_mmd_point_grad");
  const Vec aa = alpha.head(a.size());
  const Vec ab = alpha.tail(b.size());
  Mat g(b.size(), b.dim());
  for (Index m = 0; m < b.size(); ++m) {
    Vec acc = Vec::Zero(b.dim());
    for (Index j = 0; j < b.size(); ++j) {
      acc += ab[j] * kernel_grad_point(kernel, b.points.row(m), b.points.row(j));
    }
    for (Index i = 0; i < a.size(); ++i) {
      acc -= aa[i] * kernel_grad_point(kernel, b.points.row(m), a.points.row(i));
    }
    g.row(m) = (ab[m] / lambda) * acc.transpose();
  }
  return g;
}

// Gradient of mmd_distance(Standard) with respect to the B points.
inline Mat mmd_point_grad(const KernelSpec& kernel, const PointSet& a, const PointSet& b) {
  require_same_dim(a.dim(), b.dim(), "mmd_point_grad");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  Mat g(b.size(), b.dim());
  for (Index m = 0; m < b.size(); ++m) {
    Vec acc = Vec::Zero(b.dim());
    for (Index j = 0; j < b.size(); ++j) {
      acc += (2.0 / (nb * nb)) * kernel_grad_point(kernel, b.points.row(m), b.points.row(j));
    }
    for (Index i = 0; i < a.size(); ++i) {
      acc -= (2.0 / (na * nb)) * kernel_grad_point(kernel, b.points.row(m), a.points.row(i));
    }
    g.row(m) = acc.transpose();
  }
  return g;
}

// --- rank-1 Frobenius cross-check ----------------------------------------------

// (1/2lambda) <alpha alpha^T, Q>_F + sum H(alpha_i), computed by materializing
// the rank-1 matrix. Exists purely as an algebraic cross-check of dual_distance.
inline double frobenius_form(const DualState& state, const GramBlocks& gram) {
  if (state.alpha.size() != gram.size()) {
    throw DimensionError("frobenius_form: alpha length must match gram size");
  }
  const Mat s = state.alpha * state.alpha.transpose();
  const double quad = s.cwiseProduct(gram.q).sum() / (2.0 * state.lambda);
  return quad + entropy_sum(state.alpha);
}

// --- WGAN-GP linear critic -------------------------------------------------------

struct CriticState {
  Vec w;
  double b = 0.0;
  double gp_weight = 0.0;
};

// Mean critic score on A minus mean on B', with the gradient penalty
// specialized to a linear critic: the input gradient is w everywhere, so the
// unit-norm regularizer reduces to (|w| - 1)^2.
inline double wgan_critic_value(const CriticState& critic, const LabeledUnion& c) {
  require_same_dim(critic.w.size(), c.dim(), "wgan_critic_value");
  const Vec scores = (c.points * critic.w).array() + critic.b;
  const double mean_a = scores.head(c.a_count).mean();
  const double mean_b = scores.tail(c.b_count).mean();
  const double norm_w = critic.w.norm();
  return mean_a - mean_b - critic.gp_weight * (norm_w - 1.0) * (norm_w - 1.0);
}

struct WganGrads {
  Vec w;
  double b = 0.0;
  Mat points;  // one row per union point; A rows zero
};

inline WganGrads wgan_grad(const CriticState& critic, const LabeledUnion& c) {
  require_same_dim(critic.w.size(), c.dim(), "wgan_grad");
  WganGrads g;
  const Vec mean_a = c.points.topRows(c.a_count).colwise().mean();
  const Vec mean_b = c.points.bottomRows(c.b_count).colwise().mean();
  g.w = mean_a - mean_b;
  const double norm_w = critic.w.norm();
  if (norm_w > 0.0) {
    g.w -= critic.gp_weight * 2.0 * (norm_w - 1.0) * (critic.w / norm_w);
  }
  g.b = 0.0;  // the bias cancels between the two means
  g.points = Mat::Zero(c.size(), c.dim());
  const Vec per_b = -critic.w / static_cast<double>(c.b_count);
  for (Index i = c.a_count; i < c.size(); ++i) {
    g.points.row(i) = per_b.transpose();
  }
  return g;
}

}  // namespace dualalign
