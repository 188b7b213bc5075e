#pragma once

#include "dualalign/common.hpp"
#include "dualalign/kernels.hpp"
#include "dualalign/objectives.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace dualalign {

// High-precision solver for the constrained dual problem
//
//   min_{alpha in (0,1)^n}  (1/2lambda) alpha^T Q alpha + sum_i H(alpha_i)
//   s.t.                    sum_A alpha = sum_B alpha
//
// The balance constraint is dualized with a scalar multiplier nu on y^T alpha;
// for fixed nu the inner problem is strictly convex with an entropic barrier
// keeping the minimizer interior, so damped Newton converges to machine
// precision. y^T alpha*(nu) is strictly decreasing in nu (its derivative is
// -y^T Hess^{-1} y < 0), which makes the outer root-find a plain bisection.
// At the solution, nu equals the optimal bias of the recovered discriminator.
struct DualOptimum {
  Vec alpha;
  double value = 0.0;  // quadratic + entropy at the optimum (no penalties)
  double bias = 0.0;   // multiplier nu of the balance constraint
  bool converged = false;
};

namespace detail {

struct InnerResult {
  Vec alpha;
  bool converged = false;
};

inline double inner_value(const Mat& q, double lambda, const Vec& y, double nu,
                          const Vec& alpha) {
  return alpha.dot(q * alpha) / (2.0 * lambda) + entropy_sum(alpha) + nu * y.dot(alpha);
}

inline InnerResult minimize_inner(const Mat& q, double lambda, const Vec& y, double nu,
                                  Vec alpha, double grad_tol, int max_iters) {
  const Index n = alpha.size();
  const double boundary = 1e-15;
  InnerResult res;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vec qa = q * alpha;
    Vec grad = qa / lambda + nu * y;
    Vec hess_diag(n);
    for (Index i = 0; i < n; ++i) {
      grad[i] += std::log(alpha[i] / (1.0 - alpha[i]));
      hess_diag[i] = 1.0 / (alpha[i] * (1.0 - alpha[i]));
    }
    if (grad.lpNorm<Eigen::Infinity>() < grad_tol) {
      res.alpha = alpha;
      res.converged = true;
      return res;
    }
    Mat hess = q / lambda;
    hess.diagonal() += hess_diag;
    Eigen::LLT<Mat> llt(hess);
    Vec step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(-grad);
    } else {
      step = -grad.cwiseQuotient(hess_diag);  // diagonal fallback
    }
    // Cap the step so iterates stay strictly inside (0, 1).
    double t_max = 1.0;
    for (Index i = 0; i < n; ++i) {
      if (step[i] > 0.0) {
        t_max = std::min(t_max, (1.0 - boundary - alpha[i]) / step[i]);
      } else if (step[i] < 0.0) {
        t_max = std::min(t_max, (boundary - alpha[i]) / step[i]);
      }
    }
    double t = std::min(1.0, 0.995 * t_max);
    const double f0 = inner_value(q, lambda, y, nu, alpha);
    const double slope = grad.dot(step);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec cand = alpha + t * step;
      if (inner_value(q, lambda, y, nu, cand) <= f0 + 1e-4 * t * slope) {
        alpha = cand;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      break;  // line search stalled at numerical precision
    }
  }
  res.alpha = alpha;
  res.converged = false;
  return res;
}

}  // namespace detail

inline DualOptimum solve_dual_constrained(const GramBlocks& gram, double lambda,
                                          double grad_tol = 1e-12) {
  const Index n = gram.size();
  const Index na = gram.a_count();
  Vec y(n);
  y.head(na).setConstant(1.0);
  y.tail(n - na).setConstant(-1.0);

  Vec alpha = Vec::Constant(n, 0.5);
  auto residual = [&](double nu) {
    const auto inner = detail::minimize_inner(gram.q, lambda, y, nu, alpha, grad_tol, 200);
    alpha = inner.alpha;  // warm start across bisection steps
    return y.dot(alpha);
  };

  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 64 && residual(lo) < 0.0; ++k) lo *= 2.0;
  for (int k = 0; k < 64 && residual(hi) > 0.0; ++k) hi *= 2.0;
  for (int k = 0; k < 120; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double nu = 0.5 * (lo + hi);
  const auto inner = detail::minimize_inner(gram.q, lambda, y, nu, alpha, grad_tol, 200);

  DualOptimum out;
  out.alpha = inner.alpha;
  out.bias = nu;
  out.converged = inner.converged;
  out.value = out.alpha.dot(gram.q * out.alpha) / (2.0 * lambda) + entropy_sum(out.alpha);
  return out;
}

// Unconstrained variant (no balance multiplier); the stationary point of
// Eq-2-style minimization where alpha_i = sigma(-(Q alpha)_i / lambda).
inline DualOptimum solve_dual_unconstrained(const GramBlocks& gram, double lambda,
                                            double grad_tol = 1e-12) {
  const Index n = gram.size();
  const Vec y = Vec::Zero(n);
  const auto inner =
      detail::minimize_inner(gram.q, lambda, y, 0.0, Vec::Constant(n, 0.5), grad_tol, 200);
  DualOptimum out;
  out.alpha = inner.alpha;
  out.bias = 0.0;
  out.converged = inner.converged;
  out.value = out.alpha.dot(gram.q * out.alpha) / (2.0 * lambda) + entropy_sum(out.alpha);
  return out;
}

}  // namespace dualalign
