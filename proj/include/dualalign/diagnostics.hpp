#pragma once

#include "dualalign/common.hpp"
#include "dualalign/csv.hpp"
#include "dualalign/kernels.hpp"
#include "dualalign/objectives.hpp"
#include "dualalign/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dualalign {

enum class RunStatus { Converged, Oscillating, Diverged, MaxIters };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::Oscillating: return "oscillating";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::MaxIters: return "max_iters";
  }
  return "unknown";
}

// Per-iteration record of a run: objective value, discriminator accuracy,
// squared mean gap |mu_A - mu_B'|^2 and squared covariance gap
// |Sigma_A - Sigma_B'|^2_F.
struct RunTrace {
  std::vector<int> iterations;
  std::vector<double> objective;
  std::vector<double> disc_accuracy;
  std::vector<double> mean_gap;
  std::vector<double> cov_gap;
  RunStatus status = RunStatus::MaxIters;

  std::size_t size() const { return iterations.size(); }

  void append(int iter, double obj, double acc, double mgap, double cgap) {
    iterations.push_back(iter);
    objective.push_back(obj);
    disc_accuracy.push_back(acc);
    mean_gap.push_back(mgap);
    cov_gap.push_back(cgap);
  }
};

inline void write_trace_csv(const std::string& path, const RunTrace& trace) {
  CsvWriter w(path, {"iter", "objective", "disc_acc", "mean_gap", "cov_gap"});
  for (std::size_t i = 0; i < trace.size(); ++i) {
    w.write_row_strings({format_int(trace.iterations[i]), format_double(trace.objective[i]),
                         format_double(trace.disc_accuracy[i]), format_double(trace.mean_gap[i]),
                         format_double(trace.cov_gap[i])});
  }
}

// Fraction of points whose score sign matches the label; a zero score counts
// as half correct so the zero discriminator scores exactly 0.5.
inline double accuracy_from_scores(const Vec& scores, const Vec& labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("accuracy_from_scores: size mismatch");
  }
  double correct = 0.0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (scores[i] == 0.0) {
      correct += 0.5;
    } else if ((scores[i] > 0.0) == (labels[i] > 0.0)) {
      correct += 1.0;
    }
  }
  return correct / static_cast<double>(scores.size());
}

inline double discriminator_accuracy(const PrimalDiscriminator& disc, const LabeledUnion& c) {
  require_same_dim(disc.w.size(), c.dim(), "discriminator_accuracy");
  const Vec scores = (c.points * disc.w).array() + disc.b;
  return accuracy_from_scores(scores, c.labels);
}

// Dual discriminator: kernel expansion score plus the likelihood-optimal bias.
inline double discriminator_accuracy(const DualState& state, const KernelSpec& kernel,
                                     const LabeledUnion& c) {
  const Vec u0 = dual_scores(state, kernel, c);
  const double b = optimal_bias(u0, c.labels);
  return accuracy_from_scores(u0.array() + b, c.labels);
}

inline double squared_mean_gap(const Mat& a_points, const Mat& b_points) {
  const Vec mu_a = a_points.colwise().mean();
  const Vec mu_b = b_points.colwise().mean();
  return (mu_a - mu_b).squaredNorm();
}

// Frobenius-squared gap between unbiased sample covariances; zero when either
// side is too small for a covariance estimate.
inline double squared_cov_gap(const Mat& a_points, const Mat& b_points) {
  if (a_points.rows() < 2 || b_points.rows() < 2) {
    return 0.0;
  }
  const Mat ca = empirical_moments(a_points).cov;
  const Mat cb = empirical_moments(b_points).cov;
  return (ca - cb).squaredNorm();
}

inline constexpr double kDivergenceThreshold = 1e12;

// Trace classification. Diverged if anything non-finite or past the magnitude
// threshold. Converged when the tail window of the objective has settled
// relative to the full excursion and the covariance gap did not grow.
// Oscillating when the tail still moves but shows no net drift between the
// last two windows; MaxIters otherwise. Window and tol defaults are
// calibration constants, not reproduced from any reference.
inline RunStatus classify_trace(const RunTrace& trace, std::size_t window, double tol) {
  if (window < 1 || trace.size() < 2 * window) {
    throw InsufficientData("classify_trace: trace shorter than 2*window");
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!std::isfinite(trace.objective[i]) || std::abs(trace.objective[i]) > kDivergenceThreshold ||
        !std::isfinite(trace.cov_gap[i]) || !std::isfinite(trace.mean_gap[i])) {
      return RunStatus::Diverged;
    }
  }
  const auto [min_it, max_it] = std::minmax_element(trace.objective.begin(), trace.objective.end());
  const double range = *max_it - *min_it;

  const std::size_t n = trace.size();
  auto window_mean = [&](std::size_t begin) {
    double s = 0.0;
    for (std::size_t i = begin; i < begin + window; ++i) s += trace.objective[i];
    return s / static_cast<double>(window);
  };
  const double tail_mean = window_mean(n - window);
  double tail_var = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    const double d = trace.objective[i] - tail_mean;
    tail_var += d * d;
  }
  const double tail_std = std::sqrt(tail_var / static_cast<double>(window));

  const bool cov_ok = trace.cov_gap.back() <= trace.cov_gap.front();
  if (range == 0.0) {
    return cov_ok ? RunStatus::Converged : RunStatus::MaxIters;
  }
  if (tail_std < tol * range) {
    return cov_ok ? RunStatus::Converged : RunStatus::MaxIters;
  }
  const double prev_mean = window_mean(n - 2 * window);
  if (std::abs(tail_mean - prev_mean) < tol * range) {
    return RunStatus::Oscillating;
  }
  return RunStatus::MaxIters;
}

// Default window: 10% of the trace (at least 2 samples).
inline RunStatus classify_trace(const RunTrace& trace, double tol = 0.05) {
  const std::size_t window = std::max<std::size_t>(2, trace.size() / 10);
  return classify_trace(trace, window, tol);
}

// Validation heuristic: relative drop of the objective over the run. Runs with
// ratio above a chosen threshold are "validated". Thresholds are this
// project's defaults.
inline double validation_ratio(const RunTrace& trace) {
  if (trace.size() < 2) {
    throw InsufficientData("validation_ratio: need at least 2 samples");
  }
  const auto [min_it, max_it] = std::minmax_element(trace.objective.begin(), trace.objective.end());
  const double range = *max_it - *min_it;
  if (range == 0.0) {
    return 0.0;
  }
  return (trace.objective.front() - trace.objective.back()) / range;
}

inline bool passes_validation(const RunTrace& trace, double threshold) {
  return validation_ratio(trace) > threshold;
}

}  // namespace dualalign
