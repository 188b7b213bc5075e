#pragma once

#include "dualalign/common.hpp"
#include "dualalign/diagnostics.hpp"
#include "dualalign/matchers.hpp"
#include "dualalign/objectives.hpp"
#include "dualalign/optimizers.hpp"
#include "dualalign/pointset.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace dualalign {

// Desk-scale unsupervised domain adaptation: a logistic classifier is trained
// on the labeled source; the target is aligned to the source by an
// alignment objective that never sees target labels; the held-out labels are
// used purely to score accuracy before and after alignment.

struct ToyDaResult {
  double source_accuracy = 0.0;
  double target_accuracy_before = 0.0;
  std::vector<double> target_accuracy_after;  // one entry per epoch
  RunStatus status = RunStatus::MaxIters;
};

// Newton ascent on the l2-regularized logistic log-likelihood; strictly
// concave for reg > 0, so a handful of damped steps reaches machine precision.
inline PrimalDiscriminator train_logistic_classifier(const TwoClassSet& data, double reg = 1e-3,
                                                     int max_iters = 100) {
  if (data.size() < 2) {
    throw InsufficientData("train_logistic_classifier: need at least 2 points");
  }
  const bool has_pos = (data.labels.array() > 0).any();
  const bool has_neg = (data.labels.array() < 0).any();
  if (!has_pos || !has_neg) {
    throw InvalidSpec("train_logistic_classifier: source must contain both classes");
  }
  const Index n = data.size();
  const Index d = data.dim();
  Vec w = Vec::Zero(d);
  double b = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vec u = (data.points * w).array() + b;
    Vec r(n), s(n);
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(data.labels[i] * u[i]);
      r[i] = data.labels[i] * (1.0 - p);
      s[i] = p * (1.0 - p);
    }
    Vec grad(d + 1);
    grad.head(d) = data.points.transpose() * r - reg * w;
    grad[d] = r.sum();
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12) break;
    Mat hess = Mat::Zero(d + 1, d + 1);
    hess.topLeftCorner(d, d) =
        data.points.transpose() * s.asDiagonal() * data.points + reg * Mat::Identity(d, d);
    hess.topRightCorner(d, 1) = data.points.transpose() * s;
    hess.bottomLeftCorner(1, d) = (data.points.transpose() * s).transpose();
    hess(d, d) = s.sum();
    hess(d, d) += 1e-12;  // bias row can be near-singular on tiny sets
    const Vec step = hess.llt().solve(grad);
    w += step.head(d);
    b += step[d];
  }
  return PrimalDiscriminator{w, b, reg};
}

inline double classifier_accuracy(const PrimalDiscriminator& clf, const Mat& points,
                                  const Vec& labels) {
  const Vec scores = (points * clf.w).array() + clf.b;
  return accuracy_from_scores(scores, labels);
}

struct ToyDaConfig {
  ObjectiveKind objective = ObjectiveKind::DualLinear;
  KernelSpec kernel = KernelSpec::linear();
  double lambda = 1.0;
  double gp_weight = 1.0;
  DualConstraints constraints{DualConstraints::Mode::Penalties, 0.1, 0.0, true};
  double clamp_eps = 1e-6;
  int epochs = 10;
  double classifier_reg = 1e-3;
};

// target_labels enter this function only through classifier_accuracy —
// alignment itself runs on unlabeled coordinates.
inline ToyDaResult toy_da_evaluate(const TwoClassSet& source, const PointSet& target,
                                   const Vec& target_labels_heldout,
                                   const MatcherParams& matcher0, const ToyDaConfig& da,
                                   const OptimizerConfig& opt) {
  require_same_dim(source.dim(), target.dim(), "toy_da_evaluate");
  if (target_labels_heldout.size() != target.size()) {
    throw DimensionError("toy_da_evaluate: target label count mismatch");
  }
  if (da.epochs < 1) {
    throw InvalidSpec("toy_da_evaluate: epochs must be >= 1");
  }

  const PrimalDiscriminator clf = train_logistic_classifier(source, da.classifier_reg);

  ToyDaResult result;
  result.source_accuracy = classifier_accuracy(clf, source.points, source.labels);
  result.target_accuracy_before =
      classifier_accuracy(clf, target.points, target_labels_heldout);

  // One alignment run with snapshots at epoch boundaries.
  OptimizerConfig cfg = opt;
  const int epoch_len = std::max(1, cfg.iterations / da.epochs);
  cfg.iterations = epoch_len * da.epochs;
  cfg.snapshot_every = epoch_len;

  AlignmentProblem problem;
  problem.a = PointSet{source.points, DomainTag::SourceA};
  problem.b = target;
  problem.matcher0 = matcher0;
  problem.objective = da.objective;
  problem.kernel = da.kernel;
  problem.lambda = da.lambda;
  problem.gp_weight = da.gp_weight;
  problem.constraints = da.constraints;
  problem.clamp_eps = da.clamp_eps;

  const RunResult run = run_alignment(problem, cfg);
  result.status = run.trace.status;

  result.target_accuracy_after.reserve(static_cast<std::size_t>(da.epochs));
  for (const auto& [iter, points] : run.snapshots) {
    if (iter == 0) continue;  // initial snapshot = "before"
    result.target_accuracy_after.push_back(
        classifier_accuracy(clf, points, target_labels_heldout));
  }
  return result;
}

inline void write_toy_da_csv(const std::string& epochs_path, const std::string& summary_path,
                             const ToyDaResult& r) {
  {
    CsvWriter w(epochs_path, {"epoch", "target_acc"});
    for (std::size_t e = 0; e < r.target_accuracy_after.size(); ++e) {
      w.write_row_strings(
          {format_int(static_cast<long long>(e + 1)), format_double(r.target_accuracy_after[e])});
    }
  }
  {
    CsvWriter w(summary_path,
                {"source_acc", "target_acc_before", "target_acc_final", "status"});
    const double final_acc =
        r.target_accuracy_after.empty() ? r.target_accuracy_before : r.target_accuracy_after.back();
    w.write_row_strings({format_double(r.source_accuracy),
                         format_double(r.target_accuracy_before), format_double(final_acc),
                         to_string(r.status)});
  }
}

}  // namespace dualalign
