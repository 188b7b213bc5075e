#pragma once

#include "dualalign/common.hpp"
#include "dualalign/diagnostics.hpp"
#include "dualalign/kernels.hpp"
#include "dualalign/matchers.hpp"
#include "dualalign/objectives.hpp"
#include "dualalign/pointset.hpp"
#include "dualalign/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace dualalign {

// --- toy saddle system -------------------------------------------------------
//
// min_x max_y xy with the simultaneous update x' = x - a y, y' = y + a x.
// Each step multiplies the squared radius by exactly (1 + a^2), so the
// iterates spiral outward instead of reaching the saddle at the origin.

struct SaddleState {
  double x = 0.0;
  double y = 0.0;
  double step = 0.1;
};

inline SaddleState saddle_step(const SaddleState& s) {
  return SaddleState{s.x - s.step * s.y, s.y + s.step * s.x, s.step};
}

struct SaddlePoint {
  int iter;
  double x;
  double y;
  double r_sq;
};

inline std::vector<SaddlePoint> simulate_saddle(double x0, double y0, double step, int iters) {
  std::vector<SaddlePoint> out;
  out.reserve(static_cast<std::size_t>(iters) + 1);
  SaddleState s{x0, y0, step};
  for (int t = 0; t <= iters; ++t) {
    out.push_back({t, s.x, s.y, s.x * s.x + s.y * s.y});
    s = saddle_step(s);
  }
  return out;
}

// --- optimizer configuration ---------------------------------------------------

enum class StepMode { Simultaneous, Alternating };
enum class ThetaRule { Sgd, Adam };
enum class GeneratorLoss { NonSaturating, NegatedScore };
enum class PrimalObjective { Logistic, WganGp };
enum class ObjectiveKind { Primal, Wgan, DualLinear, DualKernel, Mmd };

struct OptimizerConfig {
  double lr_theta = 0.05;
  double lr_disc = 0.05;
  double lr_alpha = 0.05;
  StepMode mode = StepMode::Simultaneous;
  int disc_steps_per_theta_step = 1;
  int iterations = 1000;
  int batch_size = 0;  // 0 = full batch
  int disc_pretrain_steps = 0;
  std::uint64_t seed = 0;
  int trace_every = 1;
  int snapshot_every = 0;  // 0 = no snapshots
  ThetaRule theta_rule = ThetaRule::Sgd;
  GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;

  void validate() const {
    if (!(lr_theta >= 0.0) || !(lr_disc >= 0.0) || !(lr_alpha >= 0.0)) {
      throw InvalidSpec("learning rates must be finite and >= 0 (0 freezes that block)");
    }
    if (iterations < 1) throw InvalidSpec("iterations must be >= 1");
    if (disc_steps_per_theta_step < 1) throw InvalidSpec("disc steps per theta step must be >= 1");
    if (trace_every < 1) throw InvalidSpec("trace_every must be >= 1");
    if (batch_size < 0 || snapshot_every < 0 || disc_pretrain_steps < 0) {
      throw InvalidSpec("batch_size, snapshot_every, disc_pretrain_steps must be >= 0");
    }
  }
};

// Handling of the dual constraints. Penalties with project_box reproduces the
// default recipe (box projection + lambda1 balance penalty); project_box=false
// is the pure penalty variant; ExactProjection projects onto the balance
// hyperplane intersected with the box and ignores the penalty coefficients.
struct DualConstraints {
  enum class Mode { Penalties, ExactProjection };
  Mode mode = Mode::Penalties;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool project_box = true;
};

struct RunResult {
  RunTrace trace;
  MatcherParams matcher;
  Mat aligned_points;  // final M_theta(B)
  std::vector<std::pair<int, Mat>> snapshots;
  Vec disc_w;          // final discriminator/critic weights when applicable
  double disc_b = 0.0;
  Vec alpha;           // final dual weights when applicable
};

namespace detail {

struct AdamState {
  Vec m;
  Vec v;
  int t = 0;
};

class ThetaUpdater {
 public:
  ThetaUpdater(ThetaRule rule, double lr, Index param_count) : rule_(rule), lr_(lr) {
    if (rule_ == ThetaRule::Adam) {
      adam_.m = Vec::Zero(param_count);
      adam_.v = Vec::Zero(param_count);
    }
  }

  void step(MatcherParams& params, const MatcherParams& grad) {
    if (lr_ == 0.0) return;
    Vec flat = flatten(params);
    const Vec g = flatten(grad);
    if (rule_ == ThetaRule::Sgd) {
      flat -= lr_ * g;
    } else {
      constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
      adam_.t += 1;
      adam_.m = beta1 * adam_.m + (1.0 - beta1) * g;
      adam_.v = beta2 * adam_.v + (1.0 - beta2) * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(beta1, adam_.t);
      const double c2 = 1.0 - std::pow(beta2, adam_.t);
      for (Index i = 0; i < flat.size(); ++i) {
        flat[i] -= lr_ * (adam_.m[i] / c1) / (std::sqrt(adam_.v[i] / c2) + eps);
      }
    }
    params = unflatten(params, flat);
  }

 private:
  ThetaRule rule_;
  double lr_;
  AdamState adam_;
};

struct Batch {
  std::vector<Index> a_idx;
  std::vector<Index> b_idx;
  bool full = true;
};

// Balanced batch: half from A, half from B, sampled without replacement.
inline Batch sample_batch(Index na, Index nb, int batch_size, Xoshiro256pp& rng) {
  Batch batch;
  const Index n = na + nb;
  if (batch_size <= 0 || batch_size >= n) {
    return batch;
  }
  batch.full = false;
  const Index want_a = std::min<Index>(na, std::max<Index>(1, batch_size / 2));
  const Index want_b = std::min<Index>(nb, std::max<Index>(1, batch_size - want_a));
  auto draw = [&](Index pool, Index want) {
    std::vector<Index> idx(pool);
    for (Index i = 0; i < pool; ++i) idx[i] = i;
    for (Index i = 0; i < want; ++i) {
      const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(pool - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  batch.a_idx = draw(na, want_a);
  batch.b_idx = draw(nb, want_b);
  return batch;
}

inline Mat select_rows(const Mat& m, const std::vector<Index>& idx) {
  Mat out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

// Point gradient rows the matcher descends for the logistic primal objective.
// NegatedScore descends the discriminator likelihood itself; NonSaturating
// descends -sum_B log(sigma(w^T x + b)), whose gradient keeps magnitude when
// the discriminator confidently rejects B'.
inline Mat logistic_generator_grads(const PrimalDiscriminator& disc, const LabeledUnion& c,
                                    GeneratorLoss loss) {
  const Vec u = (c.points * disc.w).array() + disc.b;
  Mat g = Mat::Zero(c.size(), c.dim());
  for (Index j = c.a_count; j < c.size(); ++j) {
    double coeff;
    if (loss == GeneratorLoss::NegatedScore) {
      coeff = sigmoid(-c.labels[j] * u[j]) * c.labels[j];
    } else {
      coeff = -sigmoid(-u[j]);
    }
    g.row(j) = coeff * disc.w.transpose();
  }
  return g;
}

inline void clamp_alpha(Vec& alpha, double eps) {
  for (Index i = 0; i < alpha.size(); ++i) {
    alpha[i] = std::clamp(alpha[i], eps, 1.0 - eps);
  }
}

// Projection onto {sum_A alpha = sum_B alpha} intersected with the box, via a
// few alternating passes (hyperplane step, then clamp).
inline void exact_balance_projection(Vec& alpha, Index a_count, double eps) {
  const Index n = alpha.size();
  Vec y(n);
  y.head(a_count).setConstant(1.0);
  y.tail(n - a_count).setConstant(-1.0);
  for (int pass = 0; pass < 8; ++pass) {
    const double gap = y.dot(alpha);
    alpha -= (gap / static_cast<double>(n)) * y;
    clamp_alpha(alpha, eps);
  }
}

inline bool diverged(double objective) {
  return !std::isfinite(objective) || std::abs(objective) > kDivergenceThreshold;
}

}  // namespace detail

// --- primal min-max alignment ----------------------------------------------------

struct PrimalRunSpec {
  PrimalObjective objective = PrimalObjective::Logistic;
  double lambda = 1.0;     // logistic l2 coefficient
  double gp_weight = 1.0;  // wgan gradient-penalty weight
};

inline RunResult run_primal_alignment(const PointSet& a, const PointSet& b,
                                      const MatcherParams& matcher0, const PrimalRunSpec& spec,
                                      const OptimizerConfig& cfg) {
  cfg.validate();
  require_same_dim(a.dim(), b.dim(), "run_primal_alignment");
  const Index d = a.dim();
  Xoshiro256pp rng(cfg.seed);

  MatcherParams matcher = matcher0;
  detail::ThetaUpdater theta(cfg.theta_rule, cfg.lr_theta, parameter_count(matcher));
  PrimalDiscriminator disc{Vec::Zero(d), 0.0, spec.lambda};
  CriticState critic{Vec::Zero(d), 0.0, spec.gp_weight};
  const bool logistic = spec.objective == PrimalObjective::Logistic;

  RunResult result;
  result.matcher = matcher;

  auto full_union = [&]() { return make_labeled_union(a, apply(matcher, b)); };

  auto objective_value = [&](const LabeledUnion& c) {
    return logistic ? primal_distance(disc, c) : wgan_critic_value(critic, c);
  };

  auto disc_step = [&](const LabeledUnion& c) {
    if (logistic) {
      const PrimalGrads g = primal_grad(disc, c);
      disc.w += cfg.lr_disc * g.w;
      disc.b += cfg.lr_disc * g.b;
    } else {
      const WganGrads g = wgan_grad(critic, c);
      critic.w += cfg.lr_disc * g.w;
      critic.b += cfg.lr_disc * g.b;
    }
  };

  auto theta_point_grads = [&](const LabeledUnion& c) -> Mat {
    if (logistic) {
      return detail::logistic_generator_grads(disc, c, cfg.generator_loss);
    }
    return wgan_grad(critic, c).points;
  };

  for (int p = 0; p < cfg.disc_pretrain_steps; ++p) {
    disc_step(full_union());
  }

  auto record = [&](int iter) {
    const PointSet bprime = apply(matcher, b);
    const LabeledUnion c = make_labeled_union(a, bprime);
    const double obj = objective_value(c);
    const double acc = logistic
                           ? discriminator_accuracy(disc, c)
                           : discriminator_accuracy(PrimalDiscriminator{critic.w, critic.b, 0.0}, c);
    result.trace.append(iter, obj, acc, squared_mean_gap(a.points, bprime.points),
                        squared_cov_gap(a.points, bprime.points));
    return obj;
  };

  bool blew_up = false;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0) {
      result.snapshots.emplace_back(t, apply(matcher, b).points);
    }
    if (t % cfg.trace_every == 0) {
      const double obj = record(t);
      if (detail::diverged(obj)) {
        result.trace.status = RunStatus::Diverged;
        blew_up = true;
        break;
      }
    }

    detail::Batch batch = detail::sample_batch(a.size(), b.size(), cfg.batch_size, rng);
    PointSet bprime = apply(matcher, b);
    LabeledUnion c;
    if (batch.full) {
      c = make_labeled_union(a, bprime);
    } else {
      c = make_labeled_union(
          PointSet{detail::select_rows(a.points, batch.a_idx), DomainTag::SourceA},
          PointSet{detail::select_rows(bprime.points, batch.b_idx), DomainTag::TargetB});
    }

    const int disc_steps = cfg.mode == StepMode::Alternating ? cfg.disc_steps_per_theta_step : 1;
    Mat point_grads;
    if (cfg.mode == StepMode::Simultaneous) {
      point_grads = theta_point_grads(c);  // grads at pre-step discriminator
      disc_step(c);
    } else {
      for (int k = 0; k < disc_steps; ++k) disc_step(c);
      point_grads = theta_point_grads(c);
    }

    Mat grad_b_rows;
    if (batch.full) {
      grad_b_rows = point_grads.bottomRows(b.size());
    } else {
      grad_b_rows = Mat::Zero(b.size(), d);
      const Index batch_a = static_cast<Index>(batch.a_idx.size());
      for (std::size_t i = 0; i < batch.b_idx.size(); ++i) {
        grad_b_rows.row(batch.b_idx[i]) = point_grads.row(batch_a + static_cast<Index>(i));
      }
    }
    theta.step(matcher, backprop_params(matcher, b, grad_b_rows));

    const bool params_ok = logistic ? disc.w.allFinite() && std::isfinite(disc.b)
                                    : critic.w.allFinite() && std::isfinite(critic.b);
    if (!params_ok || !params_finite(matcher)) {
      record(t + 1);
      result.trace.status = RunStatus::Diverged;
      blew_up = true;
      break;
    }
  }

  if (!blew_up) {
    const double final_obj = record(cfg.iterations);
    result.trace.status = detail::diverged(final_obj) ? RunStatus::Diverged : RunStatus::MaxIters;
  }
  result.matcher = matcher;
  result.aligned_points = apply(matcher, b).points;
  if (cfg.snapshot_every > 0) {
    result.snapshots.emplace_back(cfg.iterations, result.aligned_points);
  }
  result.disc_w = logistic ? disc.w : critic.w;
  result.disc_b = logistic ? disc.b : critic.b;
  return result;
}

// --- dual min-min alignment --------------------------------------------------------

inline RunResult run_dual_alignment(const PointSet& a, const PointSet& b,
                                    const MatcherParams& matcher0, const KernelSpec& kernel_in,
                                    const OptimizerConfig& cfg,
                                    const DualConstraints& constraints, double lambda,
                                    double clamp_eps = 1e-6) {
  cfg.validate();
  require_same_dim(a.dim(), b.dim(), "run_dual_alignment");
  const Index n = a.size() + b.size();
  Xoshiro256pp rng(cfg.seed);

  MatcherParams matcher = matcher0;
  detail::ThetaUpdater theta(cfg.theta_rule, cfg.lr_theta, parameter_count(matcher));

  // Bandwidth resolved once at run start from the initial union.
  KernelSpec kernel = kernel_in;
  {
    const LabeledUnion c0 = make_labeled_union(a, apply(matcher, b));
    kernel = resolve_bandwidth(kernel, c0.points);
  }

  const bool exact = constraints.mode == DualConstraints::Mode::ExactProjection;
  DualState state;
  state.alpha = Vec::Constant(n, 0.5);  // uninformative start
  state.lambda = lambda;
  state.lambda1 = exact ? 0.0 : constraints.lambda1;
  state.lambda2 = exact ? 0.0 : constraints.lambda2;
  state.clamp_eps = clamp_eps;

  RunResult result;
  result.matcher = matcher;

  auto project = [&](Vec& alpha) {
    if (exact) {
      detail::exact_balance_projection(alpha, a.size(), clamp_eps);
    } else if (constraints.project_box) {
      detail::clamp_alpha(alpha, clamp_eps);
    }
  };

  auto alpha_step_full = [&](const GramBlocks& gram, const KernelSpec& k,
                             const LabeledUnion& c) {
    const DualGrads g = dual_grad(state, gram, k, c);
    state.alpha -= cfg.lr_alpha * g.alpha;
    project(state.alpha);
  };

  // Pretraining: alpha-only updates with frozen matcher.
  if (cfg.disc_pretrain_steps > 0) {
    const LabeledUnion c = make_labeled_union(a, apply(matcher, b));
    const GramBlocks gram = build_gram(kernel, c);
    for (int p = 0; p < cfg.disc_pretrain_steps; ++p) alpha_step_full(gram, kernel, c);
  }

  auto record = [&](int iter) {
    const PointSet bprime = apply(matcher, b);
    const LabeledUnion c = make_labeled_union(a, bprime);
    const GramBlocks gram = build_gram(kernel, c);
    const double obj = dual_distance(state, gram);
    const double acc = discriminator_accuracy(state, kernel, c);
    result.trace.append(iter, obj, acc, squared_mean_gap(a.points, bprime.points),
                        squared_cov_gap(a.points, bprime.points));
    return obj;
  };

  bool blew_up = false;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0) {
      result.snapshots.emplace_back(t, apply(matcher, b).points);
    }
    if (t % cfg.trace_every == 0) {
      const double obj = record(t);
      if (detail::diverged(obj)) {
        result.trace.status = RunStatus::Diverged;
        blew_up = true;
        break;
      }
    }

    detail::Batch batch = detail::sample_batch(a.size(), b.size(), cfg.batch_size, rng);
    const PointSet bprime = apply(matcher, b);

    if (batch.full) {
      const LabeledUnion c = make_labeled_union(a, bprime);
      const GramBlocks gram = build_gram(kernel, c);
      Mat point_grads;
      if (cfg.mode == StepMode::Simultaneous) {
        const DualGrads g = dual_grad(state, gram, kernel, c);
        state.alpha -= cfg.lr_alpha * g.alpha;
        project(state.alpha);
        point_grads = g.points.bottomRows(b.size());
      } else {
        for (int k = 0; k < cfg.disc_steps_per_theta_step; ++k) alpha_step_full(gram, kernel, c);
        const DualGrads g = dual_grad(state, gram, kernel, c);
        point_grads = g.points.bottomRows(b.size());
      }
      theta.step(matcher, backprop_params(matcher, b, point_grads));
    } else {
      // Mini-batch: slice alpha for in-batch points, step on the batch
      // subproblem, scatter the updated slice back.
      const Index ba = static_cast<Index>(batch.a_idx.size());
      const Index bb = static_cast<Index>(batch.b_idx.size());
      const LabeledUnion c = make_labeled_union(
          PointSet{detail::select_rows(a.points, batch.a_idx), DomainTag::SourceA},
          PointSet{detail::select_rows(bprime.points, batch.b_idx), DomainTag::TargetB});
      const GramBlocks gram = build_gram(kernel, c);
      DualState slice = state;
      slice.alpha.resize(ba + bb);
      for (Index i = 0; i < ba; ++i) slice.alpha[i] = state.alpha[batch.a_idx[i]];
      for (Index i = 0; i < bb; ++i) slice.alpha[ba + i] = state.alpha[a.size() + batch.b_idx[i]];

      auto slice_alpha_step = [&]() {
        const DualGrads g = dual_grad(slice, gram, kernel, c);
        slice.alpha -= cfg.lr_alpha * g.alpha;
        if (exact) {
          detail::exact_balance_projection(slice.alpha, ba, clamp_eps);
        } else if (constraints.project_box) {
          detail::clamp_alpha(slice.alpha, clamp_eps);
        }
      };

      Mat point_grads;
      if (cfg.mode == StepMode::Simultaneous) {
        const DualGrads g = dual_grad(slice, gram, kernel, c);
        slice.alpha -= cfg.lr_alpha * g.alpha;
        if (exact) {
          detail::exact_balance_projection(slice.alpha, ba, clamp_eps);
        } else if (constraints.project_box) {
          detail::clamp_alpha(slice.alpha, clamp_eps);
        }
        point_grads = g.points.bottomRows(bb);
      } else {
        for (int k = 0; k < cfg.disc_steps_per_theta_step; ++k) slice_alpha_step();
        const DualGrads g = dual_grad(slice, gram, kernel, c);
        point_grads = g.points.bottomRows(bb);
      }

      for (Index i = 0; i < ba; ++i) state.alpha[batch.a_idx[i]] = slice.alpha[i];
      for (Index i = 0; i < bb; ++i) state.alpha[a.size() + batch.b_idx[i]] = slice.alpha[ba + i];

      Mat grad_b_rows = Mat::Zero(b.size(), b.dim());
      for (Index i = 0; i < bb; ++i) grad_b_rows.row(batch.b_idx[i]) = point_grads.row(i);
      theta.step(matcher, backprop_params(matcher, b, grad_b_rows));
    }

    if (!state.alpha.allFinite() || !params_finite(matcher)) {
      record(t + 1);
      result.trace.status = RunStatus::Diverged;
      blew_up = true;
      break;
    }
  }

  if (!blew_up) {
    const double final_obj = record(cfg.iterations);
    result.trace.status = detail::diverged(final_obj) ? RunStatus::Diverged : RunStatus::MaxIters;
  }
  result.matcher = matcher;
  result.aligned_points = apply(matcher, b).points;
  if (cfg.snapshot_every > 0) {
    result.snapshots.emplace_back(cfg.iterations, result.aligned_points);
  }
  result.alpha = state.alpha;
  return result;
}

// --- plain MMD descent ---------------------------------------------------------------

inline RunResult run_mmd_alignment(const PointSet& a, const PointSet& b,
                                   const MatcherParams& matcher0, const KernelSpec& kernel_in,
                                   const OptimizerConfig& cfg) {
  cfg.validate();
  require_same_dim(a.dim(), b.dim(), "run_mmd_alignment");
  MatcherParams matcher = matcher0;
  detail::ThetaUpdater theta(cfg.theta_rule, cfg.lr_theta, parameter_count(matcher));

  KernelSpec kernel = kernel_in;
  {
    const LabeledUnion c0 = make_labeled_union(a, apply(matcher, b));
    kernel = resolve_bandwidth(kernel, c0.points);
  }

  RunResult result;
  result.matcher = matcher;

  // There is no discriminator in an MMD run; accuracy is recorded as the
  // uninformative 0.5.
  auto record = [&](int iter) {
    const PointSet bprime = apply(matcher, b);
    const double obj = mmd_distance(kernel, a, bprime, MmdNormalization::Standard);
    result.trace.append(iter, obj, 0.5, squared_mean_gap(a.points, bprime.points),
                        squared_cov_gap(a.points, bprime.points));
    return obj;
  };

  bool blew_up = false;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0) {
      result.snapshots.emplace_back(t, apply(matcher, b).points);
    }
    if (t % cfg.trace_every == 0) {
      const double obj = record(t);
      if (detail::diverged(obj)) {
        result.trace.status = RunStatus::Diverged;
        blew_up = true;
        break;
      }
    }
    const PointSet bprime = apply(matcher, b);
    const Mat g = mmd_point_grad(kernel, a, bprime);
    theta.step(matcher, backprop_params(matcher, b, g));
    if (!params_finite(matcher)) {
      record(t + 1);
      result.trace.status = RunStatus::Diverged;
      blew_up = true;
      break;
    }
  }

  if (!blew_up) {
    const double final_obj = record(cfg.iterations);
    result.trace.status = detail::diverged(final_obj) ? RunStatus::Diverged : RunStatus::MaxIters;
  }
  result.matcher = matcher;
  result.aligned_points = apply(matcher, b).points;
  if (cfg.snapshot_every > 0) {
    result.snapshots.emplace_back(cfg.iterations, result.aligned_points);
  }
  return result;
}

// --- dispatch over the objective families ----------------------------------------------

struct AlignmentProblem {
  PointSet a;
  PointSet b;
  MatcherParams matcher0;
  ObjectiveKind objective = ObjectiveKind::DualLinear;
  KernelSpec kernel = KernelSpec::linear();  // used by DualKernel and Mmd
  double lambda = 1.0;
  double gp_weight = 1.0;
  DualConstraints constraints;
  double clamp_eps = 1e-6;
};

inline RunResult run_alignment(const AlignmentProblem& p, const OptimizerConfig& cfg) {
  switch (p.objective) {
    case ObjectiveKind::Primal:
      return run_primal_alignment(p.a, p.b, p.matcher0,
                                  PrimalRunSpec{PrimalObjective::Logistic, p.lambda, 0.0}, cfg);
    case ObjectiveKind::Wgan:
      return run_primal_alignment(
          p.a, p.b, p.matcher0, PrimalRunSpec{PrimalObjective::WganGp, p.lambda, p.gp_weight}, cfg);
    case ObjectiveKind::DualLinear:
      return run_dual_alignment(p.a, p.b, p.matcher0, KernelSpec::linear(), cfg, p.constraints,
                                p.lambda, p.clamp_eps);
    case ObjectiveKind::DualKernel: {
      KernelSpec k = p.kernel;
      if (k.kind != KernelKind::Gaussian) {
        k = KernelSpec{KernelKind::Gaussian, p.kernel.bandwidth};
      }
      return run_dual_alignment(p.a, p.b, p.matcher0, k, cfg, p.constraints, p.lambda,
                                p.clamp_eps);
    }
    case ObjectiveKind::Mmd:
      return run_mmd_alignment(p.a, p.b, p.matcher0, p.kernel, cfg);
  }
  throw InvalidSpec("unknown objective kind");
}

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Primal: return "primal";
    case ObjectiveKind::Wgan: return "wgan";
    case ObjectiveKind::DualLinear: return "dual_linear";
    case ObjectiveKind::DualKernel: return "dual_kernel";
    case ObjectiveKind::Mmd: return "mmd";
  }
  return "unknown";
}

}  // namespace dualalign
