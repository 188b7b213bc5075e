#pragma once

#include "dualalign/common.hpp"
#include "dualalign/pointset.hpp"

#include <utility>
#include <variant>

namespace dualalign {

// M_theta(B) = B + offsets; offset storage keeps B itself immutable and makes
// zero offsets the identity.
struct FreePointsParams {
  Mat offsets;  // |B| x d
};

// M_theta(B) = B * matrix^T + translation
struct AffineParams {
  Mat matrix;       // d x d
  Vec translation;  // d
};

using MatcherParams = std::variant<FreePointsParams, AffineParams>;

inline MatcherParams identity_free_points(Index n, Index d) {
  return FreePointsParams{Mat::Zero(n, d)};
}

inline MatcherParams identity_affine(Index d) {
  return AffineParams{Mat::Identity(d, d), Vec::Zero(d)};
}

inline PointSet apply(const MatcherParams& params, const PointSet& b) {
  if (const auto* fp = std::get_if<FreePointsParams>(&params)) {
    if (fp->offsets.rows() != b.size()) {
      throw InvalidParams("free-points offsets count must equal |B|");
    }
    require_same_dim(fp->offsets.cols(), b.dim(), "matcher apply");
    return PointSet{b.points + fp->offsets, DomainTag::TargetB};
  }
  const auto& aff = std::get<AffineParams>(params);
  require_same_dim(aff.matrix.cols(), b.dim(), "matcher apply");
  Mat out = b.points * aff.matrix.transpose();
  out.rowwise() += aff.translation.transpose();
  return PointSet{std::move(out), DomainTag::TargetB};
}

// Chain rule from d objective / d B' (one row per B point) to the matcher
// parameter space. Returns a gradient in the same shape as params.
inline MatcherParams backprop_params(const MatcherParams& params, const PointSet& b,
                                     const Mat& grad_points) {
  if (grad_points.rows() != b.size() || grad_points.cols() != b.dim()) {
    throw DimensionError("backprop_params: grad_points must be |B| x d");
  }
  if (std::holds_alternative<FreePointsParams>(params)) {
    return FreePointsParams{grad_points};
  }
  const auto& aff = std::get<AffineParams>(params);
  require_same_dim(aff.matrix.cols(), b.dim(), "backprop_params");
  AffineParams grad;
  grad.matrix = grad_points.transpose() * b.points;  // sum_i g_i b_i^T
  grad.translation = grad_points.colwise().sum().transpose();
  return grad;
}

inline Index parameter_count(const MatcherParams& params) {
  if (const auto* fp = std::get_if<FreePointsParams>(&params)) {
    return fp->offsets.size();
  }
  const auto& aff = std::get<AffineParams>(params);
  return aff.matrix.size() + aff.translation.size();
}

// Row-major matrix entries then translation; offsets row-major. This is the
// documented order for the flat CSV form.
inline Vec flatten(const MatcherParams& params) {
  Vec out(parameter_count(params));
  if (const auto* fp = std::get_if<FreePointsParams>(&params)) {
    Index t = 0;
    for (Index i = 0; i < fp->offsets.rows(); ++i) {
      for (Index j = 0; j < fp->offsets.cols(); ++j) out[t++] = fp->offsets(i, j);
    }
    return out;
  }
  const auto& aff = std::get<AffineParams>(params);
  Index t = 0;
  for (Index i = 0; i < aff.matrix.rows(); ++i) {
    for (Index j = 0; j < aff.matrix.cols(); ++j) out[t++] = aff.matrix(i, j);
  }
  for (Index i = 0; i < aff.translation.size(); ++i) out[t++] = aff.translation[i];
  return out;
}

inline MatcherParams unflatten(const MatcherParams& shape_like, const Vec& flat) {
  if (flat.size() != parameter_count(shape_like)) {
    throw DimensionError("unflatten: flat vector size mismatch");
  }
  if (const auto* fp = std::get_if<FreePointsParams>(&shape_like)) {
    FreePointsParams out{Mat(fp->offsets.rows(), fp->offsets.cols())};
    Index t = 0;
    for (Index i = 0; i < out.offsets.rows(); ++i) {
      for (Index j = 0; j < out.offsets.cols(); ++j) out.offsets(i, j) = flat[t++];
    }
    return out;
  }
  const auto& aff = std::get<AffineParams>(shape_like);
  AffineParams out{Mat(aff.matrix.rows(), aff.matrix.cols()), Vec(aff.translation.size())};
  Index t = 0;
  for (Index i = 0; i < out.matrix.rows(); ++i) {
    for (Index j = 0; j < out.matrix.cols(); ++j) out.matrix(i, j) = flat[t++];
  }
  for (Index i = 0; i < out.translation.size(); ++i) out.translation[i] = flat[t++];
  return out;
}

inline bool params_finite(const MatcherParams& params) {
  if (const auto* fp = std::get_if<FreePointsParams>(&params)) {
    return fp->offsets.allFinite();
  }
  const auto& aff = std::get<AffineParams>(params);
  return aff.matrix.allFinite() && aff.translation.allFinite();
}

inline void write_matcher_csv(const std::string& path, const MatcherParams& params) {
  const Vec flat = flatten(params);
  std::vector<std::string> header;
  const char* kind = std::holds_alternative<FreePointsParams>(params) ? "offset" : "p";
  for (Index i = 0; i < flat.size(); ++i) header.push_back(kind + std::to_string(i));
  CsvWriter w(path, header);
  std::vector<double> row(flat.data(), flat.data() + flat.size());
  w.write_row(row);
}

}  // namespace dualalign
