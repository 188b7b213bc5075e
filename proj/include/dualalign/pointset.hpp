#pragma once

#include "dualalign/common.hpp"
#include "dualalign/csv.hpp"
#include "dualalign/rng.hpp"

#include <Eigen/Cholesky>

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dualalign {

enum class DomainTag { SourceA, TargetB };

// A point cloud: one point per row, immutable after construction.
struct PointSet {
  Mat points;  // n x d
  DomainTag tag = DomainTag::SourceA;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  static PointSet make(Mat pts, DomainTag tag) {
    if (pts.rows() < 1 || pts.cols() < 1) {
      throw InvalidSpec("point set must be nonempty with dimension >= 1");
    }
    return PointSet{std::move(pts), tag};
  }
};

// Merged dataset: points from A labeled +1 followed by points from B' labeled -1.
struct LabeledUnion {
  Mat points;  // (a_count + b_count) x d
  Vec labels;  // entries in {+1, -1}
  Index a_count = 0;
  Index b_count = 0;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

inline LabeledUnion make_labeled_union(const PointSet& a, const PointSet& b_prime) {
  require_same_dim(a.dim(), b_prime.dim(), "make_labeled_union");
  LabeledUnion c;
  c.a_count = a.size();
  c.b_count = b_prime.size();
  c.points.resize(c.a_count + c.b_count, a.dim());
  c.points.topRows(c.a_count) = a.points;
  c.points.bottomRows(c.b_count) = b_prime.points;
  c.labels.resize(c.a_count + c.b_count);
  c.labels.head(c.a_count).setConstant(1.0);
  c.labels.tail(c.b_count).setConstant(-1.0);
  return c;
}

struct Moments {
  Vec mean;
  Mat cov;  // unbiased (n-1 denominator)
};

inline Moments empirical_moments(const PointSet& p) {
  const Index n = p.size();
  if (n < 2) {
    throw InsufficientData("empirical_moments needs at least 2 points");
  }
  Moments m;
  m.mean = p.points.colwise().mean();
  const Mat centered = p.points.rowwise() - m.mean.transpose();
  m.cov = (centered.adjoint() * centered) / static_cast<double>(n - 1);
  return m;
}

inline Moments empirical_moments(const Mat& pts, DomainTag tag = DomainTag::SourceA) {
  return empirical_moments(PointSet{pts, tag});
}

// --- synthetic data generators -------------------------------------------

struct GaussianBlobSpec {
  Vec mean;
  Mat cov;
};

struct RingSpec {
  Vec center;
  double radius = 1.0;
  double noise_sd = 0.0;
};

// Two Gaussian blobs carrying class labels +1 / -1; used as a labeled source
// dataset for the toy domain-adaptation experiment.
struct TwoClassSpec {
  GaussianBlobSpec positive;
  GaussianBlobSpec negative;
};

struct GeneratorSpec {
  std::variant<GaussianBlobSpec, RingSpec, TwoClassSpec> kind;
  Index count = 0;
  std::uint64_t seed = 0;
};

struct TwoClassSet {
  Mat points;
  Vec labels;  // class labels, not domain labels

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

namespace detail {

inline Mat cholesky_factor(const Mat& cov) {
  if (cov.rows() != cov.cols()) {
    throw InvalidSpec("covariance must be square");
  }
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw InvalidSpec("covariance must be symmetric");
  }
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidSpec("covariance must be positive-definite");
  }
  return llt.matrixL();
}

inline Mat sample_blob(const GaussianBlobSpec& spec, Index count, Xoshiro256pp& rng) {
  const Index d = spec.mean.size();
  if (d < 1) {
    throw InvalidSpec("blob mean must have dimension >= 1");
  }
  require_same_dim(d, spec.cov.rows(), "gaussian blob");
  const Mat chol = cholesky_factor(spec.cov);
  Mat pts(count, d);
  Vec z(d);
  for (Index i = 0; i < count; ++i) {
    for (Index k = 0; k < d; ++k) z[k] = rng.normal();
    pts.row(i) = (spec.mean + chol * z).transpose();
  }
  return pts;
}

inline Mat sample_ring(const RingSpec& spec, Index count, Xoshiro256pp& rng) {
  const Index d = spec.center.size();
  if (d < 2) {
    throw InvalidSpec("ring generator needs dimension >= 2");
  }
  if (spec.radius <= 0.0 || spec.noise_sd < 0.0) {
    throw InvalidSpec("ring radius must be > 0 and noise_sd >= 0");
  }
  Mat pts(count, d);
  for (Index i = 0; i < count; ++i) {
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * rng.uniform01();
    const double r = spec.radius + spec.noise_sd * rng.normal();
    Vec x = spec.center;
    x[0] += r * std::cos(theta);
    x[1] += r * std::sin(theta);
    pts.row(i) = x.transpose();
  }
  return pts;
}

}  // namespace detail

// Deterministic in (spec, seed): the same spec always yields the same bytes.
inline PointSet generate(const GeneratorSpec& spec, DomainTag tag = DomainTag::SourceA) {
  if (spec.count < 1) {
    throw InvalidSpec("generator count must be >= 1");
  }
  Xoshiro256pp rng(spec.seed);
  Mat pts;
  if (const auto* blob = std::get_if<GaussianBlobSpec>(&spec.kind)) {
    pts = detail::sample_blob(*blob, spec.count, rng);
  } else if (const auto* ring = std::get_if<RingSpec>(&spec.kind)) {
    pts = detail::sample_ring(*ring, spec.count, rng);
  } else {
    const auto& two = std::get<TwoClassSpec>(spec.kind);
    const Index n_pos = (spec.count + 1) / 2;
    const Index n_neg = spec.count - n_pos;
    if (n_neg < 1) {
      throw InvalidSpec("two-class generator needs count >= 2");
    }
    require_same_dim(two.positive.mean.size(), two.negative.mean.size(), "two_class");
    pts.resize(spec.count, two.positive.mean.size());
    pts.topRows(n_pos) = detail::sample_blob(two.positive, n_pos, rng);
    pts.bottomRows(n_neg) = detail::sample_blob(two.negative, n_neg, rng);
  }
  return PointSet::make(std::move(pts), tag);
}

// Same stream as generate() on a TwoClassSpec, with class labels attached.
inline TwoClassSet generate_two_class(const GeneratorSpec& spec) {
  if (!std::holds_alternative<TwoClassSpec>(spec.kind)) {
    throw InvalidSpec("generate_two_class requires a two_class generator");
  }
  const PointSet ps = generate(spec);
  TwoClassSet set;
  set.points = ps.points;
  const Index n_pos = (spec.count + 1) / 2;
  set.labels.resize(spec.count);
  set.labels.head(n_pos).setConstant(1.0);
  set.labels.tail(spec.count - n_pos).setConstant(-1.0);
  return set;
}

// --- CSV serialization -----------------------------------------------------

inline std::vector<std::string> coordinate_header(Index dim) {
  std::vector<std::string> h;
  h.reserve(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) h.push_back("x" + std::to_string(k));
  return h;
}

inline void write_points_csv(const std::string& path, const Mat& points) {
  CsvWriter w(path, coordinate_header(points.cols()));
  for (Index i = 0; i < points.rows(); ++i) {
    std::vector<double> row(points.cols());
    for (Index k = 0; k < points.cols(); ++k) row[static_cast<std::size_t>(k)] = points(i, k);
    w.write_row(row);
  }
}

inline void write_pointset_csv(const std::string& path, const PointSet& ps) {
  write_points_csv(path, ps.points);
}

inline void write_labeled_union_csv(const std::string& path, const LabeledUnion& c) {
  auto header = coordinate_header(c.dim());
  header.push_back("label");
  CsvWriter w(path, header);
  for (Index i = 0; i < c.size(); ++i) {
    std::vector<std::string> row;
    for (Index k = 0; k < c.dim(); ++k) row.push_back(format_double(c.points(i, k)));
    row.push_back(c.labels[i] > 0 ? "1" : "-1");
    w.write_row_strings(row);
  }
}

inline PointSet read_pointset_csv(const std::string& path, DomainTag tag) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.rows.empty()) {
    throw IoError("empty point CSV: " + path);
  }
  const Index d = static_cast<Index>(table.header.size());
  Mat pts(static_cast<Index>(table.rows.size()), d);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (static_cast<Index>(table.rows[i].size()) != d) {
      throw IoError("ragged row in " + path);
    }
    for (Index k = 0; k < d; ++k) {
      pts(static_cast<Index>(i), k) = parse_double(table.rows[i][static_cast<std::size_t>(k)]);
    }
  }
  return PointSet::make(std::move(pts), tag);
}

}  // namespace dualalign
