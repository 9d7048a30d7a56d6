#pragma once

#include "riemann_kit/types.hpp"

#include <Eigen/SVD>

namespace riemann_kit {

inline constexpr double kRankCutoff = 1e-10;  // singular values below 1e-10*max count as zero

/// Orthonormal basis of the null space of A (columns). Empty matrix when A has
/// full column rank.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> nullspace(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankCutoff * smax) ++rank;
  const int n = static_cast<int>(A.cols());
  return svd.matrixV().rightCols(n - rank);
}

template <typename Scalar>
int numerical_rank(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd(A);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankCutoff * smax) ++rank;
  return rank;
}

/// Orthonormal basis xi_a of the orthogonal complement of the rows of W
/// (i.e. W xi = 0). Rows of W are wave vectors.
inline Mat orthogonal_complement(const Mat& W) { return nullspace<double>(W); }

/// Distance of v from the column span of B, relative to |v|.
template <typename Scalar>
double span_distance(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  double vn = v.norm();
  if (vn == 0.0) return 0.0;
  Eigen::JacobiSVD<M> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  V c = svd.solve(v);
  return (B * c - v).norm() / vn;
}

}  // namespace riemann_kit
