#ifndef ACCESSFLOW_SPLINE_HPP
#define ACCESSFLOW_SPLINE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace accessflow {

/// Clamped cubic knot vector for k basis functions on [0, 1]: four-fold end
/// knots and k - 4 interior knots at the empirical quantiles j / (k - 3) of x.
/// Falls back to uniform interior knots if the quantiles are not strictly
/// increasing inside (0, 1).
Eigen::VectorXd quantile_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int k);

/// Index of the first nonzero cubic B-spline at x and the four nonzero values.
template <class Scalar>
int cubic_bspline(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& knots,
                  Scalar x, std::array<Scalar, 4>& values) {
  const int k = static_cast<int>(knots.size()) - 4;
  x = std::clamp(x, knots(0), knots(knots.size() - 1));
  const auto* begin = knots.data();
  int span = static_cast<int>(std::upper_bound(begin, begin + knots.size(), x) - begin) - 1;
  span = std::clamp(span, 3, k - 1);

  std::array<Scalar, 4> left{}, right{};
  values[0] = Scalar(1);
  for (int j = 1; j <= 3; ++j) {
    left[j] = x - knots(span + 1 - j);
    right[j] = knots(span + j) - x;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      const Scalar denom = right[r + 1] + left[j - r];
      const Scalar temp = denom != Scalar(0) ? values[r] / denom : Scalar(0);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return span - 3;
}

/// S = D2' D2 for the (k-2) x k second-difference operator D2.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> second_difference_penalty(int k) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(std::max(k - 2, 0), k);
  for (int i = 0; i + 2 < k; ++i) {
    d(i, i) = Scalar(1);
    d(i, i + 1) = Scalar(-2);
    d(i, i + 2) = Scalar(1);
  }
  return d.transpose() * d;
}

/// Kronecker sum S (x) I + I (x) S, coefficient index a * k + b with a on the
/// first axis.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor_penalty(int k) {
  const auto s = second_difference_penalty<Scalar>(k);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> p =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k * k, k * k);
  for (int a = 0; a < k; ++a) {
    for (int c = 0; c < k; ++c) {
      for (int b = 0; b < k; ++b) {
        p(a * k + b, c * k + b) += s(a, c);
        p(b * k + a, b * k + c) += s(a, c);
      }
    }
  }
  return p;
}

/// Tensor-product cubic B-spline basis evaluated at a fixed set of points.
/// Each row has 16 nonzeros, stored compactly.
struct TensorBasis {
  static constexpr int kRowNonzeros = 16;

  int k = 0;
  Eigen::VectorXd knots_x;
  Eigen::VectorXd knots_y;
  std::vector<std::array<int, kRowNonzeros>> index;
  std::vector<std::array<double, kRowNonzeros>> value;
  Eigen::MatrixXd penalty;  // k^2 x k^2

  std::size_t rows() const { return index.size(); }
  int cols() const { return k * k; }

  Eigen::SparseMatrix<double> matrix() const;
  Eigen::MatrixXd dense() const;
  /// Z * theta at the stored points.
  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
};

/// Basis at `coords` (n x 2, each column in [0, 1]) with knots at the
/// coordinate quantiles, plus the tensor second-difference penalty.
TensorBasis build_basis(const Eigen::Ref<const Eigen::MatrixX2d>& coords, int k);

}  // namespace accessflow

#endif  // ACCESSFLOW_SPLINE_HPP
