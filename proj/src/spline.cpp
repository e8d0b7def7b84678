#include "accessflow/spline.hpp"

#include <cmath>
#include <stdexcept>

namespace accessflow {

Eigen::VectorXd quantile_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  if (k < 4) throw std::invalid_argument("cubic splines need k >= 4");
  Eigen::VectorXd knots(k + 4);
  knots.head(4).setZero();
  knots.tail(4).setOnes();
  const int interior = k - 4;
  if (interior == 0) return knots;

  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  bool ok = !sorted.empty();
  double prev = 0.0;
  for (int j = 1; j <= interior && ok; ++j) {
    const double p = static_cast<double>(j) / (k - 3);
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double q = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    if (!(q > prev && q < 1.0)) ok = false;
    knots(3 + j) = q;
    prev = q;
  }
  if (!ok) {
    for (int j = 1; j <= interior; ++j) knots(3 + j) = static_cast<double>(j) / (k - 3);
  }
  return knots;
}

TensorBasis build_basis(const Eigen::Ref<const Eigen::MatrixX2d>& coords, int k) {
  if (k < 4) throw std::invalid_argument("cubic splines need k >= 4");
  TensorBasis b;
  b.k = k;
  b.knots_x = quantile_knots(coords.col(0), k);
  b.knots_y = quantile_knots(coords.col(1), k);
  b.penalty = tensor_penalty<double>(k);

  const auto n = static_cast<std::size_t>(coords.rows());
  b.index.resize(n);
  b.value.resize(n);
  std::array<double, 4> vx{}, vy{};
  for (std::size_t i = 0; i < n; ++i) {
    const int ax = cubic_bspline<double>(b.knots_x, coords(i, 0), vx);
    const int ay = cubic_bspline<double>(b.knots_y, coords(i, 1), vy);
    int m = 0;
    for (int u = 0; u < 4; ++u) {
      for (int v = 0; v < 4; ++v, ++m) {
        b.index[i][m] = (ax + u) * k + (ay + v);
        b.value[i][m] = vx[u] * vy[v];
      }
    }
  }
  return b;
}

Eigen::SparseMatrix<double> TensorBasis::matrix() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(rows() * kRowNonzeros);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (int m = 0; m < kRowNonzeros; ++m) {
      t.emplace_back(static_cast<int>(i), index[i][m], value[i][m]);
    }
  }
  Eigen::SparseMatrix<double> z(static_cast<Eigen::Index>(rows()), cols());
  z.setFromTriplets(t.begin(), t.end());
  return z;
}

Eigen::MatrixXd TensorBasis::dense() const { return Eigen::MatrixXd(matrix()); }

Eigen::VectorXd TensorBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows()));
  for (std::size_t i = 0; i < rows(); ++i) {
    double s = 0.0;
    for (int m = 0; m < kRowNonzeros; ++m) s += value[i][m] * theta(index[i][m]);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

}  // namespace accessflow
