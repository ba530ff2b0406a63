#pragma once

// Reference PCA: full covariance eigen-decomposition with Eigen.

#include <Eigen/Dense>
#include <cmath>

#include "annimpute/core/grid.hpp"

namespace oracle {

struct PcaReference {
  Eigen::MatrixXd coordinates;  // N x 2
  Eigen::Vector2d variances;
};

inline PcaReference pca(const annimpute::RealGrid& data) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto m = static_cast<Eigen::Index>(data.cols());
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      x(i, j) = data(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  PcaReference out;
  out.coordinates.resize(n, 2);
  for (int k = 0; k < 2; ++k) {
    // Eigen sorts ascending.
    Eigen::VectorXd v = solver.eigenvectors().col(m - 1 - k);
    double largest = v.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::abs(v(j)) >= largest - 1e-9) {
        if (v(j) < 0) v = -v;
        break;
      }
    }
    out.coordinates.col(k) = centered * v;
    out.variances(k) = solver.eigenvalues()(m - 1 - k);
  }
  return out;
}

}  // namespace oracle
