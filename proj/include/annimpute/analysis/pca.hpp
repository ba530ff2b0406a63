#pragma once

#include <array>
#include <vector>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"

namespace annimpute::analysis {

struct PCAProjection {
  RealGrid coordinates;  // N x 2
  RealGrid components;   // 2 x M, orthonormal rows
  std::array<double, 2> explained_variance{0.0, 0.0};
  double sentinel = 10.0;
  bool degenerate = false;  // all columns constant: coordinates are zero
};

// Missing cells are filled with `sentinel` before fitting. Each component's
// largest-magnitude entry is made positive (first such entry on ties).
// Throws DataError for fewer than 2 rows or 2 columns.
PCAProjection pca_project(const AnnotationMatrix& matrix, double sentinel = 10.0);
PCAProjection pca_project(const LabelGrid& complete);
PCAProjection pca_project(const RealGrid& data, double sentinel = 10.0);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues descending; column k of `vectors` pairs with values[k].
struct SymmetricEigen {
  std::vector<double> values;
  RealGrid vectors;
};
SymmetricEigen jacobi_eigen(const RealGrid& symmetric);

// Leading `count` eigenpairs by orthogonal iteration with Rayleigh-Ritz,
// converged when the leading Ritz vectors move by less than `tolerance`.
SymmetricEigen leading_eigen(const RealGrid& symmetric, std::size_t count,
                             double tolerance = 1e-10);

}  // namespace annimpute::analysis
