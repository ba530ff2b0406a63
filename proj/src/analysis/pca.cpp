#include "annimpute/analysis/pca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "annimpute/core/stats.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/kernels.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute::analysis {

namespace {

// Above this many columns the covariance is never formed.
constexpr std::size_t kDenseLimit = 256;

using ApplyFn = std::function<void(const RealGrid& in, RealGrid& out)>;

SymmetricEigen sorted_desc(std::vector<double> values, const RealGrid& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  SymmetricEigen out{std::vector<double>(n), RealGrid(vectors.rows(), n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    for (std::size_t r = 0; r < vectors.rows(); ++r) out.vectors(r, k) = vectors(r, order[k]);
  }
  return out;
}

// Modified Gram-Schmidt on the columns of q. A column that collapses is
// replaced by a fresh random direction.
void orthonormalize(RealGrid& q, Rng& rng) {
  const std::size_t n = q.rows();
  for (std::size_t c = 0; c < q.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        double dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += q(r, c) * q(r, prev);
        for (std::size_t r = 0; r < n; ++r) q(r, c) -= dot * q(r, prev);
      }
      double norm = 0.0;
      for (std::size_t r = 0; r < n; ++r) norm += q(r, c) * q(r, c);
      norm = std::sqrt(norm);
      if (norm > 1e-300) {
        for (std::size_t r = 0; r < n; ++r) q(r, c) /= norm;
        break;
      }
      for (std::size_t r = 0; r < n; ++r) q(r, c) = rng.normal(0.0, 1.0);
    }
  }
}

SymmetricEigen orthogonal_iteration(const ApplyFn& apply, std::size_t n, std::size_t count,
                                    double tolerance) {
  const std::size_t block = std::min(n, count + 4);
  Rng rng(0x5eed);
  RealGrid q(n, block);
  for (double& v : q.values()) v = rng.normal(0.0, 1.0);
  orthonormalize(q, rng);

  RealGrid z(n, block);
  std::vector<double> ritz_values(block, 0.0);
  for (int iter = 0; iter < 20000; ++iter) {
    apply(q, z);
    orthonormalize(z, rng);
    RealGrid sz(n, block);
    apply(z, sz);
    RealGrid h(block, block);
    for (std::size_t a = 0; a < block; ++a) {
      for (std::size_t b = 0; b < block; ++b) {
        double dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += z(r, a) * sz(r, b);
        h(a, b) = dot;
      }
    }
    for (std::size_t a = 0; a < block; ++a) {
      for (std::size_t b = a + 1; b < block; ++b) h(a, b) = h(b, a) = 0.5 * (h(a, b) + h(b, a));
    }
    const SymmetricEigen small = jacobi_eigen(h);
    RealGrid next(n, block);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < block; ++k) {
        double sum = 0.0;
        for (std::size_t a = 0; a < block; ++a) sum += z(r, a) * small.vectors(a, k);
        next(r, k) = sum;
      }
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += next(r, k) * q(r, k);
      const double sign = dot < 0 ? -1.0 : 1.0;
      double dist = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = next(r, k) - sign * q(r, k);
        dist += d * d;
      }
      moved = std::max(moved, std::sqrt(dist));
    }
    q = std::move(next);
    ritz_values = small.values;
    if (moved < tolerance) break;
  }
  SymmetricEigen out{std::vector<double>(ritz_values.begin(), ritz_values.begin() + count),
                     RealGrid(n, count)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < count; ++k) out.vectors(r, k) = q(r, k);
  }
  return out;
}

// First entry of maximal magnitude becomes positive.
void fix_sign(std::span<double> v) {
  double top = 0.0;
  for (double x : v) top = std::max(top, std::abs(x));
  for (double x : v) {
    if (std::abs(x) >= top - 1e-9) {
      if (x < 0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

SymmetricEigen jacobi_eigen(const RealGrid& symmetric) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw DataError("jacobi_eigen: matrix is not square");
  RealGrid a = symmetric;
  RealGrid v(n, n);
  for (std::size_t k = 0; k < n; ++k) v(k, k) = 1.0;

  double total = 0.0;
  for (double x : a.values()) total += x * x;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off == 0.0 || off <= 1e-32 * total) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = a(k, k);
  return sorted_desc(std::move(values), v);
}

SymmetricEigen leading_eigen(const RealGrid& symmetric, std::size_t count, double tolerance) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw DataError("leading_eigen: matrix is not square");
  if (count == 0 || count > n) throw UsageError("leading_eigen: bad eigenpair count");
  auto apply = [&](const RealGrid& in, RealGrid& out) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < in.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += symmetric(r, k) * in(k, c);
        out(r, c) = sum;
      }
    }
  };
  return orthogonal_iteration(apply, n, count, tolerance);
}

PCAProjection pca_project(const RealGrid& data, double sentinel) {
  const std::size_t n = data.rows();
  const std::size_t m = data.cols();
  if (n < 2) throw DataError("pca: need at least 2 rows");
  if (m < 2) throw DataError("pca: need at least 2 columns");

  PCAProjection out;
  out.sentinel = sentinel;
  out.coordinates = RealGrid(n, 2);
  out.components = RealGrid(2, m);

  bool constant = true;
  for (std::size_t j = 0; j < m && constant; ++j) {
    for (std::size_t i = 1; i < n; ++i) {
      if (data(i, j) != data(0, j)) {
        constant = false;
        break;
      }
    }
  }
  if (constant) {
    out.components(0, 0) = 1.0;
    out.components(1, 1) = 1.0;
    out.degenerate = true;
    return out;
  }

  const auto means = kernels::column_means(data);
  RealGrid centered(n, m);
  kernels::parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) centered(i, j) = data(i, j) - means[j];
  });

  SymmetricEigen eig;
  if (m <= kDenseLimit) {
    eig = jacobi_eigen(kernels::covariance(centered));
  } else {
    const double denom = static_cast<double>(n - 1);
    auto apply = [&](const RealGrid& in, RealGrid& result) {
      const std::size_t p = in.cols();
      RealGrid projected(n, p);
      kernels::parallel_for(n, [&](std::size_t i) {
        for (std::size_t c = 0; c < p; ++c) {
          double sum = 0.0;
          for (std::size_t j = 0; j < m; ++j) sum += centered(i, j) * in(j, c);
          projected(i, c) = sum;
        }
      });
      kernels::parallel_for(m, [&](std::size_t j) {
        for (std::size_t c = 0; c < p; ++c) {
          double sum = 0.0;
          for (std::size_t i = 0; i < n; ++i) sum += centered(i, j) * projected(i, c);
          result(j, c) = sum / denom;
        }
      });
    };
    eig = orthogonal_iteration(apply, m, 2, 1e-10);
  }

  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < m; ++j) out.components(c, j) = eig.vectors(j, c);
    fix_sign(out.components.row(c));
    out.explained_variance[c] = std::max(0.0, eig.values[c]);
  }
  kernels::parallel_for(n, [&](std::size_t i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) sum += centered(i, j) * out.components(c, j);
      out.coordinates(i, c) = sum;
    }
  });
  return out;
}

PCAProjection pca_project(const AnnotationMatrix& matrix, double sentinel) {
  return pca_project(densify(matrix, sentinel), sentinel);
}

PCAProjection pca_project(const LabelGrid& complete) {
  RealGrid data(complete.rows(), complete.cols());
  std::transform(complete.values().begin(), complete.values().end(), data.values().begin(),
                 [](int v) { return static_cast<double>(v); });
  return pca_project(data);
}

}  // namespace annimpute::analysis
