#include "annimpute/kernels.hpp"

#include <vector>

namespace annimpute::kernels {

std::vector<double> column_means(const RealGrid& data) {
  const std::size_t rows = data.rows();
  const long long cols = static_cast<long long>(data.cols());
  std::vector<double> means(data.cols(), 0.0);
#pragma omp parallel for schedule(static)
  for (long long jj = 0; jj < cols; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) sum += data(i, j);
    means[j] = rows == 0 ? 0.0 : sum / static_cast<double>(rows);
  }
  return means;
}

RealGrid covariance(const RealGrid& centered) {
  const std::size_t rows = centered.rows();
  const std::size_t cols = centered.cols();
  RealGrid cov(cols, cols, 0.0);
  const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  const long long n_cols = static_cast<long long>(cols);
  // Each (a, b >= a) entry is summed by one thread in row order, so the
  // result is bit-identical to the serial version.
#pragma omp parallel for schedule(dynamic)
  for (long long aa = 0; aa < n_cols; ++aa) {
    const auto a = static_cast<std::size_t>(aa);
    for (std::size_t b = a; b < cols; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rows; ++i) sum += centered(i, a) * centered(i, b);
      cov(a, b) = sum / denom;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

namespace serial {

std::vector<double> column_means(const RealGrid& data) {
  std::vector<double> means(data.cols(), 0.0);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) sum += data(i, j);
    means[j] = data.rows() == 0 ? 0.0 : sum / static_cast<double>(data.rows());
  }
  return means;
}

RealGrid covariance(const RealGrid& centered) {
  const std::size_t rows = centered.rows();
  const std::size_t cols = centered.cols();
  RealGrid cov(cols, cols, 0.0);
  const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  for (std::size_t a = 0; a < cols; ++a) {
    for (std::size_t b = a; b < cols; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rows; ++i) sum += centered(i, a) * centered(i, b);
      cov(a, b) = sum / denom;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

}  // namespace serial

}  // namespace annimpute::kernels
