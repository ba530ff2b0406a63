#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "annimpute/kernels.hpp"
#include "annimpute/util/random.hpp"

using namespace annimpute;

namespace {

RealGrid random_grid(Rng& rng, std::size_t n, std::size_t m) {
  RealGrid g(n, m);
  for (double& v : g.values()) v = rng.normal(0.0, 3.0);
  return g;
}

}  // namespace

TEST_CASE("parallel kernels agree bitwise with their serial twins") {
  Rng rng(12);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 7}, {57, 13}, {300, 40}, {0, 3}}) {
    auto g = random_grid(rng, n, m);
    CHECK(kernels::column_means(g) == kernels::serial::column_means(g));
    CHECK(kernels::covariance(g) == kernels::serial::covariance(g));

    RealGrid a(n, m), b(n, m);
    auto fn = [&](std::size_t i, std::size_t j) { return g(i, j) * g(i, j) + static_cast<double>(j); };
    kernels::fill_cells(a, fn);
    kernels::serial::fill_cells(b, fn);
    CHECK(a == b);
  }
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> seen(1000);
  kernels::parallel_for(seen.size(), [&](std::size_t i) { ++seen[i]; });
  for (const auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(kernels::parallel_for(100,
                                        [](std::size_t i) {
                                          if (i == 37) throw std::runtime_error("x");
                                        }),
                  std::runtime_error);
  int count = 0;
  kernels::serial::parallel_for(5, [&](std::size_t) { ++count; });
  CHECK(count == 5);
}
