#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "annimpute/core/matrix.hpp"
#include "annimpute/core/schema.hpp"
#include "annimpute/util/random.hpp"

namespace testutil {

inline annimpute::LabelSchema schema(int lo, int hi) { return annimpute::LabelSchema{lo, hi, {}, 1}; }

// Random sparse matrix in which every row and column has at least one cell.
inline annimpute::AnnotationMatrix random_matrix(annimpute::Rng& rng, std::size_t n,
                                                 std::size_t m, const annimpute::LabelSchema& s,
                                                 double density) {
  std::vector<std::vector<bool>> on(n, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) on[i][j] = rng.uniform() < density;
  for (std::size_t i = 0; i < n; ++i) on[i][rng.below(m)] = true;
  for (std::size_t j = 0; j < m; ++j) on[rng.below(n)][j] = true;
  std::vector<annimpute::Cell> cells;
  const auto k = static_cast<std::size_t>(s.num_labels());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (on[i][j]) cells.push_back({i, j, s.label_at(rng.below(k))});
  return annimpute::AnnotationMatrix(n, m, s, std::move(cells));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("annimpute_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
