#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"

namespace annimpute {

struct Dataset {
  std::vector<std::string> texts;
  AnnotationMatrix matrix;
};

// One text per line; a leading "id<TAB>" prefix is dropped.
std::vector<std::string> read_texts(const std::filesystem::path& path);
void write_texts(const std::filesystem::path& path, const std::vector<std::string>& texts);

// N rows x M columns, empty field = missing. Rows may have no annotations.
AnnotationMatrix read_annotations_csv(const std::filesystem::path& path, const LabelSchema& schema);
void write_annotations_csv(const std::filesystem::path& path, const AnnotationMatrix& matrix);
void write_annotations_csv(const std::filesystem::path& path, const LabelGrid& complete,
                           const LabelSchema& schema);

// A fully observed annotations file; throws DataError on any missing cell.
LabelGrid read_complete_csv(const std::filesystem::path& path, const LabelSchema& schema);

// Real-valued grid with shortest round-trip formatting.
void write_real_csv(const std::filesystem::path& path, const RealGrid& grid);
RealGrid read_real_csv(const std::filesystem::path& path);

// Loads texts + annotations, rejecting row-count mismatches and empty rows.
Dataset load_dataset(const std::filesystem::path& texts_path,
                     const std::filesystem::path& annotations_path, const LabelSchema& schema);
void save_dataset(const Dataset& dataset, const std::filesystem::path& texts_path,
                  const std::filesystem::path& annotations_path);

// Shortest decimal text that round-trips the double.
std::string format_real(double value);

}  // namespace annimpute
