#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diarkit {

inline constexpr int kUnassigned = -1;

// Dense rows x cols weight matrix, row-major.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Value of a maximum-weight one-to-one assignment (rows may stay unmatched).
// Exact Hungarian algorithm with potentials, O(n^3) for n = max(rows, cols).
double max_weight_assignment_value(const WeightMatrix& weights);

// Maximum-weight assignment. Among optimal assignments the one whose
// (row, col) pair sequence, ordered by row, is lexicographically smallest is
// returned; pairs of weight zero are never reported. Entry r of the result is
// the column matched to row r, or kUnassigned.
std::vector<int> max_weight_assignment(const WeightMatrix& weights);

}  // namespace diarkit
