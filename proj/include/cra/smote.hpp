#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cra/matrix.hpp"

namespace cra::learn {

struct SmoteResult {
  /// Input rows first, unchanged, then the synthetic rows.
  Matrix x;
  Labels y;
  /// For each synthetic row: the input rows (base, neighbour) it was drawn between.
  std::vector<std::pair<std::size_t, std::size_t>> sources;
  std::size_t original_rows = 0;
};

/// Oversamples the minority class to parity. Each synthetic row is
/// base + u * (neighbour - base), u ~ U[0,1), with the neighbour among the base
/// row's k nearest minority rows (Euclidean). k is clamped to minority - 1.
/// Throws SingleClassTraining when a class is absent and SingleMinoritySample
/// when the minority has one row.
SmoteResult smote(const Matrix& x, std::span<const int> y, std::size_t k, std::uint64_t seed);

}  // namespace cra::learn
