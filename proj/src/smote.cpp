#include "cra/smote.hpp"

#include <algorithm>
#include <numeric>

#include "cra/error.hpp"
#include "cra/rng.hpp"

namespace cra::learn {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

SmoteResult smote(const Matrix& x, std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "smote: rows and labels differ in length");
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? positives : negatives).push_back(i);
  if (positives.empty() || negatives.empty()) {
    throw Error(ErrorCode::SingleClassTraining, "smote needs both classes present");
  }

  SmoteResult out{x, Labels(y.begin(), y.end()), {}, x.rows()};
  if (positives.size() == negatives.size()) return out;

  const bool positive_minority = positives.size() < negatives.size();
  const auto& minority = positive_minority ? positives : negatives;
  const int minority_label = positive_minority ? 1 : 0;
  if (minority.size() < 2) {
    throw Error(ErrorCode::SingleMinoritySample, "smote cannot interpolate from a single minority row");
  }
  const std::size_t neighbours = std::min(k, minority.size() - 1);
  const std::size_t needed = (positive_minority ? negatives.size() : positives.size()) - minority.size();

  // k nearest minority neighbours of each minority row; ties by index.
  std::vector<std::vector<std::size_t>> knn(minority.size());
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t a = 0; a < minority.size(); ++a) {
    dist.clear();
    for (std::size_t b = 0; b < minority.size(); ++b) {
      if (a != b) dist.emplace_back(squared_distance(x.row(minority[a]), x.row(minority[b])), b);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours), dist.end());
    for (std::size_t j = 0; j < neighbours; ++j) knn[a].push_back(dist[j].second);
  }

  Rng rng(seed);
  std::vector<double> row(x.cols());
  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t a = uniform_index(rng, minority.size());
    const std::size_t b = knn[a][uniform_index(rng, neighbours)];
    const double u = uniform01(rng);
    const auto base = x.row(minority[a]);
    const auto other = x.row(minority[b]);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = base[j] + u * (other[j] - base[j]);
    out.x.append_row(row);
    out.y.push_back(minority_label);
    out.sources.emplace_back(minority[a], minority[b]);
  }
  return out;
}

}  // namespace cra::learn
