#include "cra/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cra::learn {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

double DecisionTree::predict_proba(std::span<const double> row) const {
  if (nodes_.empty()) return 0.0;
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].positive_fraction;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  // Children are always stored after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

BinnedMatrix::BinnedMatrix(const Matrix& x) : rows_(x.rows()), codes_(x.rows() * x.cols()), thresholds_(x.cols()) {
  std::vector<double> sorted(rows_);
  std::vector<double> upper;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t r = 0; r < rows_; ++r) sorted[r] = x(r, c);
    std::sort(sorted.begin(), sorted.end());
    // Bin upper values: every distinct value when few, else quantile cuts.
    upper.clear();
    std::vector<double> next_lower;
    std::size_t r = 0;
    std::size_t unique_count = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == 0 || sorted[i] != sorted[i - 1]) ++unique_count;
    }
    const bool exact = unique_count <= kMaxBins;
    while (r < rows_) {
      std::size_t end = r + 1;
      while (end < rows_ && sorted[end] == sorted[r]) ++end;
      if (exact) {
        upper.push_back(sorted[r]);
        if (end < rows_) next_lower.push_back(sorted[end]);
      } else {
        // Close the current bin once it holds its share of the rows.
        const std::size_t bin = upper.size();
        const double target = static_cast<double>(rows_) * static_cast<double>(bin + 1) / kMaxBins;
        if (static_cast<double>(end) >= target || end == rows_) {
          upper.push_back(sorted[r]);
          if (end < rows_) next_lower.push_back(sorted[end]);
        }
      }
      r = end;
    }
    auto& th = thresholds_[c];
    th.resize(upper.empty() ? 0 : upper.size() - 1);
    for (std::size_t b = 0; b + 1 < upper.size(); ++b) {
      th[b] = upper[b] + (next_lower[b] - upper[b]) / 2.0;
      if (th[b] >= next_lower[b]) th[b] = upper[b];  // adjacent doubles
    }
    std::uint8_t* out = codes_.data() + c * rows_;
    for (std::size_t row = 0; row < rows_; ++row) {
      const double v = x(row, c);
      out[row] = static_cast<std::uint8_t>(std::lower_bound(upper.begin(), upper.end(), v) - upper.begin());
    }
  }
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const BinnedMatrix& x, std::span<const int> y, const TreeParams& params, Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng), importance_(x.cols(), 0.0), features_(x.cols()) {
    mtry_ = params.max_features == 0 ? x.cols() : std::min(params.max_features, x.cols());
  }

  GrownTree run(std::vector<std::uint32_t> sample) {
    sample_ = std::move(sample);
    if (!sample_.empty()) build(0, sample_.size(), 0);
    const double total = std::accumulate(importance_.begin(), importance_.end(), 0.0);
    if (total > 0.0) {
      for (double& v : importance_) v /= total;
    }
    return {DecisionTree(std::move(nodes_)), std::move(importance_)};
  }

 private:
  struct Split {
    int feature = -1;
    std::size_t bin = 0;
    double proxy = -1.0;
    double left_n = 0, left_pos = 0;
  };

  static double gini_mass(double n, double pos) {
    // n * gini = n - (pos^2 + neg^2) / n
    if (n <= 0.0) return 0.0;
    const double neg = n - pos;
    return n - (pos * pos + neg * neg) / n;
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    const double n = static_cast<double>(end - begin);
    double pos = 0.0;
    for (std::size_t i = begin; i < end; ++i) pos += y_[sample_[i]];

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({-1, 0.0, -1, -1, pos / n});

    if (depth >= params_.max_depth || n < params_.min_samples_split || pos == 0.0 || pos == n) return id;

    const Split best = find_split(begin, end, n, pos);
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const std::uint8_t* codes = x_.column_codes(f);
    const auto mid_it = std::partition(sample_.begin() + static_cast<std::ptrdiff_t>(begin),
                                       sample_.begin() + static_cast<std::ptrdiff_t>(end),
                                       [&](std::uint32_t r) { return codes[r] <= best.bin; });
    const auto mid = static_cast<std::size_t>(mid_it - sample_.begin());

    importance_[f] += gini_mass(n, pos) - gini_mass(best.left_n, best.left_pos) -
                      gini_mass(n - best.left_n, pos - best.left_pos);

    nodes_[id].feature = best.feature;
    nodes_[id].threshold = x_.threshold(f, best.bin);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, double n, double pos) {
    Split best;
    const std::size_t p = x_.cols();
    const bool sampled = mtry_ < p;
    if (sampled) std::iota(features_.begin(), features_.end(), 0);

    std::size_t visited = 0;
    for (std::size_t k = 0; k < p && visited < mtry_; ++k) {
      std::size_t f = k;
      if (sampled) {
        const std::size_t j = k + uniform_index(rng_, p - k);
        std::swap(features_[k], features_[j]);
        f = features_[k];
      }
      const std::size_t nb = x_.bins(f);
      if (nb < 2) continue;
      count_.assign(nb, 0.0);
      positive_.assign(nb, 0.0);
      const std::uint8_t* codes = x_.column_codes(f);
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = sample_[i];
        count_[codes[r]] += 1.0;
        positive_[codes[r]] += y_[r];
      }
      std::size_t occupied = 0;
      for (double c : count_) occupied += c > 0.0;
      if (occupied < 2) continue;  // constant within this node
      ++visited;

      double ln = 0.0, lp = 0.0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        ln += count_[b];
        lp += positive_[b];
        if (count_[b] == 0.0 && b > 0) continue;  // same partition as previous bin
        if (ln == 0.0 || ln == n) continue;
        const double rn = n - ln, rp = pos - lp;
        const double proxy = (lp * lp + (ln - lp) * (ln - lp)) / ln + (rp * rp + (rn - rp) * (rn - rp)) / rn;
        if (proxy > best.proxy) best = {static_cast<int>(f), b, proxy, ln, lp};
      }
    }
    return best;
  }

  const BinnedMatrix& x_;
  std::span<const int> y_;
  const TreeParams& params_;
  Rng& rng_;
  std::size_t mtry_;
  std::vector<double> importance_;
  std::vector<std::size_t> features_;
  std::vector<std::uint32_t> sample_;
  std::vector<TreeNode> nodes_;
  std::vector<double> count_;
  std::vector<double> positive_;
};

}  // namespace

GrownTree grow_tree(const BinnedMatrix& x, std::span<const int> y, std::vector<std::uint32_t> sample,
                    const TreeParams& params, Rng& rng) {
  return TreeGrower(x, y, params, rng).run(std::move(sample));
}

RandomForest::RandomForest(std::vector<DecisionTree> trees, std::vector<double> importance)
    : trees_(std::move(trees)), importance_(std::move(importance)) {}

double RandomForest::predict_proba(std::span<const double> row) const {
  if (trees_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict_proba(row);
  return sum / static_cast<double>(trees_.size());
}

RandomForest train_forest(const Matrix& x, std::span<const int> y, const ForestParams& params, std::uint64_t seed) {
  const BinnedMatrix binned(x);
  TreeParams tree_params = params.tree;
  if (tree_params.max_features == 0) {
    tree_params.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
  }
  const std::size_t n = x.rows();
  std::vector<DecisionTree> trees;
  trees.reserve(params.n_trees);
  std::vector<double> importance(x.cols(), 0.0);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::uint32_t> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::uint32_t>(uniform_index(rng, n));
    } else {
      std::iota(sample.begin(), sample.end(), 0u);
    }
    GrownTree grown = grow_tree(binned, y, std::move(sample), tree_params, rng);
    for (std::size_t f = 0; f < importance.size(); ++f) importance[f] += grown.importance[f];
    trees.push_back(std::move(grown.tree));
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return RandomForest(std::move(trees), std::move(importance));
}

GrownTree train_tree(const Matrix& x, std::span<const int> y, const TreeParams& params, std::uint64_t seed) {
  const BinnedMatrix binned(x);
  Rng rng(derive_seed(seed, 0));
  std::vector<std::uint32_t> sample(x.rows());
  std::iota(sample.begin(), sample.end(), 0u);
  return grow_tree(binned, y, std::move(sample), params, rng);
}

}  // namespace cra::learn
