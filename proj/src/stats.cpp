#include "cra/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "cra/error.hpp"

namespace cra::learn {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double qnorm(double p) { return boost::math::quantile(kStdNormal, p); }
double upper_tail(double z) { return boost::math::cdf(boost::math::complement(kStdNormal, z)); }

// c[0] + c[1] x + c[2] x^2 + ...
double poly(std::span<const double> c, double x) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

}  // namespace

ShapiroResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw Error(ErrorCode::InvalidArgument, "Shapiro-Wilk needs 3 to 5000 values");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() < 1e-19 * std::max(1.0, std::abs(x.front()))) return {};

  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = qnorm((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first_scaled;
    double fac;
    if (n > 5) {
      first_scaled = 2;
      const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      first_scaled = 1;
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  }

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / an;
  double ssq = 0.0;
  for (double v : x) ssq += (v - mean) * (v - mean);
  double num = 0.0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  const double w = std::min(1.0, num * num / ssq);

  ShapiroResult out;
  out.w = w;
  if (n == 3) {
    constexpr double six_over_pi = 1.90985931710274;
    constexpr double asin_sqrt_three_quarters = 1.04719755119660;
    out.p_value = std::max(0.0, six_over_pi * (std::asin(std::sqrt(w)) - asin_sqrt_three_quarters));
    return out;
  }
  double w1 = std::log(1.0 - w);
  double mu, sigma;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (w1 >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    w1 = -std::log(gamma - w1);
    mu = poly(c3, an);
    sigma = std::exp(poly(c4, an));
  } else {
    const double xx = std::log(an);
    mu = poly(c5, xx);
    sigma = std::exp(poly(c6, xx));
  }
  out.p_value = std::clamp(upper_tail((w1 - mu) / sigma), 0.0, 1.0);
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  WilcoxonResult out;
  out.n = static_cast<int>(d.size());
  if (d.empty()) return out;

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });

  std::vector<double> rank(d.size());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
    const double t = static_cast<double>(j - i);
    if (j - i > 1) ties = true;
    tie_term += t * t * t - t;
    i = j;
  }
  for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? out.w_plus : out.w_minus) += rank[i];

  const double n = static_cast<double>(d.size());
  const double t = std::min(out.w_plus, out.w_minus);
  if (d.size() <= 25 && !ties) {
    // Count subsets of {1..n} by rank sum.
    const int max_sum = static_cast<int>(n * (n + 1) / 2);
    std::vector<double> ways(static_cast<std::size_t>(max_sum) + 1, 0.0);
    ways[0] = 1.0;
    for (int k = 1; k <= static_cast<int>(n); ++k) {
      for (int s = max_sum; s >= k; --s) ways[s] += ways[s - k];
    }
    double at_most = 0.0;
    for (int s = 0; s <= static_cast<int>(t); ++s) at_most += ways[s];
    out.p_value = std::min(1.0, 2.0 * at_most / std::pow(2.0, n));
    out.exact = true;
    return out;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return out;
  const double z = std::max(0.0, std::abs(out.w_plus - mean) - 0.5) / std::sqrt(var);
  out.p_value = std::min(1.0, 2.0 * upper_tail(z));
  return out;
}

StatTestResult compare(std::span<const double> scores_a, std::span<const double> scores_b) {
  if (scores_a.size() != scores_b.size()) throw Error(ErrorCode::LengthMismatch, "score vectors differ in length");
  StatTestResult out;
  if (scores_a.size() >= 3) {
    out.shapiro_p_a = shapiro_wilk(scores_a).p_value;
    out.shapiro_p_b = shapiro_wilk(scores_b).p_value;
  }
  out.wilcoxon = wilcoxon_signed_rank(scores_a, scores_b);
  out.p_value = out.wilcoxon.p_value;
  if (!scores_a.empty()) {
    const double n = static_cast<double>(scores_a.size());
    out.mean_delta = std::accumulate(scores_a.begin(), scores_a.end(), 0.0) / n -
                     std::accumulate(scores_b.begin(), scores_b.end(), 0.0) / n;
  }
  return out;
}

}  // namespace cra::learn
