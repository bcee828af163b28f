#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace detlat {

struct SummaryStats {
  double mu = 0;
  double sigma = 0;   // sample std, n-1 denominator; 0 when n = 1
  double median = 0;
  double cv = 0;      // sigma/mu, left 0 when mu = 0
  double p5 = 0;
  double p95 = 0;
  int n = 0;
};

struct BoxplotStats {
  double median = 0;
  double mean = 0;
  double whisker_lo = 0;  // p5
  double whisker_hi = 0;  // p95
};

struct DensityCurve1D {
  std::vector<double> grid;     // strictly increasing
  std::vector<double> density;  // max-normalized to exactly 1
  double bandwidth = 0;
};

struct DensityGrid2D {
  std::vector<double> x_grid;
  std::vector<double> y_grid;
  std::vector<double> density;  // row-major, density[j*nx + i] at (x_i, y_j)
  double bandwidth_x = 0;
  double bandwidth_y = 0;
};

namespace stats_detail {

inline double sorted_percentile(const std::vector<double>& s, double p) {
  const double r = p / 100.0 * double(s.size() - 1);
  const std::size_t lo = std::size_t(r);
  if (lo + 1 >= s.size()) return s.back();
  const double frac = r - double(lo);
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

inline double sample_std(const std::vector<double>& xs, double mu) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / double(xs.size() - 1));
}

// Silverman bandwidth; `exponent` is 1/5 for 1D and 1/6 for per-axis 2D.
inline double silverman(const std::vector<double>& xs, double exponent) {
  double mu = 0.0;
  for (double x : xs) mu += x;
  mu /= double(xs.size());
  const double sd = sample_std(xs, mu);
  if (sd == 0.0) return std::max(std::abs(xs[0]), 1.0) / 100.0;
  std::vector<double> s = xs;
  std::sort(s.begin(), s.end());
  const double iqr = sorted_percentile(s, 75.0) - sorted_percentile(s, 25.0);
  const double scale = std::pow(double(xs.size()), -exponent);
  if (iqr == 0.0) return 1.06 * sd * scale;
  return 0.9 * std::min(sd, iqr / 1.34) * scale;
}

inline void normalize_to_max(std::vector<double>& d) {
  const double mx = *std::max_element(d.begin(), d.end());
  for (double& v : d) v /= mx;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
  return g;
}

}  // namespace stats_detail

inline double percentile(const std::vector<double>& xs, double p) {
  if (xs.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p >= 0.0) || !(p <= 100.0))
    throw std::invalid_argument("percentile: p must lie in [0, 100]");
  std::vector<double> s = xs;
  std::sort(s.begin(), s.end());
  return stats_detail::sorted_percentile(s, p);
}

inline SummaryStats summary(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summary: empty input");
  SummaryStats out;
  out.n = int(xs.size());
  for (double x : xs) out.mu += x;
  out.mu /= double(xs.size());
  out.sigma = stats_detail::sample_std(xs, out.mu);
  std::vector<double> s = xs;
  std::sort(s.begin(), s.end());
  out.median = stats_detail::sorted_percentile(s, 50.0);
  out.p5 = stats_detail::sorted_percentile(s, 5.0);
  out.p95 = stats_detail::sorted_percentile(s, 95.0);
  if (out.mu != 0.0) out.cv = out.sigma / out.mu;
  return out;
}

inline BoxplotStats boxplot_stats(const std::vector<double>& xs) {
  const SummaryStats s = summary(xs);
  return {s.median, s.mu, s.p5, s.p95};
}

inline DensityCurve1D kde_1d(const std::vector<double>& xs, int grid_size = 256,
                             std::optional<double> bandwidth = std::nullopt) {
  if (xs.empty()) throw std::invalid_argument("kde_1d: empty input");
  if (grid_size < 2) throw std::invalid_argument("kde_1d: grid_size must be >= 2");
  if (bandwidth && !(*bandwidth > 0.0))
    throw std::invalid_argument("kde_1d: bandwidth must be > 0");

  DensityCurve1D out;
  out.bandwidth = bandwidth ? *bandwidth : stats_detail::silverman(xs, 1.0 / 5.0);
  const double h = out.bandwidth;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  out.grid = stats_detail::linspace(*mn - 3 * h, *mx + 3 * h, grid_size);

  const double norm = 1.0 / (double(xs.size()) * h * std::sqrt(2.0 * std::acos(-1.0)));
  out.density.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    double acc = 0.0;
    for (double x : xs) {
      const double t = (out.grid[g] - x) / h;
      acc += std::exp(-0.5 * t * t);
    }
    out.density[g] = norm * acc;
  }
  stats_detail::normalize_to_max(out.density);
  return out;
}

inline DensityGrid2D kde_2d(const std::vector<double>& xs, const std::vector<double>& ys,
                            int grid_size = 128,
                            std::optional<std::pair<double, double>> bandwidths = std::nullopt,
                            bool log_x = false) {
  if (xs.empty()) throw std::invalid_argument("kde_2d: empty input");
  if (xs.size() != ys.size()) throw std::invalid_argument("kde_2d: sample lengths differ");
  if (grid_size < 2) throw std::invalid_argument("kde_2d: grid_size must be >= 2");
  if (bandwidths && (!(bandwidths->first > 0.0) || !(bandwidths->second > 0.0)))
    throw std::invalid_argument("kde_2d: bandwidths must be > 0");

  std::vector<double> x = xs;
  if (log_x) {
    for (double& v : x) {
      if (!(v > 0.0)) throw std::invalid_argument("kde_2d: log_x requires positive x samples");
      v = std::log(v);
    }
  }

  DensityGrid2D out;
  out.bandwidth_x = bandwidths ? bandwidths->first : stats_detail::silverman(x, 1.0 / 6.0);
  out.bandwidth_y = bandwidths ? bandwidths->second : stats_detail::silverman(ys, 1.0 / 6.0);
  const double hx = out.bandwidth_x, hy = out.bandwidth_y;
  const auto [xmn, xmx] = std::minmax_element(x.begin(), x.end());
  const auto [ymn, ymx] = std::minmax_element(ys.begin(), ys.end());
  out.x_grid = stats_detail::linspace(*xmn - 3 * hx, *xmx + 3 * hx, grid_size);
  out.y_grid = stats_detail::linspace(*ymn - 3 * hy, *ymx + 3 * hy, grid_size);

  const double norm =
      1.0 / (double(x.size()) * hx * hy * 2.0 * std::acos(-1.0));
  out.density.resize(out.x_grid.size() * out.y_grid.size());
  for (std::size_t j = 0; j < out.y_grid.size(); ++j)
    for (std::size_t i = 0; i < out.x_grid.size(); ++i) {
      double acc = 0.0;
      for (std::size_t s = 0; s < x.size(); ++s) {
        const double tx = (out.x_grid[i] - x[s]) / hx;
        const double ty = (out.y_grid[j] - ys[s]) / hy;
        acc += std::exp(-0.5 * (tx * tx + ty * ty));
      }
      out.density[j * out.x_grid.size() + i] = norm * acc;
    }
  stats_detail::normalize_to_max(out.density);
  return out;
}

}  // namespace detlat
