#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace flexcon::numeric {

// Worker count: FLEXCON_THREADS when set (1..1024), else hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to `workers` threads (0 means worker_count()).
// Callers write results into per-index slots, so output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

// Pairwise summation in index order.
double pairwise_sum(std::span<const double> values);

// Streaming mean/variance accumulator with an order-fixed merge.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  static RunningStats merge(const RunningStats& a, const RunningStats& b);
  double variance() const;   // sample variance
  double std_error() const;  // sqrt(variance / count)
};

// Merges block statistics as a balanced tree over the block index.
RunningStats merge_pairwise(std::span<const RunningStats> blocks);

struct MinimizeResult {
  double x;
  double fx;
};

// Global-ish 1-D minimizer: coarse scan, then Brent refinement around the best cell.
MinimizeResult minimize_scan(const std::function<double(double)>& f, double lo, double hi,
                             int scan_points = 64, double x_tol = 1e-8);

// Root of f on [lo, hi] with a sign change, by bisection to x_tol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double x_tol = 1e-10);

// Adaptive Simpson on [a, b]; throws NumericalFailure when max_depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int min_depth = 4, int max_depth = 48);

// Adaptive Gauss-Kronrod (boost) on [a, b].
double gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12);

// Sorted, de-duplicated copy of the points lying in [lo, hi], with lo and hi included.
std::vector<double> breakpoints_in(std::vector<double> points, double lo, double hi,
                                   double merge_tol = 1e-14);

}  // namespace flexcon::numeric
