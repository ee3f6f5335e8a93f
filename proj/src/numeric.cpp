#include "flexcon/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "flexcon/model.hpp"

namespace flexcon::numeric {

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FLEXCON_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) return static_cast<unsigned>(std::min<long>(cap, 1024));
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers) {
  if (n == 0) return;
  if (workers == 0) workers = worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void RunningStats::add(double x) {
  count += 1.0;
  double d = x - mean;
  mean += d / count;
  m2 += d * (x - mean);
}

RunningStats RunningStats::merge(const RunningStats& a, const RunningStats& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  RunningStats out;
  out.count = a.count + b.count;
  double d = b.mean - a.mean;
  out.mean = a.mean + d * (b.count / out.count);
  out.m2 = a.m2 + b.m2 + d * d * (a.count * b.count / out.count);
  return out;
}

double RunningStats::variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }

double RunningStats::std_error() const {
  return count > 0.0 ? std::sqrt(variance() / count) : 0.0;
}

RunningStats merge_pairwise(std::span<const RunningStats> blocks) {
  if (blocks.empty()) return {};
  if (blocks.size() == 1) return blocks.front();
  std::size_t half = blocks.size() / 2;
  return RunningStats::merge(merge_pairwise(blocks.first(half)),
                             merge_pairwise(blocks.subspan(half)));
}

MinimizeResult minimize_scan(const std::function<double(double)>& f, double lo, double hi,
                             int scan_points, double x_tol) {
  if (hi <= lo) return {lo, f(lo)};
  scan_points = std::max(scan_points, 3);
  double step = (hi - lo) / (scan_points - 1);
  int best = 0;
  double best_f = f(lo);
  for (int s = 1; s < scan_points; ++s) {
    double v = f(lo + s * step);
    if (v < best_f) {
      best_f = v;
      best = s;
    }
  }
  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, scan_points - 1) * step;
  // Brent's bits argument: tolerance ~ 2^(1-bits) relative.
  int bits = std::clamp(static_cast<int>(-std::log2(x_tol)), 10, 50);
  auto r = boost::math::tools::brent_find_minima(f, a, b, bits);
  if (r.second <= best_f) return {r.first, r.second};
  return {lo + best * step, best_f};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalFailure("bisect_root: no sign change in bracket");
  for (int it = 0; it < 200 && hi - lo > x_tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > x_tol) throw NumericalFailure("bisect_root: did not converge");
  return 0.5 * (lo + hi);
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int min_depth;
  int max_depth;
};

double simpson_rec(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = st.f(lm);
  double frm = st.f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth >= st.min_depth && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= st.max_depth) throw NumericalFailure("adaptive_simpson: maximum refinement reached");
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int min_depth, int max_depth) {
  if (b <= a) return 0.0;
  SimpsonState st{f, min_depth, max_depth};
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(st, a, b, fa, fm, fb, whole, abs_tol, 0);
}

double gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol);
}

std::vector<double> breakpoints_in(std::vector<double> points, double lo, double hi,
                                   double merge_tol) {
  std::vector<double> out{lo, hi};
  for (double p : points)
    if (std::isfinite(p) && p > lo && p < hi) out.push_back(p);
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double p : out)
    if (merged.empty() || p - merged.back() > merge_tol) merged.push_back(p);
  if (merged.back() != hi) merged.back() = hi;
  return merged;
}

}  // namespace flexcon::numeric
