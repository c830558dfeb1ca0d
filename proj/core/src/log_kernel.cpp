// Vector variants of exp() from glibc's libmvec; the header only advertises
// them under -ffast-math, which this file does not want.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
extern "C" double exp(double) noexcept __attribute__((__simd__("notinbranch")));
#endif

#include "log_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmfield::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Below this a fast-path sum may have lost terms to underflow.
constexpr double kUnderflowGuard = 1e-280;

std::vector<double> axis_cost(int n, double lo, double h, double eps, bool periodic) {
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  const double len = n * h;
  for (int o = 0; o < n; ++o) {
    const double xo = lo + (o + 0.5) * h;
    for (int k = 0; k < n; ++k) {
      double d = std::abs(xo - (lo + (k + 0.5) * h));
      if (periodic) d = std::min(d, len - d);
      c[static_cast<std::size_t>(o) * n + k] = d * d / eps;
    }
  }
  return c;
}

inline double row_max(const double* v, int n) {
  double mx = kNegInf;
#pragma omp simd reduction(max : mx)
  for (int k = 0; k < n; ++k) mx = v[k] > mx ? v[k] : mx;
  return mx;
}

// log sum_k exp(in_k - cost_k), exact.
inline double lse_minus(const double* in, const double* cost, int n) {
  double mx = kNegInf;
#pragma omp simd reduction(max : mx)
  for (int k = 0; k < n; ++k) {
    const double t = in[k] - cost[k];
    mx = t > mx ? t : mx;
  }
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (int k = 0; k < n; ++k) s += std::exp(in[k] - cost[k] - mx);
  return mx + std::log(s);
}

// out[o * rows + r] = log sum_k exp(in[r * len + k] - cost[o * len + k])
//
// Each input row is shifted by its own maximum and contracted with the
// precomputed kernel exp(-cost). When the contraction is so small that
// underflowed terms could matter, the entry is recomputed exactly.
void reduce_axis(const double* in, int rows, int len, const double* cost, const double* kern,
                 double* out, std::vector<double>& scratch) {
  scratch.resize(len);
  double* v = scratch.data();
  for (int r = 0; r < rows; ++r) {
    const double* row = in + static_cast<std::size_t>(r) * len;
    const double shift = row_max(row, len);
#pragma omp simd
    for (int k = 0; k < len; ++k) v[k] = std::exp(row[k] - shift);
    for (int o = 0; o < len; ++o) {
      const double* kr = kern + static_cast<std::size_t>(o) * len;
      double s = 0.0;
#pragma omp simd reduction(+ : s)
      for (int k = 0; k < len; ++k) s += kr[k] * v[k];
      out[static_cast<std::size_t>(o) * rows + r] =
          s > kUnderflowGuard ? shift + std::log(s)
                              : lse_minus(row, cost + static_cast<std::size_t>(o) * len, len);
    }
  }
}

}  // namespace

LogKernel::LogKernel(const Grid& grid, double eps, SinkhornKernel mode, bool periodic)
    : grid_(grid), eps_(eps), mode_(mode) {
  cost_x_ = axis_cost(grid.nx(), grid.x_min(), grid.dx(), eps, periodic);
  cost_y_ = axis_cost(grid.ny(), grid.y_min(), grid.dy(), eps, periodic);
  kern_x_.resize(cost_x_.size());
  kern_y_.resize(cost_y_.size());
  std::transform(cost_x_.begin(), cost_x_.end(), kern_x_.begin(),
                 [](double c) { return std::exp(-c); });
  std::transform(cost_y_.begin(), cost_y_.end(), kern_y_.begin(),
                 [](double c) { return std::exp(-c); });
  logits_.resize(grid.size());
  stage_.resize(grid.size());
}

void LogKernel::softmin(std::span<const double> pot, std::span<const double> logw,
                        std::span<double> out) {
  const double inv = 1.0 / eps_;
  for (std::size_t k = 0; k < logits_.size(); ++k) logits_[k] = pot[k] * inv + logw[k];
  if (mode_ == SinkhornKernel::dense) {
    softmin_dense(logits_, out);
  } else {
    softmin_separable(logits_, out);
  }
}

void LogKernel::softmin_separable(std::span<const double> logits, std::span<double> out) {
  const int nx = grid_.nx(), ny = grid_.ny();
  std::vector<double> scratch;
  // logits[j][i] --(reduce over source x)--> stage[i][j]
  reduce_axis(logits.data(), ny, nx, cost_x_.data(), kern_x_.data(), stage_.data(), scratch);
  // stage[i][j] --(reduce over source y)--> out[j][i]
  reduce_axis(stage_.data(), nx, ny, cost_y_.data(), kern_y_.data(), out.data(), scratch);
  for (double& v : out) v *= -eps_;
}

void LogKernel::softmin_dense(std::span<const double> logits, std::span<double> out) {
  const int nx = grid_.nx(), ny = grid_.ny();
  const std::size_t n = grid_.size();
  std::vector<double> cost(n);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // cost from target cell (i, j) to every source cell
      for (int l = 0; l < ny; ++l) {
        const double cy = cost_y_[static_cast<std::size_t>(j) * ny + l];
        for (int k = 0; k < nx; ++k) {
          cost[static_cast<std::size_t>(l) * nx + k] =
              cost_x_[static_cast<std::size_t>(i) * nx + k] + cy;
        }
      }
      out[grid_.index(i, j)] = -eps_ * lse_minus(logits.data(), cost.data(), static_cast<int>(n));
    }
  }
}

}  // namespace swarmfield::detail
