#pragma once

#include <cstddef>
#include <vector>

namespace urnnet {

using Vec = std::vector<double>;

/// Dense row-major matrix. Sizes here are desk-scale (N up to a few
/// hundred), so everything is plain contiguous storage.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool square() const { return rows == cols; }
  bool empty() const { return rows == 0 || cols == 0; }

  static Mat identity(std::size_t n);
};

bool operator==(const Mat& a, const Mat& b);

Vec mat_vec(const Mat& m, const Vec& x);
Mat mat_mul(const Mat& a, const Mat& b);
double max_abs(const Mat& m);
double max_abs(const Vec& v);

/// Partial-pivot LU factorization, kept explicit so callers can inspect the
/// pivots (singularity verdicts are defined in terms of the smallest pivot
/// relative to the largest entry of the input).
struct LuFactor {
  Mat lu;                       // combined L (unit diagonal) and U
  std::vector<std::size_t> perm;
  double min_abs_pivot = 0.0;
  double input_scale = 0.0;     // max |a_ij| of the factored matrix

  /// Singular at the given relative pivot threshold.
  bool singular(double rel_tol = 1e-10) const {
    return min_abs_pivot <= rel_tol * input_scale || input_scale == 0.0;
  }
};

LuFactor lu_factor(const Mat& a);

/// Solves LUx = Pb. Caller is expected to have checked singular() first;
/// a degenerate pivot throws.
Vec lu_solve(const LuFactor& f, const Vec& b);

/// Convenience: factor + singularity check + solve of a x = b.
/// Returns false (x untouched) when a is singular at rel_tol.
bool solve_linear(const Mat& a, const Vec& b, Vec& x, double rel_tol = 1e-10);

}  // namespace urnnet
