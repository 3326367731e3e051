#include "urnnet/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "urnnet/error.hpp"

namespace urnnet {

Mat Mat::identity(std::size_t n) {
  Mat m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool operator==(const Mat& a, const Mat& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

Vec mat_vec(const Mat& m, const Vec& x) {
  if (x.size() != m.cols)
    throw Error(ErrorCode::MismatchedShapes, "mat_vec: size mismatch");
  Vec y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows)
    throw Error(ErrorCode::MismatchedShapes, "mat_mul: size mismatch");
  Mat c(a.rows, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs(const Mat& m) {
  double s = 0.0;
  for (double v : m.data) s = std::max(s, std::fabs(v));
  return s;
}

double max_abs(const Vec& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

LuFactor lu_factor(const Mat& a) {
  if (!a.square())
    throw Error(ErrorCode::NonSquare, "lu_factor: matrix must be square");
  const std::size_t n = a.rows;
  LuFactor f;
  f.lu = a;
  f.perm.resize(n);
  f.input_scale = max_abs(a);
  f.min_abs_pivot = (n == 0) ? 0.0 : std::fabs(f.input_scale);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  double min_pivot = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    // pick the largest pivot in column k
    std::size_t piv = k;
    double best = std::fabs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(f.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(f.lu.data[k * n + j], f.lu.data[piv * n + j]);
      std::swap(f.perm[k], f.perm[piv]);
    }
    const double pivot = f.lu(k, k);
    const double ap = std::fabs(pivot);
    if (min_pivot < 0.0 || ap < min_pivot) min_pivot = ap;
    if (pivot == 0.0) continue;  // row of zeros below; factorization stops cleanly
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) / pivot;
      f.lu(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  f.min_abs_pivot = (min_pivot < 0.0) ? 0.0 : min_pivot;
  return f;
}

Vec lu_solve(const LuFactor& f, const Vec& b) {
  const std::size_t n = f.lu.rows;
  if (b.size() != n)
    throw Error(ErrorCode::MismatchedShapes, "lu_solve: size mismatch");
  Vec x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  // forward substitution (unit lower)
  for (std::size_t i = 1; i < n; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= f.lu(i, j) * x[j];
    x[i] = acc;
  }
  // back substitution
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= f.lu(ii, j) * x[j];
    const double pivot = f.lu(ii, ii);
    if (pivot == 0.0)
      throw Error(ErrorCode::SingularK, "lu_solve: zero pivot");
    x[ii] = acc / pivot;
  }
  return x;
}

bool solve_linear(const Mat& a, const Vec& b, Vec& x, double rel_tol) {
  LuFactor f = lu_factor(a);
  if (f.singular(rel_tol)) return false;
  x = lu_solve(f, b);
  return true;
}

}  // namespace urnnet
