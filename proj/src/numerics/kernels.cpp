#include "chaosedge/numerics/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chaosedge::kernels {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(const Matrix& m) {
  return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}
MutMap view(Matrix& m) {
  return MutMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

void check_product(const Matrix& a, const Matrix& b, const char* what, std::size_t inner_a,
                   std::size_t inner_b) {
  if (inner_a != inner_b) {
    throw ShapeError(std::string(what) + ": inner dimensions differ (" + shape_string(a) +
                     " vs " + shape_string(b) + ")");
  }
}

}  // namespace

int max_workers() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int resolve_workers(int requested) noexcept {
  return requested > 0 ? requested : max_workers();
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_product(a, b, "matmul", a.cols(), b.rows());
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

void matmul_abt(const Matrix& a, const Matrix& b, Matrix& out) {
  check_product(a, b, "matmul_abt", a.cols(), b.cols());
  out.resize(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      out(i, j) = s;
    }
}

void matmul_atb(const Matrix& a, const Matrix& b, Matrix& out) {
  check_product(a, b, "matmul_atb", a.rows(), b.rows());
  out.resize(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
      out(i, j) = s;
    }
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> out) {
  if (w.cols() != x.size() || w.rows() != out.size()) {
    throw ShapeError("matvec: " + shape_string(w) + " against vector of " +
                     std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * x[j];
    out[i] = s;
  }
}

}  // namespace serial

void matmul_into(const Matrix& a, const Matrix& b, Matrix& out) {
  check_product(a, b, "matmul", a.cols(), b.rows());
  out.resize(a.rows(), b.cols());
  const auto A = view(a);
  const auto B = view(b);
  auto C = view(out);
  const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(b.cols()));
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto c0 = static_cast<Eigen::Index>(c * kChunk);
    const auto len = std::min<Eigen::Index>(kChunk, B.cols() - c0);
    C.middleCols(c0, len).noalias() = A * B.middleCols(c0, len);
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out;
  matmul_into(a, b, out);
  return out;
}

void matmul_abt(const Matrix& a, const Matrix& b, Matrix& out) {
  check_product(a, b, "matmul_abt", a.cols(), b.cols());
  out.resize(a.rows(), b.rows());
  const auto A = view(a);
  const auto B = view(b);
  auto C = view(out);
  const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(b.rows()));
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto c0 = static_cast<Eigen::Index>(c * kChunk);
    const auto len = std::min<Eigen::Index>(kChunk, B.rows() - c0);
    C.middleCols(c0, len).noalias() = A * B.middleRows(c0, len).transpose();
  }
}

void matmul_atb(const Matrix& a, const Matrix& b, Matrix& out) {
  check_product(a, b, "matmul_atb", a.rows(), b.rows());
  out.resize(a.cols(), b.cols());
  const auto A = view(a);
  const auto B = view(b);
  auto C = view(out);
  const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(a.cols()));
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto r0 = static_cast<Eigen::Index>(c * kChunk);
    const auto len = std::min<Eigen::Index>(kChunk, A.cols() - r0);
    C.middleRows(r0, len).noalias() = A.middleCols(r0, len).transpose() * B;
  }
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> out) {
  if (w.cols() != x.size() || w.rows() != out.size()) {
    throw ShapeError("matvec: " + shape_string(w) + " against vector of " +
                     std::to_string(x.size()));
  }
  const auto rows = static_cast<std::ptrdiff_t>(w.rows());
  const std::size_t n = w.cols();
  const double* xp = x.data();
#pragma omp parallel for schedule(static) if (rows >= static_cast<std::ptrdiff_t>(2 * kChunk))
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* wr = w.data() + static_cast<std::size_t>(i) * n;
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::size_t j = 0; j < n; ++j) s += wr[j] * xp[j];
    out[static_cast<std::size_t>(i)] = s;
  }
}

void tanh_inplace(std::span<double> v) {
  for (double& x : v) x = std::tanh(x);
}

}  // namespace chaosedge::kernels
