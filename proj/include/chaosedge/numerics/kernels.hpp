#pragma once

// Dense kernels in two flavours. `serial::` holds the naive reference loops the
// tests compare against; the unqualified versions split work into fixed-size
// chunks scheduled over OpenMP threads. Chunk boundaries never depend on the
// thread count, so results are bit-identical for any number of workers.

#include <cstddef>
#include <span>

#include "chaosedge/numerics/matrix.hpp"

namespace chaosedge::kernels {

/// Output rows/columns handled by one parallel task.
inline constexpr std::size_t kChunk = 256;

int max_workers() noexcept;
/// Maps a user request (<= 0 means "all") onto an OpenMP thread count.
int resolve_workers(int requested) noexcept;

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b);
void matmul_abt(const Matrix& a, const Matrix& b, Matrix& out);  // a * b^T
void matmul_atb(const Matrix& a, const Matrix& b, Matrix& out);  // a^T * b
void matvec(const Matrix& w, std::span<const double> x, std::span<double> out);

}  // namespace serial

Matrix matmul(const Matrix& a, const Matrix& b);
void matmul_into(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_abt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_atb(const Matrix& a, const Matrix& b, Matrix& out);
void matvec(const Matrix& w, std::span<const double> x, std::span<double> out);

void tanh_inplace(std::span<double> v);

}  // namespace chaosedge::kernels

namespace chaosedge {

/// Standard product; throws ShapeError when a.cols != b.rows.
inline Matrix matmul(const Matrix& a, const Matrix& b) { return kernels::matmul(a, b); }

}  // namespace chaosedge
