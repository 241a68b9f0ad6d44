#include "wigner1d/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#include <omp.h>

#include "wigner1d/pathspace.hpp"

namespace wigner1d::kernels {

namespace {

constexpr std::size_t kTile = 64;

void build_row(const LoopBlock& loops, const KernelSpec& spec, std::size_t i,
               float* row) {
  const double* gi = loops.loop(i);
  // with reflection pairs only entries with i <= (j ^ 1) are evaluated
  const std::size_t first = spec.reflection_pairs ? (i & ~std::size_t{1}) : 0;
  for (std::size_t j = first; j < loops.count; ++j) {
    if (spec.reflection_pairs && i > (j ^ 1U)) continue;
    row[j] = static_cast<float>(detail::closed_gap_weight(
        gi, loops.loop(j), loops.slices, spec.gap, spec.corrected, spec.inv_scale));
  }
}

// Copies K(i, j) = K(j ^ 1, i ^ 1) for i > (j ^ 1) within one tile of rows
// and columns; the source entries lie in the mirrored tile.
void mirror_tile(float* k, std::size_t n, std::size_t row0, std::size_t col0) {
  const std::size_t row1 = std::min(n, row0 + kTile);
  const std::size_t col1 = std::min(n, col0 + kTile);
  for (std::size_t i = row0; i < row1; ++i)
    for (std::size_t j = col0; j < col1; ++j)
      if (i > (j ^ 1U)) k[i * n + j] = k[(j ^ 1U) * n + (i ^ 1U)];
}

// Eight interleaved partial sums, combined pairwise; the order is fixed so the
// serial and threaded paths agree exactly.
double row_dot(const float* row, const double* x, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8)
    for (std::size_t l = 0; l < 8; ++l) acc[l] += static_cast<double>(row[j + l]) * x[j + l];
  for (std::size_t l = 0; j < n; ++j, ++l) acc[l] += static_cast<double>(row[j]) * x[j];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
}

}  // namespace

void build_kernel_matrix(const LoopBlock& loops, const KernelSpec& spec,
                         std::span<float> out, Backend backend) {
  const std::size_t n = loops.count;
  if (out.size() != n * n) throw std::invalid_argument("kernel matrix has the wrong size");
  if (spec.reflection_pairs && n % 2 != 0)
    throw std::invalid_argument("reflection pairs need an even loop count");
  const std::size_t tiles = (n + kTile - 1) / kTile;
  if (backend == Backend::serial) {
    for (std::size_t i = 0; i < n; ++i) build_row(loops, spec, i, out.data() + i * n);
    if (spec.reflection_pairs)
      for (std::size_t t = 0; t < tiles * tiles; ++t)
        mirror_tile(out.data(), n, (t / tiles) * kTile, (t % tiles) * kTile);
    return;
  }
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    build_row(loops, spec, static_cast<std::size_t>(i), out.data() + static_cast<std::size_t>(i) * n);
  if (!spec.reflection_pairs) return;
  const auto count = static_cast<std::ptrdiff_t>(tiles * tiles);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const auto u = static_cast<std::size_t>(t);
    mirror_tile(out.data(), n, (u / tiles) * kTile, (u % tiles) * kTile);
  }
}

void apply(std::span<const float> k, std::size_t n, std::span<const double> x,
           std::span<double> y, Backend backend) {
  if (k.size() != n * n || x.size() != n || y.size() != n)
    throw std::invalid_argument("matrix-vector sizes disagree");
  if (backend == Backend::serial) {
    for (std::size_t i = 0; i < n; ++i) y[i] = row_dot(k.data() + i * n, x.data(), n);
    return;
  }
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    y[r] = row_dot(k.data() + r * n, x.data(), n);
  }
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace wigner1d::kernels
