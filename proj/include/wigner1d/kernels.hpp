#pragma once

#include <cstddef>
#include <span>

namespace wigner1d::kernels {

/// Execution backend for the data-parallel kernels. `serial` is the reference
/// implementation; `openmp` must reproduce it bit for bit.
enum class Backend { serial, openmp };

/// Flat storage of `count` closed loops with `slices` values each.
struct LoopBlock {
  std::span<const double> data;
  std::size_t count = 0;
  std::size_t slices = 0;

  const double* loop(std::size_t i) const { return data.data() + i * slices; }
};

struct KernelSpec {
  double gap = 1.0;        // lambda
  bool corrected = false;  // crossing-corrected weights
  double inv_scale = 0.0;  // 2 / (D dt) with D = 2
  // loop(i ^ 1) == -loop(i); then K(i, j) = K(j ^ 1, i ^ 1) and half the
  // matrix is copied instead of evaluated
  bool reflection_pairs = false;
};

/// out[i * count + j] = K(loop_i, loop_j).
void build_kernel_matrix(const LoopBlock& loops, const KernelSpec& spec,
                         std::span<float> out, Backend backend);

/// y_i = sum_j k[i * n + j] * x_j with a fixed summation order.
void apply(std::span<const float> k, std::size_t n, std::span<const double> x,
           std::span<double> y, Backend backend);

/// Number of OpenMP threads the parallel backend will use.
int thread_count();

}  // namespace wigner1d::kernels
