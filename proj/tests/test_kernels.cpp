#include <doctest.h>

#include <vector>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/kernels.hpp"
#include "wigner1d/pathspace.hpp"

using namespace wigner1d;

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  const int m = 32;
  const std::size_t n = 301;
  const BridgeLaw law(1.0, 1.0, m, true);
  Rng rng(12);
  std::vector<double> data;
  std::vector<DiscretePath> paths;
  for (std::size_t i = 0; i < n; ++i) {
    paths.push_back(law.sample_closed_loop(rng));
    data.insert(data.end(), paths.back().slices.begin(), paths.back().slices.end());
  }
  const kernels::LoopBlock block{data, n, static_cast<std::size_t>(m)};
  for (bool corrected : {false, true}) {
    const kernels::KernelSpec spec{1.0, corrected, 1.0 / law.dt()};
    std::vector<float> a(n * n), b(n * n);
    kernels::build_kernel_matrix(block, spec, a, kernels::Backend::serial);
    kernels::build_kernel_matrix(block, spec, b, kernels::Backend::openmp);
    CHECK(a == b);
    const auto mode = corrected ? CrossingMode::crossing_corrected : CrossingMode::strict;
    for (std::size_t i = 0; i < n; i += 37)
      for (std::size_t j = 0; j < n; j += 11)
        CHECK(a[i * n + j] == static_cast<float>(kernel_k(paths[i], paths[j], 1.0, mode)));
    std::vector<double> x(n), y1(n), y2(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / static_cast<double>(i + 1);
    kernels::apply(a, n, x, y1, kernels::Backend::serial);
    kernels::apply(a, n, x, y2, kernels::Backend::openmp);
    CHECK(y1 == y2);
  }
  CHECK(kernels::thread_count() >= 1);
  std::vector<float> wrong(3);
  const kernels::KernelSpec spec{1.0, false, 1.0};
  CHECK_THROWS_AS(kernels::build_kernel_matrix(block, spec, wrong, kernels::Backend::serial),
                  std::invalid_argument);
}

TEST_CASE("reflection pairs fill the mirrored half exactly") {
  const int m = 32;
  const std::size_t n = 2 * 151;
  const BridgeLaw law(1.0, 1.0, m, true);
  Rng rng(5);
  std::vector<double> data;
  for (std::size_t p = 0; p < n / 2; ++p) {
    const auto loop = law.sample_closed_loop(rng);
    data.insert(data.end(), loop.slices.begin(), loop.slices.end());
    for (double v : loop.slices) data.push_back(-v);
  }
  const kernels::LoopBlock block{data, n, static_cast<std::size_t>(m)};
  for (bool corrected : {false, true}) {
    kernels::KernelSpec spec{1.0, corrected, 1.0 / law.dt()};
    std::vector<float> full(n * n), serial(n * n), parallel(n * n);
    kernels::build_kernel_matrix(block, spec, full, kernels::Backend::serial);
    spec.reflection_pairs = true;
    kernels::build_kernel_matrix(block, spec, serial, kernels::Backend::serial);
    kernels::build_kernel_matrix(block, spec, parallel, kernels::Backend::openmp);
    CHECK(serial == full);
    CHECK(parallel == full);
  }
  std::vector<float> odd(9);
  const kernels::KernelSpec spec{1.0, false, 1.0, true};
  CHECK_THROWS_AS(kernels::build_kernel_matrix(kernels::LoopBlock{data, 3, static_cast<std::size_t>(m)},
                                               spec, odd, kernels::Backend::serial),
                  std::invalid_argument);
}
