#include <doctest.h>

#include <cmath>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/oracle.hpp"

using namespace wigner1d;

TEST_CASE("harmonic single particle approaches the loop constant") {
  const double beta = 1.0, rho = 1.0;
  const double width = 8.0 * std::sqrt(variance_sigma2(beta, rho));
  const auto r = diagonalize_one_body(
      -width / 2, width / 2, [&](double x) { return rho * x * x + 1.0 / (12 * rho); }, beta, 200);
  const double expected = log_normalization_c(beta, rho) - beta / (12 * rho);
  CHECK(std::abs(std::exp(r.log_z - expected) - 1.0) < 0.01);
}

TEST_CASE("one-particle oracle") {
  const ModelParams p(1.0, 1.0, 0.0, 1.0);
  const auto r = diagonalize_small(p, 100);
  double mass = 0.0;
  const double h = r.grid[1] - r.grid[0];
  for (double v : r.rho1) mass += v * h;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.log_z_error < 1e-3);
  // doubling the grid stays inside the extrapolation error
  const auto fine = diagonalize_small(p, 200);
  CHECK(std::abs(fine.log_z - r.log_z) < std::max(r.log_z_error, 1e-6));
  CHECK_THROWS_AS(diagonalize_small(p, 20), std::domain_error);
  CHECK_THROWS_AS(diagonalize_small(ModelParams(1.0, 1.0, 0.0, 3.0), 40), std::domain_error);
}

TEST_CASE("two-particle oracle vanishes on the diagonal") {
  const ModelParams p(1.0, 1.0, -1.0, 1.0);
  const auto r = diagonalize_small(p, 40);
  const std::size_t g = r.grid.size();
  REQUIRE(r.rho2.size() == g * g);
  double mass = 0.0, diag = 0.0, peak = 0.0;
  const double h = r.grid[1] - r.grid[0];
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      mass += r.rho2[i * g + j] * h * h;
      peak = std::max(peak, r.rho2[i * g + j]);
    }
    diag = std::max(diag, r.rho2[i * g + i]);
  }
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(diag < 1e-12 * peak);
  double m1 = 0.0;
  for (double v : r.rho1) m1 += v * h;
  CHECK(m1 == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Karlin-McGregor determinants") {
  const Box line{};
  const std::vector<double> one{0.3}, other{0.8};
  CHECK(karlin_mcgregor(one, other, 0.5, line) == doctest::Approx(box_heat_kernel(0.5, 0.3, 0.8, line)));
  const std::vector<double> same{0.2, 0.2}, ends{0.0, 1.0};
  CHECK(karlin_mcgregor(same, ends, 1.0, line) == doctest::Approx(0.0));
  const std::vector<double> starts{0.0, 0.4}, e1{0.1, 0.9}, e2{0.9, 0.1};
  CHECK(karlin_mcgregor(starts, e1, 1.0, line) == -karlin_mcgregor(starts, e2, 1.0, line));
  const std::vector<double> bad{0.5, 0.1};
  CHECK_THROWS_AS(karlin_mcgregor(bad, e1, 1.0, line), std::domain_error);
  // two bridges on the line: 1 - exp(-2 d d' / (2 t))
  const std::vector<double> x{0.0, 0.5};
  CHECK(karlin_mcgregor_noncollision(x, x, 1.0, line) ==
        doctest::Approx(1.0 - std::exp(-0.25)).epsilon(1e-12));
  // single particle killed at the walls of [0, 1]
  const Box box{0.0, 1.0};
  CHECK(box_heat_kernel(0.1, 0.5, 0.5, box) < box_heat_kernel(0.1, 0.5, 0.5, line));
  CHECK(box_heat_kernel(0.1, 0.0, 0.5, box) == 0.0);
}
