#include <doctest.h>

#include <cmath>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/oracle.hpp"
#include "wigner1d/pathspace.hpp"

using namespace wigner1d;

namespace {

DiscretePath constant(double v, int m, double dt) {
  return DiscretePath{std::vector<double>(static_cast<std::size_t>(m), v), dt, true};
}

DiscretePath random_loop(Rng& rng, double beta, double rho, int m) {
  return BridgeLaw(beta, rho, m, true).sample_closed_loop(rng);
}

}  // namespace

TEST_CASE("kernel examples") {
  Rng rng(1);
  const auto g = random_loop(rng, 1.0, 1.0, 16);
  for (auto mode : {CrossingMode::strict, CrossingMode::crossing_corrected})
    CHECK(kernel_k(g, g, 0.5, mode) > 0.0);
  CHECK(kernel_k(g, g, 0.5, CrossingMode::strict) == 1.0);
  CHECK(kernel_k(constant(0.0, 8, 0.1), constant(-1.0, 8, 0.1), 1.0, CrossingMode::strict) == 0.0);
  CHECK_THROWS_AS(kernel_k(constant(0.0, 8, 0.1), constant(0.0, 9, 0.1), 1.0, CrossingMode::strict),
                  std::domain_error);
  CHECK(to_string(crossing_mode_from_string("strict")) == std::string("strict"));
  CHECK_THROWS_AS(crossing_mode_from_string("fuzzy"), std::invalid_argument);
}

TEST_CASE("crossing-corrected factor for a single interval") {
  const DiscretePath g{{0.0, 0.0}, 0.5, false};
  const DiscretePath e{{0.3, 0.2}, 0.5, false};
  const double expected = 1.0 - std::exp(-2.0 * 0.3 * 0.2 / (2.0 * 0.5));
  CHECK(kernel_k(g, e, 0.0, CrossingMode::crossing_corrected) == doctest::Approx(expected));
}

TEST_CASE("boundary functions") {
  const double rho = 2.0;
  // constant path at distance 1/4 from each wall, eight intervals of 0.1
  const double corrected = std::pow(1.0 - std::exp(-2.0 * 0.25 * 0.25 / 0.1), 8);
  CHECK(boundary_f(constant(0.0, 8, 0.1), rho, CrossingMode::strict) == 1.0);
  CHECK(boundary_g(constant(0.0, 8, 0.1), rho, CrossingMode::strict) == 1.0);
  CHECK(boundary_f(constant(0.0, 8, 0.1), rho, CrossingMode::crossing_corrected) ==
        doctest::Approx(corrected).epsilon(1e-12));
  CHECK(boundary_g(constant(0.0, 8, 0.1), rho, CrossingMode::crossing_corrected) ==
        doctest::Approx(corrected).epsilon(1e-12));
  for (auto mode : {CrossingMode::strict, CrossingMode::crossing_corrected})
    CHECK(boundary_g(constant(1.0 / rho, 8, 0.1), rho, mode) == 0.0);
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto g = random_loop(rng, 1.0, rho, 16);
    for (auto mode : {CrossingMode::strict, CrossingMode::crossing_corrected})
      CHECK(boundary_f(g, rho, mode) == boundary_g(g.reflected(), rho, mode));
  }
}

TEST_CASE("reflection symmetry is exact and monotonicity holds") {
  Rng rng(3);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 200; ++k) {
    const auto g = random_loop(rng, 1.0, 1.0, 16);
    auto e = random_loop(rng, 1.0, 1.0, 16);
    for (auto mode : {CrossingMode::strict, CrossingMode::crossing_corrected}) {
      CHECK(kernel_k(g, e, 1.0, mode) == kernel_k(e.reflected(), g.reflected(), 1.0, mode));
      auto raised = e;
      raised.slices[static_cast<std::size_t>(k % 16)] += std::abs(normal(rng));
      CHECK(kernel_k(g, raised, 1.0, mode) >= kernel_k(g, e, 1.0, mode));
    }
  }
}

TEST_CASE("chamber factorization") {
  const ModelParams p(1.0, 1.0, -2.0, 2.0);
  const auto spec = ChamberSpec::from(p);
  const int m = 16;
  const double dt = p.beta() / m;
  std::vector<DiscretePath> lattice;
  for (int j = 0; j < spec.n; ++j) lattice.push_back(constant(spec.site(j), m, dt));
  CHECK(in_chamber(lattice, spec, CrossingMode::strict) == 1.0);
  auto swapped = lattice;
  std::swap(swapped[1], swapped[2]);
  CHECK(in_chamber(swapped, spec, CrossingMode::strict) == 0.0);
  CHECK_THROWS_AS(in_chamber(std::span(lattice).first(2), spec, CrossingMode::strict),
                  std::domain_error);

  Rng rng(4);
  // a stiff spring keeps a fair share of the draws inside the chamber
  const BridgeLaw law(1.0, 16.0, m, true);
  int nonzero = 0;
  for (int k = 0; k < 200; ++k) {
    std::vector<DiscretePath> paths;
    for (int j = 0; j < spec.n; ++j) paths.push_back(law.sample_closed_loop(rng).shifted(spec.site(j)));
    for (auto mode : {CrossingMode::strict, CrossingMode::crossing_corrected}) {
      const double a = in_chamber(paths, spec, mode);
      const double b = in_chamber_direct(paths, spec, mode);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
      nonzero += a > 0.0;
    }
  }
  CHECK(nonzero > 0);
}

TEST_CASE("free-bridge chamber probability matches Karlin-McGregor") {
  // two free bridges in [0, 2] pinned at (0.5, 1.2) at both ends over t = 1
  const Box box{0.0, 2.0};
  const std::vector<double> x{0.5, 1.2};
  const double exact = karlin_mcgregor_noncollision(x, x, 1.0, box);
  const ChamberSpec spec{0.0, 2.0, 1.0, 2};
  const int m = 64;
  const int n = 40000;
  Rng rng(6);
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    std::vector<DiscretePath> paths{sample_bridge(x[0], x[0], 1.0, m, 0.0, rng),
                                    sample_bridge(x[1], x[1], 1.0, m, 0.0, rng)};
    const double w = in_chamber_direct(paths, spec, CrossingMode::crossing_corrected);
    s += w;
    s2 += w * w;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - exact) < 3.5 * se);
}
