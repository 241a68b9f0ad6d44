#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "wigner1d/gaussian.hpp"

using namespace wigner1d;

namespace {

// Trapezoid rule on a wide symmetric window; spectrally accurate for the
// Gaussian integrands used here.
double integrate(const std::function<double(double)>& f, double half_width, int n) {
  const double h = 2.0 * half_width / n;
  double s = 0.5 * (f(-half_width) + f(half_width));
  for (int i = 1; i < n; ++i) s += f(-half_width + i * h);
  return s * h;
}

}  // namespace

TEST_CASE("mehler kernel basics") {
  CHECK(mehler(0.4, 0.3, -0.7, 1.3) == mehler(0.4, -0.7, 0.3, 1.3));
  CHECK(mehler(0.4, 0.3, -0.7, 1.3) > 0.0);
  CHECK_THROWS_AS(mehler(0.0, 0.0, 0.0, 1.0), std::domain_error);
  CHECK(std::exp(log_mehler(0.7, 0.2, 0.4, 2.0)) == doctest::Approx(mehler(0.7, 0.2, 0.4, 2.0)));
  // rho = 0 is the heat kernel
  CHECK(mehler(0.5, 0.0, 1.0, 0.0) ==
        doctest::Approx(std::exp(-1.0 / (2 * 0.5)) / std::sqrt(2 * M_PI * 0.5)));
}

TEST_CASE("mehler semigroup") {
  const double s = 0.3, t = 0.7, x = 0.2, y = -0.5, rho = 1.0;
  const double lhs =
      integrate([&](double z) { return mehler(s, x, z, rho) * mehler(t, z, y, rho); }, 12.0, 4000);
  CHECK(std::abs(lhs - mehler(s + t, x, y, rho)) < 1e-8);
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double a = pos(rng), b = pos(rng), p = u(rng), q = u(rng), r = 0.1 + 2.0 * pos(rng);
    const double v =
        integrate([&](double z) { return mehler(a, p, z, r) * mehler(b, z, q, r); }, 12.0, 6000);
    CHECK(std::abs(v - mehler(a + b, p, q, r)) < 1e-8);
  }
}

TEST_CASE("trace of the kernel is c") {
  const double beta = 1.0, rho = 2.0;
  const double trace = integrate([&](double x) { return mehler(beta, x, x, rho); }, 10.0, 4000);
  CHECK(std::abs(trace - normalization_c(beta, rho)) < 1e-10);
}

TEST_CASE("normalization constant") {
  // extended-precision reference value of 1 / (2 sinh 1)
  CHECK(normalization_c(1.0, 2.0) == doctest::Approx(0.4254590641196608).epsilon(1e-14));
  CHECK(normalization_c(50.0, 2.0) / std::exp(-50.0) == doctest::Approx(1.0).epsilon(1e-6));
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int k = 0; k < 20; ++k) {
    const double b = u(rng), r = u(rng);
    CHECK(normalization_c(b, r) == doctest::Approx(normalization_c_exp_form(b, r)).epsilon(1e-12));
    CHECK(log_normalization_c(b, r) == doctest::Approx(std::log(normalization_c(b, r))).epsilon(1e-12));
  }
  CHECK(std::isfinite(log_normalization_c(2000.0, 2.0)));
}

TEST_CASE("loop variance") {
  CHECK(variance_sigma2(1.0, 2.0) == doctest::Approx(0.3282588213748328).epsilon(1e-14));
  CHECK(variance_sigma2(200.0, 2.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(4.0))).epsilon(1e-12));
}

TEST_CASE("closed loop sampler: marginals, stationarity, reflection") {
  const double beta = 1.0, rho = 2.0;
  const BridgeLaw law(beta, rho, 16, true);
  Rng rng(17);
  const int n = 20000;
  std::vector<double> s0, s5, m00, m01, m08, odd;
  double sum0 = 0, sum0sq = 0, c01 = 0, c34 = 0, c08 = 0, third = 0;
  std::vector<double> first;
  for (int k = 0; k < n; ++k) {
    const auto loop = law.sample_closed_loop(rng);
    REQUIRE(loop.slices.size() == 16);
    sum0 += loop.slices[0];
    sum0sq += loop.slices[5] * loop.slices[5];
    c01 += loop.slices[0] * loop.slices[1];
    c34 += loop.slices[3] * loop.slices[4];
    c08 += loop.slices[0] * loop.slices[8];
    third += std::pow(loop.slices[2], 3);
    first.push_back(loop.slices[7]);
  }
  const double var = variance_sigma2(beta, rho);
  CHECK(std::abs(sum0 / n) < 4 * std::sqrt(var / n));
  CHECK(std::abs(sum0sq / n - var) < 4 * var * std::sqrt(2.0 / n));
  // covariance depends only on the lag
  CHECK(std::abs(c01 / n - c34 / n) < 4 * var * std::sqrt(2.0 / n));
  CHECK(c08 / n < c01 / n);
  CHECK(std::abs(third / n) < 4 * std::sqrt(15.0 * var * var * var / n));
  // Kolmogorov-Smirnov against N(0, var) at the 1% level
  std::sort(first.begin(), first.end());
  double d = 0.0;
  for (int k = 0; k < n; ++k) {
    const double cdf = 0.5 * std::erfc(-first[static_cast<std::size_t>(k)] / std::sqrt(2 * var));
    d = std::max({d, std::abs(cdf - static_cast<double>(k) / n), std::abs(cdf - (k + 1.0) / n)});
  }
  CHECK(d * std::sqrt(static_cast<double>(n)) < 1.63);
}

TEST_CASE("samplers are deterministic") {
  const BridgeLaw law(2.0, 1.0, 32, true);
  Rng a(123), b(123);
  CHECK(law.sample_closed_loop(a).slices == law.sample_closed_loop(b).slices);
  CHECK(derive_seed(10, 3) == 13);
  CHECK_THROWS_AS(BridgeLaw(1.0, 1.0, 1, true), std::domain_error);
}

TEST_CASE("open OU segments") {
  const double rho = 1.0, omega = std::sqrt(2.0 * rho), t = 0.8, x0 = 0.7;
  const BridgeLaw law(1.0, rho, 8, false);
  Rng rng(4);
  const int n = 40000;
  double s = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const auto seg = law.sample_open_segment(x0, t, rng);
    REQUIRE(seg.path.slices.front() == x0);
    const double end = seg.path.slices.back();
    s += end;
    s2 += end * end;
    CHECK(seg.weight == doctest::Approx(std::exp(-omega * t / 2 + omega * (end * end - x0 * x0) / 2)));
  }
  const double mean = x0 * std::exp(-omega * t);
  const double var = (1 - std::exp(-2 * omega * t)) / (2 * omega);
  CHECK(std::abs(s / n - mean) < 4 * std::sqrt(var / n));
  const double v = s2 / n - (s / n) * (s / n);
  CHECK(std::abs(v - var) < 4 * var * std::sqrt(2.0 / n));
  const auto flat = law.sample_open_segment(0.3, 0.0, rng);
  for (double v0 : flat.path.slices) CHECK(v0 == 0.3);
}

TEST_CASE("harmonic bridge pins both ends") {
  Rng rng(8);
  const auto b = sample_bridge(0.1, -0.4, 1.0, 10, 1.0, rng);
  REQUIRE(b.slices.size() == 11);
  CHECK(b.slices.front() == 0.1);
  CHECK(b.slices.back() == -0.4);
  CHECK_FALSE(b.closed);
}

TEST_CASE("segment regrowth keeps the anchors") {
  Rng rng(2);
  std::vector<double> x(16, 0.5);
  resample_segment(x, 14, 4, 0.1, 0.0, Spring(1.0), rng);
  CHECK(x[14] == 0.5);
  CHECK(x[3] == 0.5);
  CHECK(x[15] != 0.5);
  CHECK(x[2] != 0.5);
  CHECK(x[4] == 0.5);
}

TEST_CASE("loop density matches the kernel product") {
  const DiscretePath loop{{0.1, -0.2, 0.3}, 1.0 / 3.0, true};
  const double expected = log_mehler(1.0 / 3, 0.1, -0.2, 2.0) + log_mehler(1.0 / 3, -0.2, 0.3, 2.0) +
                          log_mehler(1.0 / 3, 0.3, 0.1, 2.0) - log_normalization_c(1.0, 2.0);
  CHECK(log_loop_density(loop, 2.0) == doctest::Approx(expected).epsilon(1e-13));
}
