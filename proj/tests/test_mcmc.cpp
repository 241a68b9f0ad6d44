#include <doctest.h>

#include <cmath>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/mcmc.hpp"
#include "wigner1d/oracle.hpp"

using namespace wigner1d;

namespace {

struct Stat {
  double mean;
  double se;
};

Stat batch_stat(const std::vector<double>& x, int batches = 25) {
  const std::size_t n = x.size();
  double total = 0.0;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    const std::size_t lo = static_cast<std::size_t>(b) * n / batches;
    const std::size_t hi = static_cast<std::size_t>(b + 1) * n / batches;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    means.push_back(s / static_cast<double>(hi - lo));
    total += s;
  }
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return {mean, std::sqrt(ss / (batches - 1) / batches)};
}

}  // namespace

TEST_CASE("fresh chain sits in the chamber and is reproducible") {
  const auto p = ModelParams::centered(1.0, 1.0, 8);
  ChainConfig cfg;
  cfg.thermalize = 0;
  const Chain fresh(p, cfg);
  CHECK(fresh.chamber_weight() > 0.0);
  const auto x = fresh.positions();
  for (int j = 0; j < 8; ++j) CHECK(x[static_cast<std::size_t>(j)] == Lattice(p).site(j));

  cfg.thermalize = 100;
  cfg.seed = 21;
  Chain a(p, cfg);
  Chain b(p, cfg);
  for (int s = 0; s < 20; ++s) {
    a.sweep();
    b.sweep();
  }
  CHECK(a.positions() == b.positions());

  const auto one = ModelParams::centered(1.0, 1.0, 1);
  cfg.thermalize = 0;
  const Chain single(one, cfg);
  CHECK(single.positions()[0] > one.a());
  CHECK(single.positions()[0] < one.b());
}

TEST_CASE("tuned acceptance and the chamber invariant") {
  const auto p = ModelParams::centered(1.0, 1.0, 8);
  ChainConfig cfg;
  cfg.seed = 4;
  Chain chain(p, cfg);
  for (int s = 0; s < 300; ++s) {
    chain.sweep();
    CHECK(chain.chamber_weight() > 0.0);
    const auto x = chain.positions();
    CHECK(x.front() > p.a());
    CHECK(x.back() < p.b());
    for (std::size_t j = 1; j < x.size(); ++j) CHECK(x[j] > x[j - 1]);
  }
  for (double acc : {chain.slice_acceptance(), chain.shift_acceptance()}) {
    CHECK(acc > 0.1);
    CHECK(acc < 0.9);
  }
  const auto diag = chain.diagnostics();
  CHECK(diag.at("sweeps") == 300);
}

TEST_CASE("chamber-violating proposals never change the state") {
  const auto p = ModelParams::centered(1.0, 1.0, 3);
  ChainConfig cfg;
  cfg.seed = 6;
  Chain chain(p, cfg);
  const auto before = chain.centred_loop(1);
  auto bad = before;
  for (double& v : bad) v -= 2.0 * p.lambda();
  CHECK_FALSE(chain.try_replace(1, bad));
  CHECK(chain.centred_loop(1) == before);
  CHECK_THROWS_AS(chain.try_replace(1, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("without the chamber slices follow the loop marginal") {
  const double beta = 1.0, rho = 1.0;
  const auto p = ModelParams::centered(beta, rho, 2);
  ChainConfig cfg;
  cfg.chamber = false;
  cfg.slices = 16;
  cfg.seed = 31;
  Chain chain(p, cfg);
  std::vector<double> x, x2;
  for (int s = 0; s < 40000; ++s) {
    chain.sweep();
    const double v = chain.centred_loop(0)[static_cast<std::size_t>(s % 16)];
    x.push_back(v);
    x2.push_back(v * v);
  }
  const auto m = batch_stat(x);
  const auto v = batch_stat(x2);
  CHECK(std::abs(m.mean) < 4.0 * m.se);
  CHECK(std::abs(v.mean - variance_sigma2(beta, rho)) < 4.0 * v.se);
}

TEST_CASE("two-slice toy matches the discretized target") {
  // N = 1 in the single cell (-1/2, 1/2): target on (y0, y1) is the cyclic
  // product of Mehler kernels times the crossing-corrected wall factors
  const double beta = 1.0, rho = 1.0;
  const auto p = ModelParams::centered(beta, rho, 1);
  const double dt = beta / 2.0;
  auto wall = [&](double u, double v) {
    const double lo = (u + 0.5) * (v + 0.5);
    const double hi = (0.5 - u) * (0.5 - v);
    const double f = (1.0 - std::exp(-2.0 * lo / dt)) * (1.0 - std::exp(-2.0 * hi / dt));
    return f * f;
  };
  auto target = [&](double u, double v) {
    return std::exp(log_mehler(dt, u, v, rho) + log_mehler(dt, v, u, rho)) * wall(u, v);
  };
  const int bins = 10;
  const int fine = 40;
  const double h = 1.0 / (bins * fine);
  std::vector<double> exact(bins, 0.0);
  double total = 0.0;
  for (int i = 0; i < bins * fine; ++i) {
    const double u = -0.5 + (i + 0.5) * h;
    double s = 0.0;
    for (int k = 0; k < bins * fine; ++k) s += target(u, -0.5 + (k + 0.5) * h);
    exact[static_cast<std::size_t>(i / fine)] += s;
    total += s;
  }
  for (double& e : exact) e /= total;

  ChainConfig cfg;
  cfg.slices = 2;
  cfg.seed = 17;
  Chain chain(p, cfg);
  const int sweeps = 200000;
  std::vector<std::vector<double>> hits(bins);
  for (int s = 0; s < sweeps; ++s) {
    chain.sweep();
    const double y = chain.centred_loop(0)[0];
    const int b = std::min(bins - 1, static_cast<int>((y + 0.5) * bins));
    for (int k = 0; k < bins; ++k) hits[static_cast<std::size_t>(k)].push_back(k == b ? 1.0 : 0.0);
  }
  for (int k = 0; k < bins; ++k) {
    const auto st = batch_stat(hits[static_cast<std::size_t>(k)]);
    CHECK(std::abs(st.mean - exact[static_cast<std::size_t>(k)]) < 3.0 * st.se);
  }
}

TEST_CASE("free rejection sampler survival matches Karlin-McGregor") {
  // two free loops with uniform starts in (-1, 1), duration beta
  const auto p = ModelParams::centered(0.25, 1.0, 2);
  ChainConfig cfg;
  cfg.spring_rho = 0.0;
  cfg.slices = 64;
  cfg.seed = 8;
  double acceptance = 0.0;
  const int n = 20000;
  const auto s = rejection_sample(p, cfg, n, &acceptance);
  CHECK(s.size() == static_cast<std::size_t>(n));

  const Box box{p.a(), p.b()};
  const int g = 200;
  const double h = (p.b() - p.a()) / g;
  double integral = 0.0;
  for (int i = 0; i < g; ++i)
    for (int k = i + 1; k < g; ++k) {
      const std::vector<double> x{p.a() + (i + 0.5) * h, p.a() + (k + 0.5) * h};
      integral += karlin_mcgregor_noncollision(x, x, p.beta(), box) * h * h;
    }
  const double exact = 2.0 * integral / ((p.b() - p.a()) * (p.b() - p.a()));
  const double attempts = n / acceptance;
  const double se = std::sqrt(exact * (1.0 - exact) / attempts);
  CHECK(std::abs(acceptance - exact) < 3.0 * se);
}

TEST_CASE("chain agrees with exact rejection draws at N = 2") {
  // dilute enough that a fair share of independent loops fit their cells
  const auto p = ModelParams::centered(4.0, 0.25, 2);
  ChainConfig cfg;
  cfg.slices = 32;
  cfg.seed = 9;
  const auto exact = rejection_sample(p, cfg, 10000);
  const auto chain = sample_chains(p, cfg, 1, 5000, 4);
  for (int j = 0; j < 2; ++j) {
    std::vector<double> a, b;
    for (std::size_t k = 0; k < exact.size(); ++k) a.push_back(exact.configuration(k)[static_cast<std::size_t>(j)]);
    for (std::size_t k = 0; k < chain.size(); ++k) b.push_back(chain.configuration(k)[static_cast<std::size_t>(j)]);
    const auto sa = batch_stat(a);
    const auto sb = batch_stat(b);
    CHECK(std::abs(sa.mean - sb.mean) < 4.0 * std::hypot(sa.se, sb.se));
  }
  CHECK_THROWS_AS(rejection_sample(ModelParams::centered(1.0, 1.0, 4), cfg, 1), std::domain_error);
}

TEST_CASE("sample streams are deterministic and sorted") {
  const auto p = ModelParams::centered(1.0, 1.0, 6);
  ChainConfig cfg;
  cfg.seed = 5;
  cfg.thermalize = 100;
  const auto a = sample_chains(p, cfg, 2, 50, 3);
  const auto b = sample_chains(p, cfg, 2, 50, 3);
  CHECK(a.positions == b.positions);
  CHECK(a.size() == 100);
  CHECK(a.chain_seeds.size() == 2);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto x = a.configuration(k);
    CHECK(x.front() > p.a());
    CHECK(x.back() < p.b());
    for (std::size_t j = 1; j < x.size(); ++j) CHECK(x[j] > x[j - 1]);
  }
}

TEST_CASE("displacements are antisymmetric about the box centre") {
  // walls bias single displacements at finite N; mirror pairs cancel exactly
  const auto p = ModelParams::centered(1.0, 1.0, 8);
  ChainConfig cfg;
  cfg.slices = 32;
  cfg.seed = 77;
  const auto s = sample_chains(p, cfg, 1, 2000);
  CHECK(s.thinning >= 1);
  const Lattice lattice(p);
  for (int j = 0; j < 4; ++j) {
    std::vector<double> y;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto x = s.configuration(k);
      y.push_back(x[static_cast<std::size_t>(j)] - lattice.site(j) +
                  x[static_cast<std::size_t>(7 - j)] - lattice.site(7 - j));
    }
    const auto st = batch_stat(y);
    CHECK(std::abs(st.mean) < 4.0 * st.se);
  }
}

TEST_CASE("integrated autocorrelation time") {
  Rng rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> iid(20000), ar(20000);
  double prev = 0.0;
  for (std::size_t i = 0; i < iid.size(); ++i) {
    iid[i] = normal(rng);
    prev = 0.9 * prev + normal(rng);
    ar[i] = prev;
  }
  CHECK(integrated_autocorrelation_time(iid) == doctest::Approx(0.5).epsilon(0.2));
  // AR(1): tau = (1 + phi) / (2 (1 - phi)) = 9.5
  CHECK(integrated_autocorrelation_time(ar) == doctest::Approx(9.5).epsilon(0.25));
}
