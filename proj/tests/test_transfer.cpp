#include <doctest.h>

#include <cmath>
#include <numeric>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/transfer.hpp"

using namespace wigner1d;

namespace {

PathEnsemble small_ensemble(double beta, double rho, int paths, std::uint64_t seed = 3,
                            double proposal = 0.0) {
  EnsembleConfig cfg;
  cfg.paths = paths;
  cfg.slices = 32;
  cfg.seed = seed;
  cfg.proposal_rho = proposal;
  return PathEnsemble::sample(beta, rho, cfg);
}

}  // namespace

TEST_CASE("ensemble comes in reflection pairs and is reproducible") {
  const auto e = small_ensemble(1.0, 1.0, 101);
  CHECK(e.size() == 102);
  for (std::size_t i = 0; i < e.size(); i += 2)
    for (std::size_t m = 0; m < e.slices(); ++m) CHECK(e.loop(i)[m] == -e.loop(i + 1)[m]);
  CHECK(e.uniform());
  CHECK(e.effective_size() == doctest::Approx(102.0));
  const auto again = small_ensemble(1.0, 1.0, 101);
  CHECK(std::equal(e.data().begin(), e.data().end(), again.data().begin()));

  const auto tilted = small_ensemble(1.0, 1.0, 400, 3, 8.0);
  CHECK_FALSE(tilted.uniform());
  CHECK(tilted.effective_size() < 400.0);
  for (std::size_t i = 0; i < tilted.size(); i += 2)
    CHECK(tilted.weight(i) == tilted.weight(i + 1));
  // importance weights integrate to one
  const double total = std::accumulate(tilted.weights().begin(), tilted.weights().end(), 0.0);
  CHECK(total / 400.0 == doctest::Approx(1.0).epsilon(0.2));
  CHECK_THROWS_AS(small_ensemble(1.0, 1.0, 1), std::domain_error);
}

TEST_CASE("suggested proposal caps the loop spread") {
  const double r = suggested_proposal_rho(4.0, 1.0);
  CHECK(r > 1.0);
  CHECK(std::sqrt(variance_sigma2(4.0, r)) == doctest::Approx(0.25).epsilon(1e-6));
  // dilute gas: the loop already fits in a quarter cell
  CHECK(suggested_proposal_rho(1.0, 0.01) == 0.01);
  const double bounded = bounded_proposal_rho(4.0, 1.0, 64);
  CHECK(bounded > 1.0);
  CHECK(bounded < r);
  // the mean mode dominates: its stiffening is close to the spring ratio
  CHECK(bounded == doctest::Approx(1.5).epsilon(0.05));
  CHECK_THROWS_AS(bounded_proposal_rho(4.0, 1.0, 64, 2.5), std::domain_error);
}

TEST_CASE("unconstrained limit gives z0 = 1 and a constant eigenvector") {
  const auto e = small_ensemble(1.0, 1.0, 200);
  const NystromOperator op(e, 1e3, CrossingMode::crossing_corrected);
  const auto sp = principal_eigenpair(op);
  CHECK(sp.z0 == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : sp.psi0) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sp.gap > 15.0);
  const auto f = boundary_vector_f(e, CrossingMode::strict);
  CHECK(f.size() == e.size());
}

TEST_CASE("adjoint by reflection") {
  const auto e = small_ensemble(1.0, 1.0, 300, 5, 3.0);
  const NystromOperator op(e, 1.0, CrossingMode::crossing_corrected);
  Rng rng(8);
  std::normal_distribution<double> normal;
  std::vector<double> f(op.size()), g(op.size()), kf(op.size()), kg(op.size());
  for (auto& v : f) v = normal(rng);
  for (auto& v : g) v = normal(rng);
  op.apply(f, kf);
  op.apply_adjoint(g, kg);
  CHECK(op.inner(kf, g) == doctest::Approx(op.inner(f, kg)).epsilon(1e-12));
}

TEST_CASE("power iteration agrees with the dense eigensolve") {
  const auto e = small_ensemble(1.0, 1.0, 600, 9, 3.0);
  const NystromOperator op(e, 1.0, CrossingMode::crossing_corrected);
  const auto sp = principal_eigenpair(op);
  const auto [z0, z1] = dense_leading_eigenvalues(op);
  CHECK(sp.z0 == doctest::Approx(z0).epsilon(1e-8));
  CHECK(sp.z1_abs == doctest::Approx(z1).epsilon(1e-2));
  CHECK(sp.gap > 0.0);
  CHECK(sp.residual < 1e-8);
  for (std::size_t i = 0; i < sp.psi0.size(); ++i) {
    CHECK(sp.psi0[i] > 0.0);
    CHECK(sp.psi0_tilde[i] == sp.psi0[PathEnsemble::partner(i)]);
  }
  CHECK(op.inner(sp.psi0, sp.psi0_tilde) == doctest::Approx(1.0).epsilon(1e-12));

  // Nystrom extension reproduces the eigenvector on the nodes
  for (std::size_t i : {0UL, 17UL, 300UL})
    CHECK(extend_psi0(op, e, sp, e.path(i)) == doctest::Approx(sp.psi0[i]).epsilon(1e-5));
  CHECK(extend_psi0_tilde(op, e, sp, e.path(4)) ==
        doctest::Approx(sp.psi0_tilde[4]).epsilon(1e-5));

  auto copy = sp;
  const double err = jackknife_z0(op, copy, 10);
  CHECK(err > 0.0);
  CHECK(err < 0.2 * sp.z0);
}

TEST_CASE("power iteration budget exhaustion") {
  const auto e = small_ensemble(1.0, 1.0, 100, 2, 3.0);
  const NystromOperator op(e, 1.0, CrossingMode::strict);
  EigenOptions opt;
  opt.max_iter = 1;
  CHECK_THROWS_AS(principal_eigenpair(op, opt), ConvergenceError);
}

TEST_CASE("serial and threaded operators agree") {
  const auto e = small_ensemble(1.0, 2.0, 200, 4, 6.0);
  const NystromOperator a(e, 0.5, CrossingMode::crossing_corrected, kernels::Backend::serial);
  const NystromOperator b(e, 0.5, CrossingMode::crossing_corrected, kernels::Backend::openmp);
  CHECK(std::equal(a.kernel_matrix().begin(), a.kernel_matrix().end(),
                   b.kernel_matrix().begin()));
  CHECK(principal_eigenpair(a).z0 == principal_eigenpair(b).z0);
}

TEST_CASE("amplitudes approach the rank-one asymptotic") {
  const auto e = small_ensemble(1.0, 1.0, 800, 6, suggested_proposal_rho(1.0, 1.0));
  const auto mode = CrossingMode::crossing_corrected;
  const NystromOperator op(e, 1.0, mode);
  const auto sp = principal_eigenpair(op);
  const auto f = boundary_vector_f(e, mode);
  const auto g = boundary_vector_g(e, mode);
  const auto amps = amplitude_series(op, f, g, 14, &sp, 5);
  REQUIRE(amps.size() == 14);
  CHECK(amps[0].value == doctest::Approx(op.inner(f, g)).epsilon(1e-12));
  // F and G are reflections of each other
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == g[PathEnsemble::partner(i)]);
  double prev = std::abs(amps[0].log_value - amps[0].log_rank_one);
  const double last = std::abs(amps[13].log_value - amps[13].log_rank_one);
  CHECK(last < prev);
  CHECK(last < 1e-3);
  for (const auto& a : amps) CHECK(a.log_error > 0.0);
  const auto single = amplitude_fkg(op, f, g, 5);
  CHECK(single.log_value == doctest::Approx(amps[4].log_value).epsilon(1e-12));
  CHECK_THROWS(amplitude_fkg(op, f, g, 0));
}

TEST_CASE("leave-block-out weights") {
  const std::vector<double> q(20, 0.05);
  const auto w = leave_block_out(q, 1, 5);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
  CHECK(w[4] == 0.0);
  CHECK(w[7] == 0.0);
  CHECK(w[8] > 0.0);
  CHECK(w[2 * 4 + 1] == w[2 * 4]);
}
