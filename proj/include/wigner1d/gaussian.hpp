#pragma once

#include <cstdint>
#include <random>

#include "wigner1d/path.hpp"

namespace wigner1d {

using Rng = std::mt19937_64;

/// Seed of the `stream`-th independent generator derived from `base`.
/// The policy is base + stream and is part of the reproducibility contract.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return base + stream;
}

/// Helpers for the harmonic weight exp(-rho int gamma^2) with frequency
/// omega = sqrt(2 rho). rho = 0 degenerates to free Brownian motion.
class Spring {
 public:
  explicit Spring(double rho);

  double rho() const { return rho_; }
  double omega() const { return omega_; }
  /// omega * coth(omega t), tending to 1/t as omega -> 0.
  double coth_w(double t) const;
  /// omega / sinh(omega t), tending to 1/t as omega -> 0.
  double csch_w(double t) const;
  /// log of the kernel prefactor sqrt(omega / (2 pi sinh(omega t))).
  double log_prefactor(double t) const;

 private:
  double rho_;
  double omega_;
};

/// Mehler kernel k_t(x, y) of exp(-t A), A = -1/2 d^2/dx^2 + rho x^2.
double mehler(double t, double x, double y, double rho);
double log_mehler(double t, double x, double y, double rho);

/// Trace of exp(-beta A): 1 / (2 sinh(beta sqrt(rho/2))).
double normalization_c(double beta, double rho);
/// Same constant written as exp(-beta sqrt(rho/2)) / (1 - exp(-beta sqrt(2 rho))).
double normalization_c_exp_form(double beta, double rho);
/// log c(beta, rho), finite for any beta * rho.
double log_normalization_c(double beta, double rho);

/// Variance of gamma(0) under the loop measure nu.
double variance_sigma2(double beta, double rho);

/// Log density of the slice vector of a closed loop under nu: the cyclic
/// product of Mehler kernels divided by c(beta, rho).
double log_loop_density(const DiscretePath& loop, double rho);

struct WeightedPath {
  DiscretePath path;
  /// Mass factor relating the sampling law to the Mehler path measure.
  double weight = 1.0;
};

/// Discretization of the weighted bridge measure on [0, beta] with M slices.
class BridgeLaw {
 public:
  BridgeLaw(double beta, double rho, int slices, bool closed);

  double beta() const { return beta_; }
  double rho() const { return spring_.rho(); }
  int slices() const { return slices_; }
  double dt() const { return beta_ / slices_; }
  bool closed() const { return closed_; }

  /// Exact draw of a closed loop from nu: gamma(0) from its stationary
  /// Gaussian, then the harmonic bridge back to itself.
  DiscretePath sample_closed_loop(Rng& rng) const;

  /// Ornstein-Uhlenbeck path dX = -omega X dt + dB from x_start over
  /// `duration`. The weight is exp(-omega T / 2 + omega (x_T^2 - x_0^2) / 2),
  /// the Radon-Nikodym factor between the Mehler path measure and the OU law.
  WeightedPath sample_open_segment(double x_start, double duration,
                                   Rng& rng) const;

 private:
  double beta_;
  Spring spring_;
  int slices_;
  bool closed_;
};

/// Exact harmonic bridge (Brownian bridge when rho = 0) from u to v over
/// `duration` with `intervals` steps; returns the open path of intervals + 1
/// points.
DiscretePath sample_bridge(double u, double v, double duration, int intervals,
                           double rho, Rng& rng);

/// Fills the interior of `slices[first..first+count]` (indices modulo the
/// size) with an exact bridge between the fixed neighbours. Used for segment
/// regrowth in the Monte Carlo sampler.
void resample_segment(std::vector<double>& slices, std::size_t first,
                      std::size_t count, double dt, double centre,
                      const Spring& spring, Rng& rng);

}  // namespace wigner1d
