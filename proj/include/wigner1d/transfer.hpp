#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wigner1d/kernels.hpp"
#include "wigner1d/path.hpp"
#include "wigner1d/pathspace.hpp"

namespace wigner1d {

struct EnsembleConfig {
  int paths = 4000;  // S, rounded up to an even number
  int slices = 64;   // M
  std::uint64_t seed = 1;
  /// Spring constant of the sampling law. 0 (or rho) samples nu itself with
  /// uniform weights; a stiffer spring concentrates the nodes and attaches
  /// exact importance weights d nu / d q.
  double proposal_rho = 0.0;
};

/// Closed loops used as Nystrom nodes. Loops come in reflection pairs
/// (2k, 2k + 1) with loop 2k + 1 = -loop 2k.
class PathEnsemble {
 public:
  static PathEnsemble sample(double beta, double rho, const EnsembleConfig& config);

  std::size_t size() const { return weights_.size(); }
  std::size_t slices() const { return slices_; }
  double beta() const { return beta_; }
  double rho() const { return rho_; }
  double proposal_rho() const { return proposal_rho_; }
  double dt() const { return beta_ / static_cast<double>(slices_); }
  std::uint64_t seed() const { return seed_; }
  bool uniform() const { return proposal_rho_ == rho_; }

  std::span<const double> data() const { return data_; }
  std::span<const double> loop(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * slices_, slices_);
  }
  DiscretePath path(std::size_t i) const;
  /// Importance weight d nu / d q at node i (1 for uniform ensembles).
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  static std::size_t partner(std::size_t i) { return i ^ 1U; }

  /// Kish effective sample size of the importance weights.
  double effective_size() const;

 private:
  double beta_ = 0.0;
  double rho_ = 0.0;
  double proposal_rho_ = 0.0;
  std::size_t slices_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> data_;
  std::vector<double> weights_;
};

/// Stiffer sampling spring for ensembles that must resolve paths confined to
/// a cell of width lambda: the proposal standard deviation is capped at
/// lambda / 4.
double suggested_proposal_rho(double beta, double rho);

/// Largest proposal spring up to suggested_proposal_rho whose importance
/// weights keep a finite variance with margin: every Fourier mode of the
/// cyclic precision is stiffened by at most `max_ratio` (< 2). Estimators
/// that average the weights themselves, such as densities, need this bound.
double bounded_proposal_rho(double beta, double rho, int slices, double max_ratio = 1.5);

/// Nystrom discretization of (K f)(gamma) = int K(gamma, eta) f(eta) nu(d eta)
/// on the ensemble: (K f)_i = sum_j K(gamma_i, gamma_j) q_j f_j with
/// quadrature weights q_j = w_j / S.
class NystromOperator {
 public:
  NystromOperator(const PathEnsemble& ensemble, double lambda, CrossingMode mode,
                  kernels::Backend backend = kernels::Backend::openmp);

  std::size_t size() const { return n_; }
  double lambda() const { return lambda_; }
  CrossingMode mode() const { return mode_; }
  double beta() const { return beta_; }
  double rho() const { return rho_; }

  float kernel(std::size_t i, std::size_t j) const { return (*matrix_)[i * n_ + j]; }
  std::span<const float> kernel_matrix() const { return *matrix_; }
  std::span<const double> quadrature() const { return quadrature_; }

  void apply(std::span<const double> f, std::span<double> out) const;
  /// Adjoint through the reflection identity K(eta, gamma) = K(-gamma, -eta).
  void apply_adjoint(std::span<const double> f, std::span<double> out) const;
  double inner(std::span<const double> f, std::span<const double> g) const;

  /// Same kernel matrix, different quadrature weights (leave-block-out
  /// resampling). Nodes with weight zero drop out of every integral.
  NystromOperator with_quadrature(std::vector<double> quadrature) const;

  void set_backend(kernels::Backend backend) { backend_ = backend; }

 private:
  NystromOperator() = default;

  std::size_t n_ = 0;
  double lambda_ = 0.0;
  double beta_ = 0.0;
  double rho_ = 0.0;
  CrossingMode mode_ = CrossingMode::strict;
  kernels::Backend backend_ = kernels::Backend::openmp;
  std::shared_ptr<const std::vector<float>> matrix_;
  std::vector<double> quadrature_;
};

/// Thrown when power iteration exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::vector<double> last_iterate, double residual, int iterations);
  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
  int iterations_;
};

struct TransferSpectrum {
  double z0 = 0.0;
  double z1_abs = 0.0;
  bool z1_converged = false;
  double gap = 0.0;  // log(z0 / z1_abs), +inf for a rank-one operator
  std::vector<double> psi0;
  std::vector<double> psi0_tilde;
  double residual = 0.0;
  int iterations = 0;
  /// <psi0~, psi0> of the raw Perron vector before rescaling to 1.
  double normalization = 0.0;
  double z0_error = 0.0;  // jackknife, filled by jackknife_z0
  double beta = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double z1_tol = 1e-4;
  int z1_max_iter = 3000;
};

/// Power iteration for (z0, Psi0) started from the constant vector, then a
/// deflated power iteration on K - z0 |Psi0><Psi0~| for |z1|.
TransferSpectrum principal_eigenpair(const NystromOperator& op,
                                     const EigenOptions& options = {});

/// z0 and |z1| from a dense nonsymmetric eigensolve (validation, S <= 2000).
std::pair<double, double> dense_leading_eigenvalues(const NystromOperator& op);

/// Leave-one-block-out jackknife over reflection pairs; returns the standard
/// error of z0 and stores it in `spectrum`.
double jackknife_z0(const NystromOperator& op, TransferSpectrum& spectrum,
                    int blocks = 10, const EigenOptions& options = {});

/// Quadrature weights with block `block` of `blocks` (contiguous reflection
/// pairs) removed and the rest rescaled.
std::vector<double> leave_block_out(std::span<const double> quadrature, int block,
                                    int blocks);

std::vector<double> boundary_vector_f(const PathEnsemble& ensemble, CrossingMode mode);
std::vector<double> boundary_vector_g(const PathEnsemble& ensemble, CrossingMode mode);

struct AmplitudeEstimate {
  int n_particles = 0;
  double log_value = 0.0;  // log <F, K^{N-1} G>
  double value = 0.0;
  double log_error = 0.0;  // jackknife standard error of log_value
  double log_rank_one = 0.0;  // log z0^{N-1} <F, Psi0> <Psi0~, G>
};

/// <F, K^{N-1} G> for N = 1..n_max by repeated application to G. When
/// `spectrum` is given the rank-one asymptotic is filled in; `jackknife_blocks`
/// > 1 adds leave-block-out errors.
std::vector<AmplitudeEstimate> amplitude_series(const NystromOperator& op,
                                                std::span<const double> f,
                                                std::span<const double> g, int n_max,
                                                const TransferSpectrum* spectrum = nullptr,
                                                int jackknife_blocks = 0);

AmplitudeEstimate amplitude_fkg(const NystromOperator& op, std::span<const double> f,
                                std::span<const double> g, int n_particles,
                                const TransferSpectrum* spectrum = nullptr,
                                int jackknife_blocks = 0);

nlohmann::json to_json(const TransferSpectrum& spectrum);

/// Psi0 at an arbitrary path through the Nystrom extension
/// Psi0(gamma) = z0^{-1} sum_j K(gamma, eta_j) q_j Psi0(eta_j).
double extend_psi0(const NystromOperator& op, const PathEnsemble& ensemble,
                   const TransferSpectrum& spectrum, const DiscretePath& gamma);
/// Psi0(-gamma) through the adjoint extension.
double extend_psi0_tilde(const NystromOperator& op, const PathEnsemble& ensemble,
                         const TransferSpectrum& spectrum, const DiscretePath& gamma);

}  // namespace wigner1d
