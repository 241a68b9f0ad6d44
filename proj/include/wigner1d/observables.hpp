#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "wigner1d/mcmc.hpp"
#include "wigner1d/model.hpp"
#include "wigner1d/transfer.hpp"

namespace wigner1d {

/// Density p of gamma(0) under Psi0~ Psi0 nu on a symmetric histogram.
struct MarginalDensity {
  double lambda = 0.0;
  int bins_per_period = 0;        // even, so reflected and shifted grids align
  double lower = 0.0;             // left edge, a half-integer multiple of lambda
  double width = 0.0;             // bin width lambda / bins_per_period
  std::vector<double> values;     // symmetrized p on each bin
  std::vector<double> errors;
  double mass = 0.0;              // sum of weights, 1 by normalization of Psi0
  double mean = 0.0;
  double mean_error = 0.0;
  double asymmetry = 0.0;         // max |p(x) - p(-x)| / combined error
  double effective_size = 0.0;
  /// Per-node samples used for the errors of derived profiles: gamma_i(0)
  /// and S q_i Psi0_i Psi0~_i, in reflection pairs.
  std::vector<double> sample_x;
  std::vector<double> sample_w;

  double centre(std::size_t k) const { return lower + (static_cast<double>(k) + 0.5) * width; }
  /// p at x (value of the bin containing x, 0 outside the grid).
  double at(double x) const;
};

/// Histogram of gamma(0) over the ensemble with weights q Psi0 Psi0~. The
/// grid covers every node. Throws when the effective sample size of the
/// weights is below 100.
MarginalDensity limit_marginal_density(const TransferSpectrum& spectrum,
                                       const NystromOperator& op,
                                       const PathEnsemble& ensemble,
                                       int bins_per_period = 40);

/// One-particle density over one period [0, lambda).
struct DensityProfile {
  double period = 0.0;
  std::vector<double> grid;  // bin centres
  std::vector<double> values;
  std::vector<double> errors;
  double mass = 0.0;         // integral over one period
  double mass_error = 0.0;
  double amplitude = 0.0;    // (max - min) / mean
  double amplitude_error = 0.0;
};

/// rho1(x; x) = sum_{|j| <= n_images} p(x - (j - 1/2) lambda) on [0, lambda).
/// Throws when mass beyond the images exceeds 1e-8.
DensityProfile one_particle_density(const MarginalDensity& p, int n_images);

/// Finite-N density folded onto one period from bulk cells of a sample
/// stream. Positions are measured from the box edge a; cells
/// [margin, N - margin) are kept.
DensityProfile sampled_density(const SampleStream& samples, const ModelParams& p,
                               int margin_cells, int bins_per_period, int batches = 20);

struct OneParticleMatrix {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  double error = 0.0;
  int w_max = 0;
  /// Signed contribution of each winding number 1..w_max.
  std::vector<double> by_winding;
  std::vector<double> by_winding_error;
  /// Geometric estimate of the windings beyond w_max.
  double truncation_bound = 0.0;
  bool flagged = false;  // bound exceeds the requested tolerance
};

struct RdmOptions {
  int w_max = 3;
  int samples = 2000;   // chain draws per (site, winding)
  double tolerance = 1e-3;
  std::uint64_t seed = 1;
};

/// Off-diagonal one-particle matrix in the infinite-volume limit by the
/// truncated winding expansion. Every open chain of w windings is drawn
/// exactly from the harmonic path weight with recentring shifts of -lambda
/// at the junctions, and weighted by Psi0~ at its first segment, K / z0
/// between segments and Psi0 at its last segment (Nystrom extensions).
/// Symmetric in (x, y) by construction.
OneParticleMatrix one_particle_matrix(double x, double y, const TransferSpectrum& spectrum,
                                      const NystromOperator& op, const PathEnsemble& ensemble,
                                      const RdmOptions& options = {});

/// Magnitude of the Gaussian chain mass c^{-w} int prod k_beta for a chain
/// from u (start, centred on its site) to v (end, centred on its site).
double chain_log_mass(double u, double v, int windings, double beta, double rho);

struct CorrelationReport {
  std::vector<int> separation;       // in cells of width lambda
  std::vector<double> value;         // truncated two-point function per cell pair
  std::vector<double> error;
  double rate = 0.0;                 // fitted decay per unit length
  double rate_error = 0.0;
  int fit_points = 0;
  double reference_rate = 0.0;       // gap * rho when supplied
  bool fitted = false;
};

/// Cell-integrated truncated two-point function: for separation k >= 1 the
/// covariance of the counts of cells k apart, for k = 0 E[n(n-1)] - E[n]^2.
/// Cells are aligned with the lattice and the outer `margin_cells` on each
/// side are dropped. Jackknife errors over batches. The decay rate comes
/// from a weighted least-squares fit of A exp(-rate x) on separations >=
/// `fit_from`; the default skips neighbouring cells, which feel the ordering
/// constraint directly rather than through the transfer operator.
CorrelationReport truncated_two_point(const SampleStream& samples, const ModelParams& p,
                                      int margin_cells, int max_separation, int batches = 20,
                                      int fit_from = 2);

struct ErgodicReport {
  std::vector<double> running_mean;  // (1/n') sum_{j<=n'} Y_{k+j}, averaged over samples
  std::vector<double> band;          // CLT standard error of each running mean
  double mean = 0.0;                 // full bulk mean
  double error = 0.0;
  bool flagged = false;              // |mean| > 4 SE
  std::size_t first = 0;             // first bulk index k + 1 (0-based)
};

/// Running means of Y_j = x_j - m_j over bulk indices of every configuration.
ErgodicReport ergodic_average_y(const SampleStream& samples, const ModelParams& p,
                                int margin_cells, int n = 0, int batches = 20);

/// Shift estimate in [0, lambda): circular mean of Y_j mod lambda over bulk
/// particles of every configuration.
struct ShiftReport {
  double shift = 0.0;
  double error = 0.0;
  double resultant = 0.0;  // mean resultant length, 1 for a perfect crystal
};
ShiftReport detect_shift(const SampleStream& samples, const ModelParams& p, int margin_cells,
                         int batches = 20);

/// Copy of `samples` with every position moved by u.
SampleStream shifted(const SampleStream& samples, double u);

struct CountTailReport {
  std::vector<int> n;
  std::vector<double> tail;        // P(|N_I - rho |I|| >= n)
  std::vector<double> tail_error;
  std::vector<long> histogram;     // counts of N_I = 0, 1, 2, ...
  int mode = 0;
  double slope = 0.0;              // log P ~ intercept + slope n^2
  double intercept = 0.0;
  double r_squared = 0.0;
  long observations = 0;
};

/// Particle-number statistics of intervals [start + k lambda, start + k lambda
/// + length) translated across the bulk.
CountTailReport particle_count_tails(const SampleStream& samples, const ModelParams& p,
                                     double start, double length, int margin_cells,
                                     int n_max = 3);

/// Bulk margin in cells, ceil(5 / gap).
int bulk_margin(double gap);

nlohmann::json to_json(const DensityProfile& d);
nlohmann::json to_json(const OneParticleMatrix& m);
nlohmann::json to_json(const CorrelationReport& c);
nlohmann::json to_json(const CountTailReport& c);

}  // namespace wigner1d
