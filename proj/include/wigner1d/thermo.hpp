#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "wigner1d/model.hpp"
#include "wigner1d/transfer.hpp"

namespace wigner1d {

/// Bulk free energy per particle, split into its three contributions.
struct FreeEnergyReport {
  double beta = 0.0;
  double rho = 0.0;
  double f = 0.0;
  double ground = 0.0;      // 1 / (12 rho)
  double oscillator = 0.0;  // sqrt(rho/2) + log(1 - exp(-beta sqrt(2 rho))) / beta
  double spectral = 0.0;    // -log(z0) / beta
  double uncertainty = 0.0;
  double z0 = 0.0;
  double z0_error = 0.0;
};

FreeEnergyReport free_energy(double beta, double rho, const TransferSpectrum& spectrum);
/// Same report for an explicitly given principal eigenvalue.
FreeEnergyReport free_energy(double beta, double rho, double z0, double z0_error = 0.0);

/// log Z_N = N log c - beta N / (12 rho) + log amplitude, with the amplitude
/// given in log form. A non-finite log amplitude (zero estimate) throws.
double partition_function_log(const ModelParams& p, double log_amplitude);

struct SurfaceReport {
  std::vector<int> n;
  std::vector<double> log_z;
  /// c_N = -(log Z_N + beta N f); tends to beta * s.
  std::vector<double> correction;
  std::vector<double> correction_error;
  double rate = 0.0;        // fitted decay rate of |c_{N+1} - c_N|, +inf if exact
  double rate_error = 0.0;  // least-squares standard error of the rate
  int fit_points = 0;
  double s = 0.0;           // extrapolated surface free energy
  double s_error = 0.0;     // jackknife error when available
  bool flagged = false;     // non-monotone tail beyond the error bars
};

nlohmann::json to_json(const FreeEnergyReport& r);
nlohmann::json to_json(const SurfaceReport& r);

/// Post-processing of a log Z_N series at fixed (beta, rho): corrections, a
/// least-squares fit of log |c_{N+1} - c_N| against N, and the geometric tail
/// extrapolation of c_N. Needs at least four points with consecutive N.
/// `errors`, if non-empty, holds one-sigma errors of the corrections.
SurfaceReport surface_correction(std::span<const int> n, std::span<const double> log_z,
                                 double beta, double beta_f,
                                 std::span<const double> errors = {});

/// Corrections c_N for N = n_min..n_max straight from the Nystrom operator,
/// with leave-block-out jackknife errors on every c_N and on s. Block
/// replicates recompute z0, so the strong correlation between z0 and the
/// amplitudes cancels.
SurfaceReport surface_from_transfer(const NystromOperator& op, const PathEnsemble& ensemble,
                                    int n_min, int n_max, int jackknife_blocks = 10,
                                    const EigenOptions& options = {});

}  // namespace wigner1d
