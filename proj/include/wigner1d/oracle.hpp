#pragma once

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigner1d/model.hpp"

namespace wigner1d {

/// Thrown when the two grid resolutions disagree by more than the allowed
/// fraction; carries both estimates.
class OracleResolutionError : public std::runtime_error {
 public:
  OracleResolutionError(double coarse, double fine);
  double coarse() const { return coarse_; }
  double fine() const { return fine_; }

 private:
  double coarse_;
  double fine_;
};

struct OracleResult {
  int n_particles = 0;
  double log_z = 0.0;        // Richardson-extrapolated
  double log_z_error = 0.0;  // |extrapolated - fine|
  double log_z_coarse = 0.0;
  double log_z_fine = 0.0;
  int grid_points = 0;       // coarse interior points per dimension
  std::vector<double> grid;  // coarse grid positions
  std::vector<double> rho1;  // one-particle density on the grid, integrates to N
  /// Pair density rho_2(x1, x2; x1, x2) on grid x grid (row-major, N = 2 only),
  /// integrating to N (N - 1) = 2 over the square.
  std::vector<double> rho2;
};

/// Exact diagonalization of H_N for N in {1, 2} with Dirichlet walls (and the
/// collision diagonal for N = 2), second-order finite differences and a dense
/// symmetric eigensolve. grid_points >= 40.
OracleResult diagonalize_small(const ModelParams& p, int grid_points);

/// Single particle in [a, b] with an arbitrary potential.
OracleResult diagonalize_one_body(double a, double b,
                                  const std::function<double(double)>& potential,
                                  double beta, int grid_points);

struct Box {
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  bool bounded() const { return std::isfinite(a) && std::isfinite(b); }
};

/// Heat kernel of Brownian motion (generator Delta / 2) killed at the walls of
/// `box`, by the method of images.
double box_heat_kernel(double t, double x, double y, const Box& box);

/// det[P_t(x_i, y_j)] with the killed heat kernel.
double karlin_mcgregor(std::span<const double> starts, std::span<const double> ends,
                       double t, const Box& box);

/// Probability that independent Brownian bridges x_i -> y_i over [0, t] never
/// collide and stay inside `box`.
double karlin_mcgregor_noncollision(std::span<const double> starts,
                                    std::span<const double> ends, double t,
                                    const Box& box);

}  // namespace wigner1d
