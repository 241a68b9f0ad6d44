#pragma once

#include <cmath>
#include <span>
#include <string>

#include "wigner1d/model.hpp"
#include "wigner1d/path.hpp"

namespace wigner1d {

/// How the continuous-time non-collision constraint is evaluated on a grid.
///
/// `strict` checks the inequality at the slices only. `crossing_corrected`
/// multiplies, per interval, the probability that a Brownian bridge between the
/// observed gaps does not touch zero: 1 - exp(-2 d_i d_{i+1} / (D dt)) with
/// D = 2 for two moving paths and D = 1 against a fixed wall. This ignores the
/// harmonic drift between slices and is an approximation knob, not the
/// reference.
enum class CrossingMode { strict, crossing_corrected };

const char* to_string(CrossingMode mode);
CrossingMode crossing_mode_from_string(const std::string& name);

namespace detail {

// Largest argument for which 1 - exp(-x) still differs from 1 in double.
inline constexpr double kNoCrossingCutoff = 38.0;

/// 1 - exp(-x); expm1 only where the subtraction would cancel.
inline double no_crossing_factor(double x) {
  return x < 0.5 ? -std::expm1(-x) : 1.0 - std::exp(-x);
}

/// Weight that lo(t) < up(t) + gap on grid indices [0, intervals]; `inv_scale`
/// is 2 / (D dt). Ties count as a collision.
template <class Lower, class Upper>
inline double gap_weight(Lower lo, Upper up, std::size_t intervals, double gap,
                         bool corrected, double inv_scale) {
  for (std::size_t i = 0; i <= intervals; ++i)
    if (!((up(i) - lo(i)) + gap > 0.0)) return 0.0;
  if (!corrected) return 1.0;
  double weight = 1.0;
  double d_prev = (up(0) - lo(0)) + gap;
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double d = (up(i) - lo(i)) + gap;
    const double x = d_prev * d * inv_scale;
    if (x < kNoCrossingCutoff) weight *= no_crossing_factor(x);
    d_prev = d;
  }
  return weight;
}

/// Specialisation for two closed loops of m slices stored contiguously.
inline double closed_gap_weight(const double* lower, const double* upper,
                                std::size_t m, double gap, bool corrected,
                                double inv_scale) {
  double worst = 1e300;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = (upper[i] - lower[i]) + gap;
    worst = d < worst ? d : worst;
  }
  if (!(worst > 0.0)) return 0.0;
  if (!corrected) return 1.0;
  // every interval factor is exactly 1 once the closest approach is past the cutoff
  if (worst * worst * inv_scale >= kNoCrossingCutoff) return 1.0;
  double weight = 1.0;
  double d_prev = (upper[0] - lower[0]) + gap;
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t k = i == m ? 0 : i;
    const double d = (upper[k] - lower[k]) + gap;
    const double x = d_prev * d * inv_scale;
    if (x < kNoCrossingCutoff) weight *= no_crossing_factor(x);
    d_prev = d;
  }
  return weight;
}

}  // namespace detail

/// Transfer kernel K(gamma, eta): gamma(t) < eta(t) + lambda for all t.
/// Paths must share dt and the number of intervals; open and closed paths can
/// be mixed (a closed path repeats slice 0 at the right end).
double kernel_k(const DiscretePath& gamma, const DiscretePath& eta, double lambda,
                CrossingMode mode);

/// F(gamma) = K(-1/(2 rho), gamma): gamma stays above -1/(2 rho).
double boundary_f(const DiscretePath& gamma, double rho, CrossingMode mode);
/// G(gamma) = K(gamma, 1/(2 rho)): gamma stays below 1/(2 rho).
double boundary_g(const DiscretePath& gamma, double rho, CrossingMode mode);

struct ChamberSpec {
  double a = 0.0;
  double b = 1.0;
  double lambda = 1.0;
  int n = 1;

  static ChamberSpec from(const ModelParams& p) {
    return {p.a(), p.b(), p.lambda(), p.n_particles()};
  }
  double site(int j) const { return a + lambda * (j + 0.5); }
};

/// Weight of a_ < gamma_1(t) < ... < gamma_N(t) < b for absolute-position paths,
/// evaluated through the centred factorisation F * K * ... * K * G.
double in_chamber(std::span<const DiscretePath> paths, const ChamberSpec& spec,
                  CrossingMode mode);

/// The same weight computed directly on the absolute paths (walls and
/// neighbouring pairs), used to cross-check the factorisation.
double in_chamber_direct(std::span<const DiscretePath> paths, const ChamberSpec& spec,
                         CrossingMode mode);

}  // namespace wigner1d
