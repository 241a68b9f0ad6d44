#include "wigner1d/pathspace.hpp"

#include <stdexcept>

namespace wigner1d {

namespace {

void check_compatible(const DiscretePath& g, const DiscretePath& e) {
  if (g.intervals() != e.intervals() || g.dt != e.dt || g.intervals() == 0)
    throw std::domain_error("paths have mismatched discretizations");
}

// 2 / (D dt) for D = 2 (two moving paths) and D = 1 (fixed wall).
double pair_scale(double dt) { return 1.0 / dt; }
double wall_scale(double dt) { return 2.0 / dt; }

}  // namespace

const char* to_string(CrossingMode mode) {
  return mode == CrossingMode::strict ? "strict" : "crossing_corrected";
}

CrossingMode crossing_mode_from_string(const std::string& name) {
  if (name == "strict") return CrossingMode::strict;
  if (name == "crossing_corrected" || name == "corrected")
    return CrossingMode::crossing_corrected;
  throw std::invalid_argument("unknown crossing mode '" + name + "'");
}

double kernel_k(const DiscretePath& gamma, const DiscretePath& eta, double lambda,
                CrossingMode mode) {
  check_compatible(gamma, eta);
  return detail::gap_weight([&](std::size_t i) { return gamma.at(i); },
                            [&](std::size_t i) { return eta.at(i); },
                            gamma.intervals(), lambda,
                            mode == CrossingMode::crossing_corrected,
                            pair_scale(gamma.dt));
}

double boundary_f(const DiscretePath& gamma, double rho, CrossingMode mode) {
  const double wall = -0.5 / rho;
  return detail::gap_weight([&](std::size_t) { return wall; },
                            [&](std::size_t i) { return gamma.at(i); },
                            gamma.intervals(), 0.0,
                            mode == CrossingMode::crossing_corrected,
                            wall_scale(gamma.dt));
}

double boundary_g(const DiscretePath& gamma, double rho, CrossingMode mode) {
  const double wall = 0.5 / rho;
  return detail::gap_weight([&](std::size_t i) { return gamma.at(i); },
                            [&](std::size_t) { return wall; },
                            gamma.intervals(), 0.0,
                            mode == CrossingMode::crossing_corrected,
                            wall_scale(gamma.dt));
}

namespace {

void check_chamber_input(std::span<const DiscretePath> paths, const ChamberSpec& spec) {
  if (paths.size() != static_cast<std::size_t>(spec.n))
    throw std::domain_error("path count does not match the chamber");
  for (const auto& p : paths) check_compatible(paths.front(), p);
}

}  // namespace

double in_chamber(std::span<const DiscretePath> paths, const ChamberSpec& spec,
                  CrossingMode mode) {
  check_chamber_input(paths, spec);
  const bool corrected = mode == CrossingMode::crossing_corrected;
  const std::size_t n = paths.size();
  const std::size_t intervals = paths.front().intervals();
  const double dt = paths.front().dt;
  const double half = 0.5 * spec.lambda;

  const double m_first = spec.site(0);
  double weight = detail::gap_weight(
      [&](std::size_t) { return -half; },
      [&](std::size_t i) { return paths[0].at(i) - m_first; }, intervals, 0.0,
      corrected, wall_scale(dt));
  for (std::size_t j = 0; j + 1 < n && weight > 0.0; ++j) {
    const double mj = spec.site(static_cast<int>(j));
    const double mk = spec.site(static_cast<int>(j + 1));
    weight *= detail::gap_weight(
        [&](std::size_t i) { return paths[j].at(i) - mj; },
        [&](std::size_t i) { return paths[j + 1].at(i) - mk; }, intervals,
        spec.lambda, corrected, pair_scale(dt));
  }
  if (weight == 0.0) return 0.0;
  const double m_last = spec.site(static_cast<int>(n - 1));
  weight *= detail::gap_weight(
      [&](std::size_t i) { return paths[n - 1].at(i) - m_last; },
      [&](std::size_t) { return half; }, intervals, 0.0, corrected, wall_scale(dt));
  return weight;
}

double in_chamber_direct(std::span<const DiscretePath> paths, const ChamberSpec& spec,
                         CrossingMode mode) {
  check_chamber_input(paths, spec);
  const bool corrected = mode == CrossingMode::crossing_corrected;
  const std::size_t n = paths.size();
  const std::size_t intervals = paths.front().intervals();
  const double dt = paths.front().dt;
  double weight = detail::gap_weight([&](std::size_t) { return spec.a; },
                                     [&](std::size_t i) { return paths[0].at(i); },
                                     intervals, 0.0, corrected, wall_scale(dt));
  for (std::size_t j = 0; j + 1 < n && weight > 0.0; ++j)
    weight *= detail::gap_weight([&](std::size_t i) { return paths[j].at(i); },
                                 [&](std::size_t i) { return paths[j + 1].at(i); },
                                 intervals, 0.0, corrected, pair_scale(dt));
  if (weight == 0.0) return 0.0;
  weight *= detail::gap_weight([&](std::size_t i) { return paths[n - 1].at(i); },
                               [&](std::size_t) { return spec.b; }, intervals, 0.0,
                               corrected, wall_scale(dt));
  return weight;
}

}  // namespace wigner1d
