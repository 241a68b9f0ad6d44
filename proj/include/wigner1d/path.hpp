#pragma once

#include <cstddef>
#include <vector>

namespace wigner1d {

/// A path sampled on a uniform time grid.
///
/// A closed path (loop) stores M slices at t_i = i * dt, i = 0..M-1, and slice
/// M is identified with slice 0. An open path stores all M + 1 points including
/// the free right endpoint. Either way the path has M intervals.
struct DiscretePath {
  std::vector<double> slices;
  double dt = 0.0;
  bool closed = true;

  std::size_t intervals() const {
    return closed ? slices.size() : (slices.empty() ? 0 : slices.size() - 1);
  }
  /// Value at grid index i in [0, intervals()]; wraps for closed paths.
  double at(std::size_t i) const {
    return closed && i == slices.size() ? slices.front() : slices[i];
  }
  double front() const { return slices.front(); }
  double back() const { return closed ? slices.front() : slices.back(); }

  DiscretePath reflected() const;
  DiscretePath shifted(double offset) const;
};

}  // namespace wigner1d
