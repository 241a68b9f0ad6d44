#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wigner1d/gaussian.hpp"
#include "wigner1d/model.hpp"
#include "wigner1d/pathspace.hpp"

namespace wigner1d {

struct ChainConfig {
  int slices = 64;
  CrossingMode mode = CrossingMode::crossing_corrected;
  /// Disable the non-collision constraint (walls included) entirely.
  bool chamber = true;
  /// Spring constant of the path weight; negative means the model's rho.
  /// 0 samples free Brownian loops (only sensible with the chamber on).
  double spring_rho = -1.0;
  int thermalize = 500;
  bool tune = true;
  /// Interior points regrown per segment move; 0 means slices / 8. Each sweep
  /// makes about slices / (segment + 1) regrowths per path.
  int segment = 0;
  std::uint64_t seed = 1;
};

/// Metropolis-Hastings chain for N closed loops conditioned on the path
/// Weyl chamber. Loops are stored centred on their lattice sites.
class Chain {
 public:
  /// Constant loops at the lattice sites, then `thermalize` sweeps (with step
  /// tuning when enabled).
  Chain(const ModelParams& p, const ChainConfig& config);

  /// One pass: M slice moves, one whole-loop shift and a series of segment
  /// regrowths per path, then one common shift of all paths.
  void sweep();

  const ModelParams& params() const { return params_; }
  int n_paths() const { return static_cast<int>(loops_.size()); }
  int slices() const { return slices_; }
  double dt() const { return dt_; }
  long sweeps() const { return sweeps_; }

  const std::vector<double>& centred_loop(int j) const {
    return loops_[static_cast<std::size_t>(j)];
  }
  DiscretePath absolute_path(int j) const;
  /// Slice-0 positions, strictly increasing.
  std::vector<double> positions() const;
  /// Full chamber weight of the current state, recomputed from scratch.
  double chamber_weight() const;

  double slice_step() const { return slice_step_; }
  double shift_step() const { return shift_step_; }
  double slice_acceptance() const;
  double shift_acceptance() const;
  double regrow_acceptance() const;
  double global_acceptance() const;

  /// Metropolis test of an arbitrary replacement of loop j (used by tests to
  /// check that chamber-violating proposals are never accepted).
  bool try_replace(int j, const std::vector<double>& centred);

  nlohmann::json diagnostics() const;

 private:
  double log_pair(int r, std::size_t i) const;
  double log_relation(int r) const;
  double log_relation_with(int r, int j, const std::vector<double>& trial) const;
  double lower(int r, std::size_t i) const;
  double upper(int r, std::size_t i) const;
  double gap(int r) const;
  double inv_scale(int r) const;
  void slice_move(int j, std::size_t i);
  void shift_move(int j);
  void regrow_move(int j);
  void global_shift_move();
  void reset_counters();

  ModelParams params_;
  ChainConfig config_;
  int slices_;
  int segment_ = 1;
  int regrowths_ = 1;
  double dt_;
  Spring spring_;
  double coth_;
  double csch_;
  Rng rng_;
  std::vector<std::vector<double>> loops_;
  std::vector<double> sites_;
  double slice_step_;
  double shift_step_;
  double global_step_;
  long sweeps_ = 0;
  long slice_tries_ = 0, slice_accepts_ = 0;
  long shift_tries_ = 0, shift_accepts_ = 0;
  long regrow_tries_ = 0, regrow_accepts_ = 0;
  long global_tries_ = 0, global_accepts_ = 0;
};

/// Integrated autocorrelation time with Sokal's automatic window (c = 5).
double integrated_autocorrelation_time(std::span<const double> series);

struct SampleStream {
  int n_particles = 0;
  std::vector<double> positions;  // row-major, one configuration per row
  int thinning = 0;
  double tau = 0.0;               // integrated autocorrelation time in sweeps
  bool tau_warning = false;       // tau exceeds the thinning
  std::vector<std::uint64_t> chain_seeds;

  std::size_t size() const {
    return n_particles == 0 ? 0 : positions.size() / static_cast<std::size_t>(n_particles);
  }
  std::span<const double> configuration(std::size_t k) const {
    return std::span<const double>(positions)
        .subspan(k * static_cast<std::size_t>(n_particles),
                 static_cast<std::size_t>(n_particles));
  }
};

/// Emits slice-0 configurations every `thinning` sweeps. thinning = 0 picks
/// 2 tau (at least 1) from a pilot run of `pilot` sweeps.
SampleStream sample_configurations(Chain& chain, int n_samples, int thinning = 0,
                                   int pilot = 2000);

/// Independent chains with seeds derive_seed(config.seed, chain), run in
/// parallel and concatenated in chain order.
SampleStream sample_chains(const ModelParams& p, const ChainConfig& config, int n_chains,
                           int samples_per_chain, int thinning = 0);

/// Exact draws for N <= 3: independent loops from the path weight (uniform
/// start in the box when the spring is 0), accepted with the chamber weight.
/// Returns slice-0 positions; `acceptance` receives the survival fraction.
SampleStream rejection_sample(const ModelParams& p, const ChainConfig& config,
                              int n_samples, double* acceptance = nullptr,
                              long max_attempts = 100000000);

}  // namespace wigner1d
