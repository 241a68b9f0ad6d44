#include "wigner1d/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wigner1d {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double spring_of(const ModelParams& p, const ChainConfig& c) {
  return c.spring_rho < 0.0 ? p.rho() : c.spring_rho;
}

}  // namespace

Chain::Chain(const ModelParams& p, const ChainConfig& config)
    : params_(p),
      config_(config),
      slices_(config.slices),
      dt_(p.beta() / config.slices),
      spring_(spring_of(p, config)),
      coth_(0.0),
      csch_(0.0),
      rng_(config.seed) {
  if (config.slices < 2) throw std::domain_error("chain needs at least two slices");
  if (config.segment < 0 || config.segment >= config.slices)
    throw std::domain_error("segment length must be in [0, slices)");
  segment_ = config.segment > 0 ? config.segment : std::max(1, slices_ / 8);
  // enough regrowths to cover every slice about once per sweep
  regrowths_ = std::max(1, slices_ / (segment_ + 1));
  coth_ = spring_.coth_w(dt_);
  csch_ = spring_.csch_w(dt_);
  const Lattice lattice(p);
  sites_.assign(lattice.sites().begin(), lattice.sites().end());
  loops_.assign(sites_.size(), std::vector<double>(static_cast<std::size_t>(slices_), 0.0));
  // heat-bath scale of a single slice given its two neighbours
  slice_step_ = 1.0 / std::sqrt(2.0 * coth_);
  shift_step_ = 0.25 * p.lambda();
  global_step_ = 0.1 * p.lambda();
  const int window = 50;
  for (int s = 1; s <= config.thermalize; ++s) {
    sweep();
    if (config.tune && s % window == 0) {
      slice_step_ *= std::exp(slice_acceptance() - 0.5);
      shift_step_ *= std::exp(shift_acceptance() - 0.4);
      shift_step_ = std::min(shift_step_, p.lambda());
      global_step_ *= std::exp(global_acceptance() - 0.4);
      global_step_ = std::min(global_step_, p.lambda());
      reset_counters();
    }
  }
  reset_counters();
  sweeps_ = 0;
}

void Chain::reset_counters() {
  slice_tries_ = slice_accepts_ = 0;
  shift_tries_ = shift_accepts_ = 0;
  regrow_tries_ = regrow_accepts_ = 0;
  global_tries_ = global_accepts_ = 0;
}

double Chain::slice_acceptance() const {
  return slice_tries_ ? static_cast<double>(slice_accepts_) / static_cast<double>(slice_tries_) : 0.0;
}
double Chain::shift_acceptance() const {
  return shift_tries_ ? static_cast<double>(shift_accepts_) / static_cast<double>(shift_tries_) : 0.0;
}
double Chain::global_acceptance() const {
  return global_tries_ ? static_cast<double>(global_accepts_) / static_cast<double>(global_tries_) : 0.0;
}
double Chain::regrow_acceptance() const {
  return regrow_tries_ ? static_cast<double>(regrow_accepts_) / static_cast<double>(regrow_tries_) : 0.0;
}

// Relation r in [0, N] is the constraint between path r - 1 and path r, with
// the walls standing in for the missing paths at r = 0 and r = N.
double Chain::lower(int r, std::size_t i) const {
  return r == 0 ? -0.5 * params_.lambda() : loops_[static_cast<std::size_t>(r - 1)][i];
}
double Chain::upper(int r, std::size_t i) const {
  return r == n_paths() ? 0.5 * params_.lambda() : loops_[static_cast<std::size_t>(r)][i];
}
double Chain::gap(int r) const { return r == 0 || r == n_paths() ? 0.0 : params_.lambda(); }
double Chain::inv_scale(int r) const {
  return r == 0 || r == n_paths() ? 2.0 / dt_ : 1.0 / dt_;
}

double Chain::log_pair(int r, std::size_t i) const {
  if (!config_.chamber) return 0.0;
  const std::size_t m = static_cast<std::size_t>(slices_);
  auto d = [&](std::size_t k) { return (upper(r, k) - lower(r, k)) + gap(r); };
  const double di = d(i);
  if (!(di > 0.0)) return kNegInf;
  if (config_.mode == CrossingMode::strict) return 0.0;
  double out = 0.0;
  for (std::size_t k : {(i + m - 1) % m, (i + 1) % m}) {
    const double x = d(k) * di * inv_scale(r);
    if (x < detail::kNoCrossingCutoff) out += std::log(-std::expm1(-x));
  }
  return out;
}

double Chain::log_relation(int r) const {
  if (!config_.chamber) return 0.0;
  const std::size_t m = static_cast<std::size_t>(slices_);
  const double w = detail::gap_weight([&](std::size_t i) { return lower(r, i % m); },
                                      [&](std::size_t i) { return upper(r, i % m); }, m,
                                      gap(r), config_.mode == CrossingMode::crossing_corrected,
                                      inv_scale(r));
  return w > 0.0 ? std::log(w) : kNegInf;
}

double Chain::log_relation_with(int r, int j, const std::vector<double>& trial) const {
  auto& slot = const_cast<std::vector<double>&>(loops_[static_cast<std::size_t>(j)]);
  std::vector<double> saved = slot;
  slot = trial;
  const double out = log_relation(r);
  slot = std::move(saved);
  return out;
}

void Chain::slice_move(int j, std::size_t i) {
  auto& x = loops_[static_cast<std::size_t>(j)];
  const std::size_t m = x.size();
  const double prev = x[(i + m - 1) % m];
  const double next = x[(i + 1) % m];
  auto energy = [&](double v) {
    return coth_ * (prev * prev + 2.0 * v * v + next * next) / 2.0 - csch_ * v * (prev + next);
  };
  const double old = x[i];
  const double old_chamber = log_pair(j, i) + log_pair(j + 1, i);
  std::normal_distribution<double> normal;
  const double proposal = old + slice_step_ * normal(rng_);
  x[i] = proposal;
  const double new_chamber = log_pair(j, i) + log_pair(j + 1, i);
  ++slice_tries_;
  const double delta = energy(old) - energy(proposal) + new_chamber - old_chamber;
  std::uniform_real_distribution<double> unif;
  if (new_chamber > kNegInf && (delta >= 0.0 || unif(rng_) < std::exp(delta))) {
    ++slice_accepts_;
  } else {
    x[i] = old;
  }
}

void Chain::shift_move(int j) {
  auto& x = loops_[static_cast<std::size_t>(j)];
  std::normal_distribution<double> normal;
  const double delta_x = shift_step_ * normal(rng_);
  double sum = 0.0;
  for (double v : x) sum += v;
  const double m = static_cast<double>(x.size());
  const double d_energy = (coth_ - csch_) * (2.0 * delta_x * sum + m * delta_x * delta_x);
  const double old_chamber = log_relation(j) + log_relation(j + 1);
  for (double& v : x) v += delta_x;
  const double new_chamber = log_relation(j) + log_relation(j + 1);
  ++shift_tries_;
  const double delta = -d_energy + new_chamber - old_chamber;
  std::uniform_real_distribution<double> unif;
  if (new_chamber > kNegInf && (delta >= 0.0 || unif(rng_) < std::exp(delta))) {
    ++shift_accepts_;
  } else {
    for (double& v : x) v -= delta_x;
  }
}

void Chain::global_shift_move() {
  std::normal_distribution<double> normal;
  const double delta_x = global_step_ * normal(rng_);
  double d_energy = 0.0;
  for (const auto& x : loops_) {
    double sum = 0.0;
    for (double v : x) sum += v;
    d_energy += (coth_ - csch_) *
                (2.0 * delta_x * sum + static_cast<double>(x.size()) * delta_x * delta_x);
  }
  // relative positions are unchanged, only the walls see the move
  const int n = n_paths();
  const double old_chamber = log_relation(0) + log_relation(n);
  for (auto& x : loops_)
    for (double& v : x) v += delta_x;
  const double new_chamber = log_relation(0) + log_relation(n);
  ++global_tries_;
  const double delta = -d_energy + new_chamber - old_chamber;
  std::uniform_real_distribution<double> unif;
  if (new_chamber > kNegInf && (delta >= 0.0 || unif(rng_) < std::exp(delta))) {
    ++global_accepts_;
  } else {
    for (auto& x : loops_)
      for (double& v : x) v -= delta_x;
  }
}

void Chain::regrow_move(int j) {
  auto& x = loops_[static_cast<std::size_t>(j)];
  const std::size_t m = x.size();
  const std::size_t count = static_cast<std::size_t>(segment_);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  const std::size_t first = pick(rng_);
  const double old_chamber = log_relation(j) + log_relation(j + 1);
  const std::vector<double> saved = x;
  resample_segment(x, first, count, dt_, 0.0, spring_, rng_);
  const double new_chamber = log_relation(j) + log_relation(j + 1);
  ++regrow_tries_;
  const double delta = new_chamber - old_chamber;
  std::uniform_real_distribution<double> unif;
  if (new_chamber > kNegInf && (delta >= 0.0 || unif(rng_) < std::exp(delta))) {
    ++regrow_accepts_;
  } else {
    x = saved;
  }
}

bool Chain::try_replace(int j, const std::vector<double>& trial) {
  if (trial.size() != static_cast<std::size_t>(slices_))
    throw std::invalid_argument("trial loop has the wrong number of slices");
  const auto& x = loops_[static_cast<std::size_t>(j)];
  auto energy = [&](const std::vector<double>& y) {
    double e = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double a = y[i];
      const double b = y[(i + 1) % y.size()];
      e += coth_ * (a * a + b * b) / 2.0 - csch_ * a * b;
    }
    return e;
  };
  const double new_chamber = log_relation_with(j, j, trial) + log_relation_with(j + 1, j, trial);
  if (!(new_chamber > kNegInf)) return false;
  const double delta =
      energy(x) - energy(trial) + new_chamber - log_relation(j) - log_relation(j + 1);
  std::uniform_real_distribution<double> unif;
  if (delta >= 0.0 || unif(rng_) < std::exp(delta)) {
    loops_[static_cast<std::size_t>(j)] = trial;
    return true;
  }
  return false;
}

void Chain::sweep() {
  const std::size_t m = static_cast<std::size_t>(slices_);
  for (int j = 0; j < n_paths(); ++j) {
    for (std::size_t i = 0; i < m; ++i) slice_move(j, i);
    shift_move(j);
    for (int k = 0; k < regrowths_; ++k) regrow_move(j);
  }
  global_shift_move();
  ++sweeps_;
}

DiscretePath Chain::absolute_path(int j) const {
  return DiscretePath{loops_[static_cast<std::size_t>(j)], dt_, true}.shifted(
      sites_[static_cast<std::size_t>(j)]);
}

std::vector<double> Chain::positions() const {
  std::vector<double> out(loops_.size());
  for (std::size_t j = 0; j < loops_.size(); ++j) out[j] = loops_[j][0] + sites_[j];
  return out;
}

double Chain::chamber_weight() const {
  std::vector<DiscretePath> paths;
  for (int j = 0; j < n_paths(); ++j) paths.push_back(absolute_path(j));
  return in_chamber(paths, ChamberSpec::from(params_), config_.mode);
}

nlohmann::json Chain::diagnostics() const {
  return {{"sweeps", sweeps_},
          {"slice_step", slice_step_},
          {"shift_step", shift_step_},
          {"slice_acceptance", slice_acceptance()},
          {"shift_acceptance", shift_acceptance()},
          {"regrow_acceptance", regrow_acceptance()},
          {"global_step", global_step_},
          {"global_acceptance", global_acceptance()}};
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 0.5;
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) ct += (series[i] - mean) * (series[i + t] - mean);
    tau += ct / (static_cast<double>(n) * c0);
    if (static_cast<double>(t) >= 5.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

namespace {

// Observables whose autocorrelation sets the thinning: the mean displacement
// and the displacement of the middle particle.
std::pair<double, double> probes(const Chain& chain) {
  const int n = chain.n_paths();
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += chain.centred_loop(j)[0];
  return {sum / n, chain.centred_loop(n / 2)[0]};
}

double probe_tau(const std::vector<double>& a, const std::vector<double>& b) {
  return std::max(integrated_autocorrelation_time(a), integrated_autocorrelation_time(b));
}

}  // namespace

SampleStream sample_configurations(Chain& chain, int n_samples, int thinning, int pilot) {
  if (n_samples < 1) throw std::domain_error("need at least one sample");
  if (thinning < 0) throw std::domain_error("thinning must be non-negative");
  SampleStream out;
  out.n_particles = chain.n_paths();
  std::vector<double> a, b;
  if (thinning == 0) {
    for (int s = 0; s < pilot; ++s) {
      chain.sweep();
      const auto [x, y] = probes(chain);
      a.push_back(x);
      b.push_back(y);
    }
    out.tau = probe_tau(a, b);
    out.thinning = std::max(1, static_cast<int>(std::ceil(2.0 * out.tau)));
    a.clear();
    b.clear();
  } else {
    out.thinning = thinning;
  }
  out.positions.reserve(static_cast<std::size_t>(n_samples) * static_cast<std::size_t>(out.n_particles));
  for (int k = 0; k < n_samples; ++k) {
    for (int s = 0; s < out.thinning; ++s) chain.sweep();
    const auto pos = chain.positions();
    out.positions.insert(out.positions.end(), pos.begin(), pos.end());
    const auto [x, y] = probes(chain);
    a.push_back(x);
    b.push_back(y);
  }
  // tau measured on the emitted stream, converted to sweeps
  const double tau_stream = probe_tau(a, b) * out.thinning;
  if (thinning != 0 || tau_stream > out.tau) out.tau = std::max(out.tau, tau_stream);
  out.tau_warning = out.tau > out.thinning;
  return out;
}

SampleStream sample_chains(const ModelParams& p, const ChainConfig& config, int n_chains,
                           int samples_per_chain, int thinning) {
  if (n_chains < 1) throw std::domain_error("need at least one chain");
  std::vector<SampleStream> parts(static_cast<std::size_t>(n_chains));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < n_chains; ++c) {
    ChainConfig cc = config;
    cc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(c));
    Chain chain(p, cc);
    parts[static_cast<std::size_t>(c)] = sample_configurations(chain, samples_per_chain, thinning);
    parts[static_cast<std::size_t>(c)].chain_seeds = {cc.seed};
  }
  SampleStream out;
  out.n_particles = p.n_particles();
  for (const auto& part : parts) {
    out.positions.insert(out.positions.end(), part.positions.begin(), part.positions.end());
    out.thinning = std::max(out.thinning, part.thinning);
    out.tau = std::max(out.tau, part.tau);
    out.tau_warning = out.tau_warning || part.tau_warning;
    out.chain_seeds.push_back(part.chain_seeds.front());
  }
  return out;
}

SampleStream rejection_sample(const ModelParams& p, const ChainConfig& config, int n_samples,
                              double* acceptance, long max_attempts) {
  const int n = p.n_particles();
  if (n > 3) throw std::domain_error("rejection sampling is limited to N <= 3");
  const double rho_w = spring_of(p, config);
  const Lattice lattice(p);
  const BridgeLaw law(p.beta(), rho_w > 0.0 ? rho_w : 1.0, config.slices, true);
  const double dt = p.beta() / config.slices;
  const ChamberSpec spec = ChamberSpec::from(p);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unif;
  SampleStream out;
  out.n_particles = n;
  out.thinning = 1;
  out.chain_seeds = {config.seed};
  long attempts = 0;
  long accepted = 0;
  std::vector<DiscretePath> paths(static_cast<std::size_t>(n));
  while (accepted < n_samples) {
    if (++attempts > max_attempts) throw std::runtime_error("rejection sampler exhausted its budget");
    for (int j = 0; j < n; ++j) {
      if (rho_w > 0.0) {
        paths[static_cast<std::size_t>(j)] = law.sample_closed_loop(rng).shifted(lattice.site(j));
      } else {
        const double u = p.a() + (p.b() - p.a()) * unif(rng);
        auto open = sample_bridge(u, u, p.beta(), config.slices, 0.0, rng);
        open.slices.pop_back();
        paths[static_cast<std::size_t>(j)] = DiscretePath{std::move(open.slices), dt, true};
      }
    }
    // free loops carry no order, so sort them by their start point
    if (rho_w <= 0.0)
      std::sort(paths.begin(), paths.end(),
                [](const DiscretePath& x, const DiscretePath& y) { return x.front() < y.front(); });
    const double w = config.chamber ? in_chamber(paths, spec, config.mode) : 1.0;
    if (w > 0.0 && unif(rng) < w) {
      ++accepted;
      for (const auto& path : paths) out.positions.push_back(path.front());
    }
  }
  if (acceptance) *acceptance = static_cast<double>(accepted) / static_cast<double>(attempts);
  return out;
}

}  // namespace wigner1d
