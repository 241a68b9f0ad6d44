#include "wigner1d/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "wigner1d/gaussian.hpp"

namespace wigner1d {

PathEnsemble PathEnsemble::sample(double beta, double rho, const EnsembleConfig& config) {
  if (config.paths < 2) throw std::domain_error("ensemble needs at least two paths");
  if (config.slices < 2) throw std::domain_error("ensemble needs at least two slices");
  PathEnsemble e;
  e.beta_ = beta;
  e.rho_ = rho;
  e.proposal_rho_ = config.proposal_rho > 0.0 ? config.proposal_rho : rho;
  e.slices_ = static_cast<std::size_t>(config.slices);
  e.seed_ = config.seed;
  const std::size_t pairs = (static_cast<std::size_t>(config.paths) + 1) / 2;
  e.data_.resize(2 * pairs * e.slices_);
  e.weights_.resize(2 * pairs);
  const BridgeLaw law(beta, e.proposal_rho_, config.slices, true);
  const auto count = static_cast<std::ptrdiff_t>(pairs);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto pair = static_cast<std::size_t>(k);
    Rng rng(derive_seed(config.seed, pair));
    const DiscretePath loop = law.sample_closed_loop(rng);
    double* dst = e.data_.data() + 2 * pair * e.slices_;
    for (std::size_t i = 0; i < e.slices_; ++i) {
      dst[i] = loop.slices[i];
      dst[e.slices_ + i] = -loop.slices[i];
    }
    double w = 1.0;
    if (!e.uniform())
      w = std::exp(log_loop_density(loop, rho) - log_loop_density(loop, e.proposal_rho_));
    e.weights_[2 * pair] = w;
    e.weights_[2 * pair + 1] = w;
  }
  return e;
}

DiscretePath PathEnsemble::path(std::size_t i) const {
  const auto v = loop(i);
  return DiscretePath{std::vector<double>(v.begin(), v.end()), dt(), true};
}

double PathEnsemble::effective_size() const {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights_) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double suggested_proposal_rho(double beta, double rho) {
  const double target = 0.25 / rho;
  if (std::sqrt(variance_sigma2(beta, rho)) <= target) return rho;
  // sigma is decreasing in the spring constant; bisect on log rho.
  double lo = std::log(rho);
  double hi = lo;
  while (std::sqrt(variance_sigma2(beta, std::exp(hi))) > target) hi += 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::sqrt(variance_sigma2(beta, std::exp(mid))) > target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(hi);
}

namespace {

// Largest ratio of the cyclic precision eigenvalues 2 coth - 2 csch cos(2 pi k / M)
// of the proposal spring over those of the model spring.
double max_mode_ratio(double beta, double rho, double proposal, int slices) {
  const double dt = beta / slices;
  const Spring a(rho);
  const Spring b(proposal);
  double worst = 0.0;
  for (int k = 0; k <= slices / 2; ++k) {
    const double c = std::cos(2.0 * std::numbers::pi * k / slices);
    const double ea = 2.0 * a.coth_w(dt) - 2.0 * a.csch_w(dt) * c;
    const double eb = 2.0 * b.coth_w(dt) - 2.0 * b.csch_w(dt) * c;
    worst = std::max(worst, eb / ea);
  }
  return worst;
}

}  // namespace

double bounded_proposal_rho(double beta, double rho, int slices, double max_ratio) {
  if (!(max_ratio > 1.0 && max_ratio < 2.0))
    throw std::domain_error("mode ratio bound must lie in (1, 2)");
  const double cap = suggested_proposal_rho(beta, rho);
  if (max_mode_ratio(beta, rho, cap, slices) <= max_ratio) return cap;
  double lo = std::log(rho);
  double hi = std::log(cap);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (max_mode_ratio(beta, rho, std::exp(mid), slices) > max_ratio)
      hi = mid;
    else
      lo = mid;
  }
  return std::exp(lo);
}

NystromOperator::NystromOperator(const PathEnsemble& ensemble, double lambda,
                                 CrossingMode mode, kernels::Backend backend)
    : n_(ensemble.size()),
      lambda_(lambda),
      beta_(ensemble.beta()),
      rho_(ensemble.rho()),
      mode_(mode),
      backend_(backend) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  auto matrix = std::make_shared<std::vector<float>>(n_ * n_);
  const kernels::LoopBlock block{ensemble.data(), n_, ensemble.slices()};
  const kernels::KernelSpec spec{lambda, mode == CrossingMode::crossing_corrected,
                                 1.0 / ensemble.dt(), true};
  kernels::build_kernel_matrix(block, spec, *matrix, backend);
  matrix_ = std::move(matrix);
  quadrature_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i)
    quadrature_[i] = ensemble.weight(i) / static_cast<double>(n_);
}

void NystromOperator::apply(std::span<const double> f, std::span<double> out) const {
  std::vector<double> weighted(n_);
  for (std::size_t j = 0; j < n_; ++j) weighted[j] = quadrature_[j] * f[j];
  kernels::apply(*matrix_, n_, weighted, out, backend_);
}

void NystromOperator::apply_adjoint(std::span<const double> f,
                                    std::span<double> out) const {
  std::vector<double> reflected(n_);
  for (std::size_t j = 0; j < n_; ++j) reflected[j] = f[PathEnsemble::partner(j)];
  std::vector<double> tmp(n_);
  apply(reflected, tmp);
  for (std::size_t i = 0; i < n_; ++i) out[i] = tmp[PathEnsemble::partner(i)];
}

double NystromOperator::inner(std::span<const double> f, std::span<const double> g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += quadrature_[i] * f[i] * g[i];
  return s;
}

NystromOperator NystromOperator::with_quadrature(std::vector<double> quadrature) const {
  if (quadrature.size() != n_) throw std::invalid_argument("quadrature size mismatch");
  NystromOperator out;
  out.n_ = n_;
  out.lambda_ = lambda_;
  out.beta_ = beta_;
  out.rho_ = rho_;
  out.mode_ = mode_;
  out.backend_ = backend_;
  out.matrix_ = matrix_;
  out.quadrature_ = std::move(quadrature);
  return out;
}

ConvergenceError::ConvergenceError(std::vector<double> last_iterate, double residual,
                                   int iterations)
    : std::runtime_error("power iteration did not converge after " +
                         std::to_string(iterations) + " iterations (residual " +
                         std::to_string(residual) + ")"),
      last_iterate_(std::move(last_iterate)),
      residual_(residual),
      iterations_(iterations) {}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double subdominant_modulus(const NystromOperator& op, const TransferSpectrum& sp,
                           const EigenOptions& options, bool& converged) {
  const std::size_t n = op.size();
  std::vector<double> v(n);
  Rng rng(0x5eedULL);
  std::normal_distribution<double> normal;
  for (double& x : v) x = normal(rng);
  std::vector<double> w(n);
  auto deflate = [&](std::span<const double> in, std::span<double> out) {
    op.apply(in, out);
    const double c = sp.z0 * op.inner(sp.psi0_tilde, in);
    for (std::size_t i = 0; i < n; ++i) out[i] -= c * sp.psi0[i];
  };
  // strip the Perron component of the start vector
  {
    const double c = op.inner(sp.psi0_tilde, v);
    for (std::size_t i = 0; i < n; ++i) v[i] -= c * sp.psi0[i];
  }
  constexpr int kWindow = 10;
  std::vector<double> log_norms;
  log_norms.reserve(static_cast<std::size_t>(options.z1_max_iter) + 1);
  double nv = norm2(v);
  if (nv == 0.0) {
    converged = true;
    return 0.0;
  }
  for (double& x : v) x /= nv;
  double cumulative = 0.0;
  log_norms.push_back(0.0);
  double previous = -1.0;
  double estimate = 0.0;
  converged = false;
  for (int it = 1; it <= options.z1_max_iter; ++it) {
    deflate(v, w);
    const double nw = norm2(w);
    if (!(nw > 1e-300)) {
      converged = true;
      return 0.0;
    }
    cumulative += std::log(nw);
    log_norms.push_back(cumulative);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (it >= 2 * kWindow && it % kWindow == 0) {
      estimate = std::exp((log_norms.back() - log_norms[log_norms.size() - 1 - kWindow]) /
                          kWindow);
      if (previous > 0.0 && std::abs(estimate - previous) <= options.z1_tol * estimate) {
        converged = true;
        return estimate;
      }
      previous = estimate;
    }
  }
  return estimate;
}

}  // namespace

TransferSpectrum principal_eigenpair(const NystromOperator& op,
                                     const EigenOptions& options) {
  const std::size_t n = op.size();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n);
  double q_prev = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();
  TransferSpectrum sp;
  int it = 0;
  for (it = 1; it <= options.max_iter; ++it) {
    op.apply(v, u);
    const double q = dot(v, u);  // v has unit norm
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (u[i] - q * v[i]) * (u[i] - q * v[i]);
    residual = std::sqrt(r2);
    const bool done = std::abs(q - q_prev) < options.tol && residual <= 10.0 * options.tol;
    if (done) {
      sp.z0 = q;
      break;
    }
    q_prev = q;
    const double nu = norm2(u);
    if (!(nu > 0.0)) throw ConvergenceError(v, residual, it);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / nu;
  }
  if (it > options.max_iter) throw ConvergenceError(v, residual, options.max_iter);

  sp.residual = residual;
  sp.iterations = it;
  sp.beta = op.beta();
  sp.rho = op.rho();
  sp.lambda = op.lambda();
  std::vector<double> reflected(n);
  for (std::size_t i = 0; i < n; ++i) reflected[i] = v[PathEnsemble::partner(i)];
  sp.normalization = op.inner(reflected, v);
  const double scale = 1.0 / std::sqrt(sp.normalization);
  sp.psi0.resize(n);
  sp.psi0_tilde.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sp.psi0[i] = v[i] * scale;
    sp.psi0_tilde[i] = reflected[i] * scale;
  }
  sp.z1_abs = subdominant_modulus(op, sp, options, sp.z1_converged);
  sp.gap = sp.z1_abs > 0.0 ? std::log(sp.z0 / sp.z1_abs)
                           : std::numeric_limits<double>::infinity();
  return sp;
}

std::pair<double, double> dense_leading_eigenvalues(const NystromOperator& op) {
  const std::size_t n = op.size();
  if (n > 2000) throw std::domain_error("dense validation limited to S <= 2000");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto q = op.quadrature();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(op.kernel(i, j)) * q[j];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  const auto& ev = solver.eigenvalues();
  std::vector<double> mods(static_cast<std::size_t>(ev.size()));
  double z0 = -std::numeric_limits<double>::infinity();
  Eigen::Index top = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    mods[static_cast<std::size_t>(k)] = std::abs(ev[k]);
    if (std::abs(ev[k].imag()) < 1e-12 && ev[k].real() > z0) {
      z0 = ev[k].real();
      top = k;
    }
  }
  double z1 = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (k != top) z1 = std::max(z1, mods[static_cast<std::size_t>(k)]);
  return {z0, z1};
}

std::vector<double> leave_block_out(std::span<const double> quadrature, int block,
                                    int blocks) {
  const std::size_t n = quadrature.size();
  const std::size_t pairs = n / 2;
  std::vector<double> q(quadrature.begin(), quadrature.end());
  std::size_t removed = 0;
  for (std::size_t k = 0; k < pairs; ++k) {
    if (static_cast<int>(k * static_cast<std::size_t>(blocks) / pairs) != block) continue;
    q[2 * k] = 0.0;
    q[2 * k + 1] = 0.0;
    removed += 2;
  }
  const double rescale = static_cast<double>(n) / static_cast<double>(n - removed);
  for (double& x : q) x *= rescale;
  return q;
}

double jackknife_z0(const NystromOperator& op, TransferSpectrum& spectrum, int blocks,
                    const EigenOptions& options) {
  if (blocks < 2) throw std::domain_error("jackknife needs at least two blocks");
  std::vector<double> estimates;
  for (int b = 0; b < blocks; ++b) {
    const auto sub = op.with_quadrature(leave_block_out(op.quadrature(), b, blocks));
    EigenOptions o = options;
    o.z1_max_iter = 0;
    estimates.push_back(principal_eigenpair(sub, o).z0);
  }
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / blocks;
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  spectrum.z0_error = std::sqrt(ss * (blocks - 1) / blocks);
  return spectrum.z0_error;
}

std::vector<double> boundary_vector_f(const PathEnsemble& ensemble, CrossingMode mode) {
  std::vector<double> f(ensemble.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = boundary_f(ensemble.path(i), ensemble.rho(), mode);
  return f;
}

std::vector<double> boundary_vector_g(const PathEnsemble& ensemble, CrossingMode mode) {
  std::vector<double> g(ensemble.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = boundary_g(ensemble.path(i), ensemble.rho(), mode);
  return g;
}

namespace {

std::vector<double> log_amplitudes(const NystromOperator& op, std::span<const double> f,
                                   std::span<const double> g, int n_max) {
  const std::size_t n = op.size();
  std::vector<double> v(g.begin(), g.end());
  std::vector<double> w(n);
  std::vector<double> out;
  double log_scale = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    if (k > 1) {
      op.apply(v, w);
      double peak = 0.0;
      for (double x : w) peak = std::max(peak, std::abs(x));
      if (peak == 0.0) {
        out.push_back(-std::numeric_limits<double>::infinity());
        std::fill(v.begin(), v.end(), 0.0);
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / peak;
      log_scale += std::log(peak);
    }
    out.push_back(std::log(op.inner(f, v)) + log_scale);
  }
  return out;
}

}  // namespace

std::vector<AmplitudeEstimate> amplitude_series(const NystromOperator& op,
                                                std::span<const double> f,
                                                std::span<const double> g, int n_max,
                                                const TransferSpectrum* spectrum,
                                                int jackknife_blocks) {
  if (n_max < 1) throw std::domain_error("amplitude needs N >= 1");
  if (f.size() != op.size() || g.size() != op.size())
    throw std::invalid_argument("boundary vectors do not match the operator");
  const auto logs = log_amplitudes(op, f, g, n_max);
  std::vector<AmplitudeEstimate> out(static_cast<std::size_t>(n_max));
  for (int k = 0; k < n_max; ++k) {
    auto& e = out[static_cast<std::size_t>(k)];
    e.n_particles = k + 1;
    e.log_value = logs[static_cast<std::size_t>(k)];
    e.value = std::exp(e.log_value);
  }
  if (spectrum != nullptr) {
    // K^n G -> z0^n Psi0 <Psi0~, G>
    const double lf = std::log(op.inner(f, spectrum->psi0));
    const double lg = std::log(op.inner(spectrum->psi0_tilde, g));
    for (auto& e : out)
      e.log_rank_one = (e.n_particles - 1) * std::log(spectrum->z0) + lf + lg;
  }
  if (jackknife_blocks > 1) {
    std::vector<std::vector<double>> reps;
    for (int b = 0; b < jackknife_blocks; ++b) {
      const auto sub = op.with_quadrature(leave_block_out(op.quadrature(), b, jackknife_blocks));
      reps.push_back(log_amplitudes(sub, f, g, n_max));
    }
    for (int k = 0; k < n_max; ++k) {
      double mean = 0.0;
      for (const auto& r : reps) mean += r[static_cast<std::size_t>(k)];
      mean /= jackknife_blocks;
      double ss = 0.0;
      for (const auto& r : reps) {
        const double d = r[static_cast<std::size_t>(k)] - mean;
        ss += d * d;
      }
      out[static_cast<std::size_t>(k)].log_error =
          std::sqrt(ss * (jackknife_blocks - 1) / jackknife_blocks);
    }
  }
  return out;
}

AmplitudeEstimate amplitude_fkg(const NystromOperator& op, std::span<const double> f,
                                std::span<const double> g, int n_particles,
                                const TransferSpectrum* spectrum, int jackknife_blocks) {
  return amplitude_series(op, f, g, n_particles, spectrum, jackknife_blocks).back();
}

nlohmann::json to_json(const TransferSpectrum& s) {
  return {{"z0", s.z0},
          {"z0_error", s.z0_error},
          {"z1_abs", s.z1_abs},
          {"z1_converged", s.z1_converged},
          {"gap", std::isfinite(s.gap) ? nlohmann::json(s.gap) : nlohmann::json("inf")},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"beta", s.beta},
          {"rho", s.rho},
          {"lambda", s.lambda}};
}

namespace {

double extend(const NystromOperator& op, const PathEnsemble& ensemble,
              const TransferSpectrum& sp, const DiscretePath& gamma) {
  if (gamma.intervals() != ensemble.slices() ||
      std::abs(gamma.dt - ensemble.dt()) > 1e-12 * ensemble.dt())
    throw std::domain_error("path discretization does not match the ensemble");
  const bool corrected = op.mode() == CrossingMode::crossing_corrected;
  const double inv_scale = 1.0 / ensemble.dt();
  const std::size_t m = ensemble.slices();
  const auto q = op.quadrature();
  double s = 0.0;
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    if (q[j] == 0.0) continue;
    const double* eta = ensemble.loop(j).data();
    const double k = detail::gap_weight(
        [&](std::size_t i) { return gamma.at(i); },
        [&](std::size_t i) { return i == m ? eta[0] : eta[i]; }, m, op.lambda(), corrected,
        inv_scale);
    if (k != 0.0) s += k * q[j] * sp.psi0[j];
  }
  return s / sp.z0;
}

}  // namespace

double extend_psi0(const NystromOperator& op, const PathEnsemble& ensemble,
                   const TransferSpectrum& spectrum, const DiscretePath& gamma) {
  return extend(op, ensemble, spectrum, gamma);
}

double extend_psi0_tilde(const NystromOperator& op, const PathEnsemble& ensemble,
                         const TransferSpectrum& spectrum, const DiscretePath& gamma) {
  return extend(op, ensemble, spectrum, gamma.reflected());
}

}  // namespace wigner1d
