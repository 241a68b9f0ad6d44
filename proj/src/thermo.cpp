#include "wigner1d/thermo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wigner1d/gaussian.hpp"

namespace wigner1d {

namespace {

bool same(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }

nlohmann::json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

FreeEnergyReport free_energy(double beta, double rho, double z0, double z0_error) {
  if (!(beta > 0.0) || !(rho > 0.0)) throw std::domain_error("beta and rho must be positive");
  if (!(z0 > 0.0)) throw std::domain_error("z0 must be positive");
  FreeEnergyReport r;
  r.beta = beta;
  r.rho = rho;
  r.z0 = z0;
  r.z0_error = z0_error;
  r.ground = 1.0 / (12.0 * rho);
  r.oscillator = std::sqrt(rho / 2.0) + std::log1p(-std::exp(-beta * std::sqrt(2.0 * rho))) / beta;
  r.spectral = -std::log(z0) / beta;
  r.f = r.ground + r.oscillator + r.spectral;
  r.uncertainty = z0_error / (beta * z0);
  return r;
}

FreeEnergyReport free_energy(double beta, double rho, const TransferSpectrum& spectrum) {
  if (!same(spectrum.beta, beta) || !same(spectrum.rho, rho))
    throw std::domain_error("spectrum was computed at different (beta, rho)");
  if (!same(spectrum.lambda, 1.0 / rho))
    throw std::domain_error("spectrum was computed at a different lambda");
  return free_energy(beta, rho, spectrum.z0, spectrum.z0_error);
}

double partition_function_log(const ModelParams& p, double log_amplitude) {
  if (!std::isfinite(log_amplitude))
    throw std::runtime_error("amplitude estimate is not positive; enlarge the ensemble");
  const int n = p.n_particles();
  return n * log_normalization_c(p.beta(), p.rho()) - p.beta() * n / (12.0 * p.rho()) +
         log_amplitude;
}

SurfaceReport surface_correction(std::span<const int> n, std::span<const double> log_z,
                                 double beta, double beta_f, std::span<const double> errors) {
  if (n.size() != log_z.size()) throw std::invalid_argument("series length mismatch");
  if (n.size() < 4) throw std::domain_error("surface fit needs at least four values of N");
  if (!errors.empty() && errors.size() != n.size())
    throw std::invalid_argument("error vector length mismatch");
  for (std::size_t k = 1; k < n.size(); ++k)
    if (n[k] != n[k - 1] + 1) throw std::domain_error("N values must be consecutive");

  SurfaceReport r;
  r.n.assign(n.begin(), n.end());
  r.log_z.assign(log_z.begin(), log_z.end());
  for (std::size_t k = 0; k < n.size(); ++k)
    r.correction.push_back(-(log_z[k] + n[k] * beta_f));
  if (errors.empty())
    r.correction_error.assign(n.size(), 0.0);
  else
    r.correction_error.assign(errors.begin(), errors.end());

  const std::size_t m = n.size() - 1;
  std::vector<double> d(m);
  for (std::size_t k = 0; k < m; ++k) d[k] = r.correction[k + 1] - r.correction[k];

  // differences at round-off level carry no rate information
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < m; ++k) {
    const double floor = 1e-12 * std::max(1.0, std::abs(r.correction[k]));
    if (std::abs(d[k]) <= floor) continue;
    pts.emplace_back(static_cast<double>(n[k]), std::log(std::abs(d[k])));
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double e = errors.empty()
                         ? 0.0
                         : std::sqrt(r.correction_error[k] * r.correction_error[k] +
                                     2 * r.correction_error[k + 1] * r.correction_error[k + 1] +
                                     r.correction_error[k + 2] * r.correction_error[k + 2]);
    if (std::abs(d[k + 1]) > std::abs(d[k]) + 2.0 * e) r.flagged = true;
  }
  r.fit_points = static_cast<int>(pts.size());
  const double c_last = r.correction.back();
  if (pts.size() < 2) {
    r.rate = std::numeric_limits<double>::infinity();
    r.s = c_last / beta;
    return r;
  }
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double det = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / det;
  const double icpt = (sy - slope * sx) / k;
  r.rate = -slope;
  if (pts.size() > 2) {
    double ss = 0.0;
    for (const auto& [x, y] : pts) ss += (y - icpt - slope * x) * (y - icpt - slope * x);
    r.rate_error = std::sqrt(ss / (k - 2.0) * k / det);
  }
  if (r.rate > 0.0) {
    const double q = std::exp(-r.rate);
    r.s = (c_last + d.back() * q / (1.0 - q)) / beta;
  } else {
    r.flagged = true;
    r.s = c_last / beta;
  }
  return r;
}

namespace {

std::vector<double> corrections(const NystromOperator& op, std::span<const double> f,
                                std::span<const double> g, double z0, int n_min, int n_max) {
  const auto amps = amplitude_series(op, f, g, n_max);
  std::vector<double> c;
  for (int k = n_min; k <= n_max; ++k)
    c.push_back(-(amps[static_cast<std::size_t>(k - 1)].log_value - k * std::log(z0)));
  return c;
}

}  // namespace

SurfaceReport surface_from_transfer(const NystromOperator& op, const PathEnsemble& ensemble,
                                    int n_min, int n_max, int jackknife_blocks,
                                    const EigenOptions& options) {
  if (n_min < 1 || n_max - n_min < 3) throw std::domain_error("need N range of at least four");
  const double beta = op.beta();
  const double rho = op.rho();
  const auto f = boundary_vector_f(ensemble, op.mode());
  const auto g = boundary_vector_g(ensemble, op.mode());
  const auto spectrum = principal_eigenpair(op, options);
  const double beta_f = beta * free_energy(beta, rho, spectrum).f;

  std::vector<int> ns;
  std::vector<double> log_z;
  const auto amps = amplitude_series(op, f, g, n_max);
  for (int k = n_min; k <= n_max; ++k) {
    ns.push_back(k);
    log_z.push_back(partition_function_log(ModelParams::centered(beta, rho, k),
                                           amps[static_cast<std::size_t>(k - 1)].log_value));
  }
  if (jackknife_blocks < 2) return surface_correction(ns, log_z, beta, beta_f);

  EigenOptions sub_options = options;
  sub_options.z1_max_iter = 0;
  std::vector<std::vector<double>> reps;
  std::vector<double> s_reps;
  for (int b = 0; b < jackknife_blocks; ++b) {
    const auto sub = op.with_quadrature(leave_block_out(op.quadrature(), b, jackknife_blocks));
    const double z0 = principal_eigenpair(sub, sub_options).z0;
    auto c = corrections(sub, f, g, z0, n_min, n_max);
    // feed the replicate through the same fit as the full estimate
    std::vector<double> lz(c.size());
    const double bf = beta * free_energy(beta, rho, z0).f;
    for (std::size_t i = 0; i < c.size(); ++i) lz[i] = -c[i] - ns[i] * bf;
    s_reps.push_back(surface_correction(ns, lz, beta, bf).s);
    reps.push_back(std::move(c));
  }
  const double scale = static_cast<double>(jackknife_blocks - 1) / jackknife_blocks;
  auto jk = [&](auto get) {
    double mean = 0.0;
    for (int b = 0; b < jackknife_blocks; ++b) mean += get(b);
    mean /= jackknife_blocks;
    double ss = 0.0;
    for (int b = 0; b < jackknife_blocks; ++b) ss += (get(b) - mean) * (get(b) - mean);
    return std::sqrt(scale * ss);
  };
  std::vector<double> errors;
  for (std::size_t i = 0; i < ns.size(); ++i)
    errors.push_back(jk([&](int b) { return reps[static_cast<std::size_t>(b)][i]; }));
  auto report = surface_correction(ns, log_z, beta, beta_f, errors);
  report.s_error = jk([&](int b) { return s_reps[static_cast<std::size_t>(b)]; });
  return report;
}

nlohmann::json to_json(const FreeEnergyReport& r) {
  return {{"beta", r.beta},
          {"rho", r.rho},
          {"f", r.f},
          {"terms", {{"ground", r.ground}, {"oscillator", r.oscillator}, {"spectral", r.spectral}}},
          {"uncertainty", r.uncertainty},
          {"z0", r.z0},
          {"z0_error", r.z0_error}};
}

nlohmann::json to_json(const SurfaceReport& r) {
  return {{"n", r.n},
          {"log_z", r.log_z},
          {"correction", r.correction},
          {"correction_error", r.correction_error},
          {"rate", finite_or_string(r.rate)},
          {"rate_error", r.rate_error},
          {"fit_points", r.fit_points},
          {"s", r.s},
          {"s_error", r.s_error},
          {"flagged", r.flagged}};
}

}  // namespace wigner1d
