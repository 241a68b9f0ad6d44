#include "wigner1d/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "wigner1d/gaussian.hpp"

namespace wigner1d {

namespace {

struct Moments {
  double sum = 0.0;
  double sum2 = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sum2 / static_cast<double>(n) - m * m) * static_cast<double>(n) /
                       static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

/// Standard error of the mean from `batches` contiguous batch means.
double batch_se(std::span<const double> series, int batches) {
  const std::size_t n = series.size();
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), n);
  if (b < 2) return 0.0;
  Moments m;
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t lo = k * n / b;
    const std::size_t hi = (k + 1) * n / b;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += series[i];
    m.add(s / static_cast<double>(hi - lo));
  }
  return m.se();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double r_squared = 0.0;
};

LineFit weighted_line(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  LineFit f;
  const double det = sw * sxx - sx * sx;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / sw;
  f.slope_error = std::sqrt(sw / det);
  const double ybar = sy / sw;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss_res += w[i] * r * r;
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

struct ExponentialFit {
  double rate = 0.0;
  double rate_error = 0.0;
  bool interior = false;  // minimum away from the ends of the scanned range
};

// Weighted least squares of y = A exp(-r x), A profiled out in closed form.
// Every point enters, including those consistent with zero, so there is no
// selection bias toward slow decay. The error is the half-width of the
// chi^2 + 1 interval.
ExponentialFit exponential_fit(std::span<const double> x, std::span<const double> y,
                               std::span<const double> err) {
  auto chi2 = [&](double r) {
    double fy = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double f = std::exp(-r * x[i]);
      const double w = 1.0 / (err[i] * err[i]);
      fy += w * f * y[i];
      ff += w * f * f;
    }
    const double a = fy / ff;
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (y[i] - a * std::exp(-r * x[i])) / err[i];
      c += d * d;
    }
    return c;
  };
  const double span = x.back() - x.front();
  const double lo = 1e-3 / span, hi = 50.0 / span;
  constexpr int kGrid = 4000;
  std::vector<double> rates(kGrid + 1), chis(kGrid + 1);
  std::size_t best = 0;
  for (int i = 0; i <= kGrid; ++i) {
    rates[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
    chis[static_cast<std::size_t>(i)] = chi2(rates[static_cast<std::size_t>(i)]);
    if (chis[static_cast<std::size_t>(i)] < chis[best]) best = static_cast<std::size_t>(i);
  }
  ExponentialFit out;
  out.rate = rates[best];
  out.interior = best > 0 && best < static_cast<std::size_t>(kGrid);
  std::size_t a = best, b = best;
  while (a > 0 && chis[a] < chis[best] + 1.0) --a;
  while (b < static_cast<std::size_t>(kGrid) && chis[b] < chis[best] + 1.0) ++b;
  out.rate_error = 0.5 * (rates[b] - rates[a]);
  return out;
}

int cell_of(double x, const ModelParams& p) {
  return static_cast<int>(std::floor((x - p.a()) / p.lambda()));
}

}  // namespace

double MarginalDensity::at(double x) const {
  const double k = std::floor((x - lower) / width);
  if (k < 0 || k >= static_cast<double>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(k)];
}

MarginalDensity limit_marginal_density(const TransferSpectrum& spectrum,
                                       const NystromOperator& op,
                                       const PathEnsemble& ensemble, int bins_per_period) {
  if (bins_per_period < 2 || bins_per_period % 2 != 0)
    throw std::domain_error("bins per period must be even and positive");
  const std::size_t s = ensemble.size();
  if (spectrum.psi0.size() != s || op.size() != s)
    throw std::invalid_argument("spectrum does not belong to this ensemble");
  const auto q = op.quadrature();
  MarginalDensity d;
  d.lambda = op.lambda();
  d.bins_per_period = bins_per_period;
  d.width = d.lambda / bins_per_period;
  d.sample_x.resize(s);
  d.sample_w.resize(s);
  double sw = 0.0, sw2 = 0.0, reach = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    d.sample_x[i] = ensemble.loop(i)[0];
    d.sample_w[i] = static_cast<double>(s) * q[i] * spectrum.psi0[i] * spectrum.psi0_tilde[i];
    sw += d.sample_w[i];
    sw2 += d.sample_w[i] * d.sample_w[i];
    if (d.sample_w[i] != 0.0) reach = std::max(reach, std::abs(d.sample_x[i]));
  }
  d.effective_size = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
  if (d.effective_size < 100.0)
    throw std::runtime_error("effective sample size " + std::to_string(d.effective_size) +
                             " below 100");
  const int halves = static_cast<int>(std::ceil(2.0 * reach / d.lambda)) + 1;
  d.lower = -0.5 * halves * d.lambda;
  const std::size_t nb = static_cast<std::size_t>(halves * bins_per_period);
  std::vector<double> raw(nb, 0.0);
  const std::size_t pairs = s / 2;
  std::vector<Moments> bins(nb);
  Moments mean;
  // reflection pairs cancel the first moment exactly, so its error is taken
  // from the unpaired nodes
  Moments node_first;
  for (std::size_t i = 0; i < s; ++i) node_first.add(d.sample_w[i] * d.sample_x[i]);
  // per reflection pair contributions give the standard errors
  for (std::size_t k = 0; k < pairs; ++k) {
    std::map<std::size_t, double> local;
    double first = 0.0;
    for (std::size_t i : {2 * k, 2 * k + 1}) {
      const auto b = static_cast<std::size_t>((d.sample_x[i] - d.lower) / d.width);
      local[std::min(b, nb - 1)] += d.sample_w[i] / (2.0 * d.width);
      first += d.sample_w[i] * d.sample_x[i] / 2.0;
    }
    mean.add(first);
    for (const auto& [b, v] : local) raw[b] += v;
    for (std::size_t b = 0; b < nb; ++b) bins[b].add(local.count(b) ? local[b] : 0.0);
  }
  d.values.resize(nb);
  d.errors.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    raw[b] /= static_cast<double>(pairs);
    d.errors[b] = bins[b].se();
  }
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t r = nb - 1 - b;
    d.values[b] = 0.5 * (raw[b] + raw[r]);
    const double e = std::hypot(d.errors[b], d.errors[r]);
    if (e > 0.0) d.asymmetry = std::max(d.asymmetry, std::abs(raw[b] - raw[r]) / e);
    d.mass += d.values[b] * d.width;
  }
  d.mean = mean.mean();
  d.mean_error = node_first.se();
  return d;
}

DensityProfile one_particle_density(const MarginalDensity& p, int n_images) {
  if (n_images < 1) throw std::domain_error("need at least one image");
  const int bins = p.bins_per_period;
  const double lambda = p.lambda;
  const double h = p.width;
  DensityProfile out;
  out.period = lambda;
  out.grid.resize(static_cast<std::size_t>(bins));
  out.values.assign(static_cast<std::size_t>(bins), 0.0);
  // images j = 1 - n .. n cover [(1/2 - n) lambda, (n + 1/2) lambda)
  const double lo = (0.5 - n_images) * lambda;
  const double hi = (n_images + 0.5) * lambda;
  double dropped = 0.0;
  for (std::size_t b = 0; b < p.values.size(); ++b) {
    const double c = p.centre(b);
    if (c < lo || c >= hi) dropped += p.values[b] * h;
  }
  if (dropped > 1e-8)
    throw std::domain_error("n_images too small: dropped tail mass " + std::to_string(dropped));
  for (int k = 0; k < bins; ++k) {
    const double x = (k + 0.5) * h;
    out.grid[static_cast<std::size_t>(k)] = x;
    double v = 0.0;
    for (int j = 1 - n_images; j <= n_images; ++j) v += p.at(x - (j - 0.5) * lambda);
    out.values[static_cast<std::size_t>(k)] = v;
    out.mass += v * h;
  }
  // errors from the folded per-pair samples
  const std::size_t pairs = p.sample_x.size() / 2;
  std::vector<Moments> folded(static_cast<std::size_t>(bins));
  Moments mass;
  for (std::size_t k = 0; k < pairs; ++k) {
    std::vector<double> local(static_cast<std::size_t>(bins), 0.0);
    double m = 0.0;
    for (std::size_t i : {2 * k, 2 * k + 1}) {
      const double x = p.sample_x[i];
      if (x < lo || x >= hi) continue;
      double f = std::fmod(x + 0.5 * lambda, lambda);
      if (f < 0.0) f += lambda;
      const auto b = std::min(static_cast<std::size_t>(f / h), static_cast<std::size_t>(bins - 1));
      local[b] += p.sample_w[i] / (2.0 * h);
      m += p.sample_w[i] / 2.0;
    }
    mass.add(m);
    for (std::size_t b = 0; b < local.size(); ++b) folded[b].add(local[b]);
  }
  out.errors.resize(static_cast<std::size_t>(bins));
  for (std::size_t b = 0; b < folded.size(); ++b) out.errors[b] = folded[b].se();
  out.mass_error = mass.se();
  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  const double mean = out.mass / lambda;
  out.amplitude = (*mx - *mn) / mean;
  out.amplitude_error =
      std::hypot(out.errors[static_cast<std::size_t>(mx - out.values.begin())],
                 out.errors[static_cast<std::size_t>(mn - out.values.begin())]) / mean;
  return out;
}

DensityProfile sampled_density(const SampleStream& samples, const ModelParams& p,
                               int margin_cells, int bins_per_period, int batches) {
  const int n = p.n_particles();
  const int first = margin_cells;
  const int last = n - margin_cells;  // exclusive
  if (last <= first) throw std::domain_error("margin consumes every cell");
  if (bins_per_period < 1) throw std::domain_error("need at least one bin");
  const double lambda = p.lambda();
  const double h = lambda / bins_per_period;
  const double cells = last - first;
  DensityProfile out;
  out.period = lambda;
  const std::size_t nb = static_cast<std::size_t>(bins_per_period);
  std::vector<std::vector<double>> series(nb);
  std::vector<double> mass_series;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::vector<double> local(nb, 0.0);
    double m = 0.0;
    for (double x : samples.configuration(s)) {
      const int c = cell_of(x, p);
      if (c < first || c >= last) continue;
      const double f = (x - p.a()) - c * lambda;
      local[std::min(static_cast<std::size_t>(f / h), nb - 1)] += 1.0 / (h * cells);
      m += 1.0 / cells;
    }
    for (std::size_t b = 0; b < nb; ++b) series[b].push_back(local[b]);
    mass_series.push_back(m);
  }
  for (std::size_t b = 0; b < nb; ++b) {
    out.grid.push_back((static_cast<double>(b) + 0.5) * h);
    double s = 0.0;
    for (double v : series[b]) s += v;
    out.values.push_back(s / static_cast<double>(series[b].size()));
    out.errors.push_back(batch_se(series[b], batches));
    out.mass += out.values.back() * h;
  }
  out.mass_error = batch_se(mass_series, batches);
  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  const double mean = out.mass / lambda;
  out.amplitude = (*mx - *mn) / mean;
  out.amplitude_error =
      std::hypot(out.errors[static_cast<std::size_t>(mx - out.values.begin())],
                 out.errors[static_cast<std::size_t>(mn - out.values.begin())]) / mean;
  return out;
}

namespace {

// Quadratic log-message m(e) = alpha - P e^2 / 2 + h e over the end point of
// the current segment of a chain of harmonic kernels joined with -lambda
// recentring shifts.
struct Message {
  double alpha;
  double precision;
  double linear;
};

struct ChainKernel {
  double a;       // omega coth(omega beta)
  double b;       // omega / sinh(omega beta)
  double log_pre; // log prefactor of k_beta
  double lambda;

  ChainKernel(double beta, double rho) {
    const Spring spring(rho);
    a = spring.coth_w(beta);
    b = spring.csch_w(beta);
    log_pre = spring.log_prefactor(beta);
    lambda = 1.0 / rho;
  }

  Message first(double u) const { return {log_pre - a * u * u / 2.0, a, b * u}; }

  Message next(const Message& m) const {
    const double q = m.precision + a;
    const double hh = m.linear + a * lambda;
    return {m.alpha - a * lambda * lambda / 2.0 + log_pre + 0.5 * std::log(2.0 * std::numbers::pi / q) +
                hh * hh / (2.0 * q),
            a - b * b / q, b * hh / q - b * lambda};
  }

  static double eval(const Message& m, double e) {
    return m.alpha - m.precision * e * e / 2.0 + m.linear * e;
  }
};

std::vector<Message> forward(const ChainKernel& k, double u, int windings) {
  std::vector<Message> out{k.first(u)};
  for (int s = 1; s < windings; ++s) out.push_back(k.next(out.back()));
  return out;
}

}  // namespace

double chain_log_mass(double u, double v, int windings, double beta, double rho) {
  if (windings < 1) throw std::domain_error("windings must be >= 1");
  const ChainKernel k(beta, rho);
  const auto msgs = forward(k, u, windings);
  return ChainKernel::eval(msgs.back(), v) - windings * log_normalization_c(beta, rho);
}

OneParticleMatrix one_particle_matrix(double x, double y, const TransferSpectrum& spectrum,
                                      const NystromOperator& op, const PathEnsemble& ensemble,
                                      const RdmOptions& options) {
  if (options.w_max < 1) throw std::domain_error("w_max must be >= 1");
  if (options.samples < 2) throw std::domain_error("need at least two samples");
  if (x > y) std::swap(x, y);
  const double beta = ensemble.beta();
  const double rho = ensemble.rho();
  const double lambda = 1.0 / rho;
  const int m = static_cast<int>(ensemble.slices());
  const double dt = ensemble.dt();
  const ChainKernel kern(beta, rho);
  const bool corrected = op.mode() == CrossingMode::crossing_corrected;

  OneParticleMatrix out;
  out.x = x;
  out.y = y;
  out.w_max = options.w_max;
  Rng rng(options.seed);
  std::normal_distribution<double> normal;
  const int centre = static_cast<int>(std::floor(x / lambda));
  double variance = 0.0;
  for (int w = 1; w <= options.w_max; ++w) {
    // sites l = (j - 1/2) lambda; chain ends at l' = l + (w - 1) lambda
    std::vector<std::pair<int, double>> sites;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = centre - 30; j <= centre + 31; ++j) {
      const double l = (j - 0.5) * lambda;
      const double lm = chain_log_mass(x - l, y - l - (w - 1) * lambda, w, beta, rho);
      sites.emplace_back(j, lm);
      best = std::max(best, lm);
    }
    double contribution = 0.0;
    double var_w = 0.0;
    for (const auto& [j, log_mass] : sites) {
      if (log_mass < best - 35.0) continue;
      const double l = (j - 0.5) * lambda;
      const double u = x - l;
      const double v = y - l - (w - 1) * lambda;
      const auto msgs = forward(kern, u, w);
      Moments acc;
      for (int n = 0; n < options.samples; ++n) {
        // junction end points backwards from v
        std::vector<double> ends(static_cast<std::size_t>(w));
        ends[static_cast<std::size_t>(w - 1)] = v;
        for (int s = w - 2; s >= 0; --s) {
          const auto& msg = msgs[static_cast<std::size_t>(s)];
          const double q = msg.precision + kern.a;
          const double hh = msg.linear + kern.a * lambda + kern.b * ends[static_cast<std::size_t>(s + 1)];
          ends[static_cast<std::size_t>(s)] = hh / q + normal(rng) / std::sqrt(q);
        }
        std::vector<DiscretePath> segs;
        double start = u;
        for (int s = 0; s < w; ++s) {
          segs.push_back(sample_bridge(start, ends[static_cast<std::size_t>(s)], beta, m, rho, rng));
          start = ends[static_cast<std::size_t>(s)] - lambda;
        }
        double weight = extend_psi0_tilde(op, ensemble, spectrum, segs.front());
        for (int s = 0; s + 1 < w && weight != 0.0; ++s) {
          const auto& lo = segs[static_cast<std::size_t>(s)];
          const auto& up = segs[static_cast<std::size_t>(s + 1)];
          weight *= detail::gap_weight([&](std::size_t i) { return lo.slices[i]; },
                                       [&](std::size_t i) { return up.slices[i]; },
                                       static_cast<std::size_t>(m), lambda, corrected, 1.0 / dt) /
                    spectrum.z0;
        }
        if (weight != 0.0) weight *= extend_psi0(op, ensemble, spectrum, segs.back());
        acc.add(weight);
      }
      const double mass = std::exp(log_mass);
      contribution += mass * acc.mean();
      var_w += mass * mass * acc.se() * acc.se();
    }
    const double sign = (w % 2 == 1) ? 1.0 : -1.0;
    out.by_winding.push_back(sign * contribution);
    out.by_winding_error.push_back(std::sqrt(var_w));
    out.value += sign * contribution;
    variance += var_w;
  }
  out.error = std::sqrt(variance);
  const std::size_t last = out.by_winding.size() - 1;
  if (last >= 1 && out.by_winding[last - 1] != 0.0) {
    const double r = std::abs(out.by_winding[last] / out.by_winding[last - 1]);
    out.truncation_bound = r < 1.0 ? std::abs(out.by_winding[last]) * r / (1.0 - r)
                                   : std::numeric_limits<double>::infinity();
  } else {
    // single winding: K <= 1 bounds the next term by the chain mass times the
    // largest Psi0 Psi0~ product over the ensemble
    double psi_max = 0.0;
    for (std::size_t i = 0; i < spectrum.psi0.size(); ++i)
      psi_max = std::max(psi_max, spectrum.psi0[i]);
    double mass2 = 0.0;
    for (int j = centre - 30; j <= centre + 31; ++j) {
      const double l = (j - 0.5) * lambda;
      mass2 += std::exp(chain_log_mass(x - l, y - l - lambda, 2, beta, rho));
    }
    out.truncation_bound = mass2 * psi_max * psi_max / spectrum.z0;
  }
  out.flagged = !(out.truncation_bound <= options.tolerance);
  return out;
}

CorrelationReport truncated_two_point(const SampleStream& samples, const ModelParams& p,
                                      int margin_cells, int max_separation, int batches,
                                      int fit_from) {
  if (fit_from < 1) throw std::domain_error("fit must start at a separation >= 1");
  const int n = p.n_particles();
  const int first = margin_cells;
  const int last = n - margin_cells;
  const int feasible = last - first - 1;
  if (samples.size() < 1000)
    throw std::domain_error("need at least 1000 configurations, got " +
                            std::to_string(samples.size()));
  if (max_separation > feasible)
    throw std::domain_error("separations up to " + std::to_string(feasible) +
                            " cells are feasible with this margin");
  const std::size_t ncell = static_cast<std::size_t>(last - first);
  const std::size_t ks = static_cast<std::size_t>(max_separation) + 1;
  const std::size_t total = samples.size();
  const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(batches), total);
  // per batch: sum n_c, and sum over pairs at separation k of n_c n_{c+k}
  std::vector<std::vector<double>> first_moment(nb, std::vector<double>(ncell, 0.0));
  std::vector<std::vector<std::vector<double>>> second(
      nb, std::vector<std::vector<double>>(ks));
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = 0; k < ks; ++k) second[b][k].assign(ncell - k, 0.0);
  std::vector<double> counts(ncell);
  std::vector<std::size_t> batch_size(nb, 0);
  for (std::size_t s = 0; s < total; ++s) {
    const std::size_t b = s * nb / total;
    ++batch_size[b];
    std::fill(counts.begin(), counts.end(), 0.0);
    for (double x : samples.configuration(s)) {
      const int c = cell_of(x, p);
      if (c >= first && c < last) counts[static_cast<std::size_t>(c - first)] += 1.0;
    }
    for (std::size_t c = 0; c < ncell; ++c) {
      first_moment[b][c] += counts[c];
      second[b][0][c] += counts[c] * (counts[c] - 1.0);
      for (std::size_t k = 1; k < ks && c + k < ncell; ++k)
        second[b][k][c] += counts[c] * counts[c + k];
    }
  }
  // estimator on a subset of batches (all but `skip`)
  auto estimate = [&](std::size_t skip) {
    std::vector<double> m1(ncell, 0.0);
    std::vector<std::vector<double>> m2(ks);
    for (std::size_t k = 0; k < ks; ++k) m2[k].assign(ncell - k, 0.0);
    double count = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (b == skip) continue;
      count += static_cast<double>(batch_size[b]);
      for (std::size_t c = 0; c < ncell; ++c) m1[c] += first_moment[b][c];
      for (std::size_t k = 0; k < ks; ++k)
        for (std::size_t c = 0; c + k < ncell; ++c) m2[k][c] += second[b][k][c];
    }
    std::vector<double> out(ks, 0.0);
    for (std::size_t k = 0; k < ks; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c + k < ncell; ++c)
        acc += m2[k][c] / count - (m1[c] / count) * (m1[c + k] / count);
      out[k] = acc / static_cast<double>(ncell - k);
    }
    return out;
  };
  const auto full = estimate(nb);
  std::vector<std::vector<double>> reps;
  for (std::size_t b = 0; b < nb; ++b) reps.push_back(estimate(b));
  CorrelationReport r;
  for (std::size_t k = 0; k < ks; ++k) {
    double mean = 0.0;
    for (const auto& rep : reps) mean += rep[k];
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (const auto& rep : reps) ss += (rep[k] - mean) * (rep[k] - mean);
    r.separation.push_back(static_cast<int>(k));
    r.value.push_back(full[k]);
    r.error.push_back(std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb)));
  }
  std::vector<double> xs, ys, es;
  for (std::size_t k = static_cast<std::size_t>(fit_from); k < ks; ++k) {
    if (!(r.error[k] > 0.0)) continue;
    xs.push_back(static_cast<double>(k) * p.lambda());
    ys.push_back(r.value[k]);
    es.push_back(r.error[k]);
  }
  r.fit_points = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    const auto f = exponential_fit(xs, ys, es);
    r.rate = f.rate;
    r.rate_error = f.rate_error;
    r.fitted = f.interior;
  }
  return r;
}

ErgodicReport ergodic_average_y(const SampleStream& samples, const ModelParams& p,
                                int margin_cells, int n, int batches) {
  const int total = p.n_particles();
  const int first = margin_cells;
  const int last = total - margin_cells;
  if (last <= first) throw std::domain_error("margin consumes every index");
  if (samples.n_particles != total) throw std::invalid_argument("sample stream size mismatch");
  const int len = n > 0 ? std::min(n, last - first) : last - first;
  const Lattice lattice(p);
  ErgodicReport r;
  r.first = static_cast<std::size_t>(first);
  std::vector<std::vector<double>> running(static_cast<std::size_t>(len));
  std::vector<double> full;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto cfg = samples.configuration(s);
    double acc = 0.0;
    for (int k = 0; k < len; ++k) {
      acc += cfg[static_cast<std::size_t>(first + k)] - lattice.site(first + k);
      running[static_cast<std::size_t>(k)].push_back(acc / (k + 1));
    }
    double all = 0.0;
    for (int j = first; j < last; ++j) all += cfg[static_cast<std::size_t>(j)] - lattice.site(j);
    full.push_back(all / (last - first));
  }
  for (const auto& series : running) {
    double m = 0.0;
    for (double v : series) m += v;
    r.running_mean.push_back(m / static_cast<double>(series.size()));
    r.band.push_back(batch_se(series, batches));
  }
  for (double v : full) r.mean += v;
  r.mean /= static_cast<double>(full.size());
  r.error = batch_se(full, batches);
  r.flagged = std::abs(r.mean) > 4.0 * r.error;
  return r;
}

ShiftReport detect_shift(const SampleStream& samples, const ModelParams& p, int margin_cells,
                         int batches) {
  const int total = p.n_particles();
  const int first = margin_cells;
  const int last = total - margin_cells;
  if (last <= first) throw std::domain_error("margin consumes every index");
  const Lattice lattice(p);
  const double k = 2.0 * std::numbers::pi / p.lambda();
  std::vector<double> cs, sn;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto cfg = samples.configuration(s);
    double c = 0.0, si = 0.0;
    for (int j = first; j < last; ++j) {
      const double y = cfg[static_cast<std::size_t>(j)] - lattice.site(j);
      c += std::cos(k * y);
      si += std::sin(k * y);
    }
    cs.push_back(c / (last - first));
    sn.push_back(si / (last - first));
  }
  double mc = 0.0, ms = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    mc += cs[i];
    ms += sn[i];
  }
  mc /= static_cast<double>(cs.size());
  ms /= static_cast<double>(sn.size());
  ShiftReport r;
  r.resultant = std::hypot(mc, ms);
  double angle = std::atan2(ms, mc);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  r.shift = angle / k;
  if (r.shift >= p.lambda()) r.shift -= p.lambda();
  // delta method: angular error from the components orthogonal to the mean
  std::vector<double> ortho(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i)
    ortho[i] = (-ms * cs[i] + mc * sn[i]) / std::max(r.resultant * r.resultant, 1e-300);
  r.error = batch_se(ortho, batches) / k;
  return r;
}

SampleStream shifted(const SampleStream& samples, double u) {
  SampleStream out = samples;
  for (double& x : out.positions) x += u;
  return out;
}

CountTailReport particle_count_tails(const SampleStream& samples, const ModelParams& p,
                                     double start, double length, int margin_cells, int n_max) {
  if (length < 0.0) throw std::domain_error("interval length must be non-negative");
  const double lambda = p.lambda();
  const double lo = p.a() + margin_cells * lambda;
  const double hi = p.b() - margin_cells * lambda;
  if (start < lo || start + length > hi) throw std::domain_error("interval is not inside the bulk");
  std::vector<double> offsets;
  for (double s = start; s + length <= hi + 1e-12; s += lambda) offsets.push_back(s);
  for (double s = start - lambda; s >= lo - 1e-12; s -= lambda) offsets.push_back(s);
  std::sort(offsets.begin(), offsets.end());
  const double expected = p.rho() * length;
  CountTailReport r;
  std::vector<std::vector<double>> series(static_cast<std::size_t>(n_max));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto cfg = samples.configuration(s);
    std::vector<double> local(static_cast<std::size_t>(n_max), 0.0);
    for (double o : offsets) {
      const auto a = std::lower_bound(cfg.begin(), cfg.end(), o);
      const auto b = std::lower_bound(cfg.begin(), cfg.end(), o + length);
      const long count = b - a;
      if (static_cast<std::size_t>(count) >= r.histogram.size())
        r.histogram.resize(static_cast<std::size_t>(count) + 1, 0);
      ++r.histogram[static_cast<std::size_t>(count)];
      ++r.observations;
      const double dev = std::abs(static_cast<double>(count) - expected);
      for (int n = 1; n <= n_max; ++n)
        if (dev >= n - 1e-12) local[static_cast<std::size_t>(n - 1)] += 1.0;
    }
    for (int n = 1; n <= n_max; ++n)
      series[static_cast<std::size_t>(n - 1)].push_back(local[static_cast<std::size_t>(n - 1)] /
                                                        static_cast<double>(offsets.size()));
  }
  if (r.histogram.empty()) r.histogram.push_back(0);
  r.mode = static_cast<int>(std::max_element(r.histogram.begin(), r.histogram.end()) -
                            r.histogram.begin());
  std::vector<double> xs, ys, ws;
  for (int n = 1; n <= n_max; ++n) {
    const auto& v = series[static_cast<std::size_t>(n - 1)];
    double m = 0.0;
    for (double x : v) m += x;
    m /= std::max<double>(1.0, static_cast<double>(v.size()));
    r.n.push_back(n);
    r.tail.push_back(m);
    r.tail_error.push_back(batch_se(v, 20));
    if (m > 0.0) {
      xs.push_back(static_cast<double>(n * n));
      ys.push_back(std::log(m));
      ws.push_back(1.0);
    }
  }
  if (xs.size() >= 2) {
    const auto f = weighted_line(xs, ys, ws);
    r.slope = f.slope;
    r.intercept = f.intercept;
    r.r_squared = f.r_squared;
  }
  return r;
}

int bulk_margin(double gap) {
  if (!(gap > 0.0)) throw std::domain_error("gap must be positive");
  if (std::isinf(gap)) return 0;
  return static_cast<int>(std::ceil(5.0 / gap));
}

nlohmann::json to_json(const DensityProfile& d) {
  return {{"period", d.period},     {"grid", d.grid},
          {"values", d.values},     {"errors", d.errors},
          {"mass", d.mass},         {"mass_error", d.mass_error},
          {"amplitude", d.amplitude}, {"amplitude_error", d.amplitude_error}};
}

nlohmann::json to_json(const OneParticleMatrix& m) {
  return {{"x", m.x},
          {"y", m.y},
          {"value", m.value},
          {"error", m.error},
          {"w_max", m.w_max},
          {"by_winding", m.by_winding},
          {"by_winding_error", m.by_winding_error},
          {"truncation_bound", std::isfinite(m.truncation_bound) ? nlohmann::json(m.truncation_bound)
                                                                 : nlohmann::json("inf")},
          {"flagged", m.flagged}};
}

nlohmann::json to_json(const CorrelationReport& c) {
  return {{"separation", c.separation}, {"value", c.value},   {"error", c.error},
          {"rate", c.rate},             {"rate_error", c.rate_error},
          {"fit_points", c.fit_points}, {"reference_rate", c.reference_rate},
          {"fitted", c.fitted}};
}

nlohmann::json to_json(const CountTailReport& c) {
  return {{"n", c.n},
          {"tail", c.tail},
          {"tail_error", c.tail_error},
          {"histogram", c.histogram},
          {"mode", c.mode},
          {"slope", c.slope},
          {"intercept", c.intercept},
          {"r_squared", c.r_squared},
          {"observations", c.observations}};
}

}  // namespace wigner1d
