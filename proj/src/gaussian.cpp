#include "wigner1d/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wigner1d {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::domain_error(std::string(what) + " must be positive");
}

// log sinh(x) for x > 0 without overflow.
double log_sinh(double x) {
  return x + std::log(-std::expm1(-2.0 * x)) - std::numbers::ln2;
}

}  // namespace

Spring::Spring(double rho) : rho_(rho), omega_(std::sqrt(2.0 * rho)) {
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw std::domain_error("spring constant must be non-negative");
}

double Spring::coth_w(double t) const {
  if (omega_ == 0.0) return 1.0 / t;
  return omega_ / std::tanh(omega_ * t);
}

double Spring::csch_w(double t) const {
  if (omega_ == 0.0) return 1.0 / t;
  const double x = omega_ * t;
  return 2.0 * omega_ * std::exp(-x) / (-std::expm1(-2.0 * x));
}

double Spring::log_prefactor(double t) const {
  if (omega_ == 0.0) return -0.5 * std::log(2.0 * std::numbers::pi * t);
  return 0.5 * (std::log(omega_) - std::log(2.0 * std::numbers::pi) -
                log_sinh(omega_ * t));
}

double log_mehler(double t, double x, double y, double rho) {
  require_positive(t, "kernel time");
  const Spring s(rho);
  return s.log_prefactor(t) - 0.5 * s.coth_w(t) * (x * x + y * y) +
         s.csch_w(t) * x * y;
}

double mehler(double t, double x, double y, double rho) {
  return std::exp(log_mehler(t, x, y, rho));
}

double normalization_c(double beta, double rho) {
  require_positive(beta, "beta");
  require_positive(rho, "rho");
  return 0.5 / std::sinh(beta * std::sqrt(0.5 * rho));
}

double normalization_c_exp_form(double beta, double rho) {
  require_positive(beta, "beta");
  require_positive(rho, "rho");
  return std::exp(-beta * std::sqrt(0.5 * rho)) /
         (-std::expm1(-beta * std::sqrt(2.0 * rho)));
}

double log_normalization_c(double beta, double rho) {
  require_positive(beta, "beta");
  require_positive(rho, "rho");
  const double x = beta * std::sqrt(0.5 * rho);
  return -x - std::log(-std::expm1(-2.0 * x));
}

double variance_sigma2(double beta, double rho) {
  require_positive(beta, "beta");
  require_positive(rho, "rho");
  return 1.0 / (2.0 * std::sqrt(2.0 * rho) * std::tanh(beta * std::sqrt(0.5 * rho)));
}

double log_loop_density(const DiscretePath& loop, double rho) {
  if (!loop.closed || loop.slices.size() < 2)
    throw std::domain_error("loop density needs a closed path with M >= 2");
  const Spring s(rho);
  const double dt = loop.dt;
  const double pref = s.log_prefactor(dt);
  const double cw = s.coth_w(dt);
  const double sw = s.csch_w(dt);
  double sum = 0.0;
  const std::size_t m = loop.slices.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double x = loop.slices[i];
    const double y = loop.at(i + 1);
    sum += pref - 0.5 * cw * (x * x + y * y) + sw * x * y;
  }
  return sum - log_normalization_c(dt * static_cast<double>(m), rho);
}

BridgeLaw::BridgeLaw(double beta, double rho, int slices, bool closed)
    : beta_(beta), spring_(rho), slices_(slices), closed_(closed) {
  require_positive(beta, "beta");
  if (slices < 2) throw std::domain_error("need at least two time slices");
}

DiscretePath BridgeLaw::sample_closed_loop(Rng& rng) const {
  if (!closed_) throw std::domain_error("closed loop requested from an open law");
  if (spring_.rho() <= 0.0)
    throw std::domain_error("closed loops need a confining weight (rho > 0)");
  std::normal_distribution<double> normal;
  const double x0 = std::sqrt(variance_sigma2(beta_, spring_.rho())) * normal(rng);
  DiscretePath bridge = sample_bridge(x0, x0, beta_, slices_, spring_.rho(), rng);
  bridge.slices.pop_back();
  bridge.closed = true;
  return bridge;
}

WeightedPath BridgeLaw::sample_open_segment(double x_start, double duration,
                                            Rng& rng) const {
  if (closed_) throw std::domain_error("open segment requested from a closed law");
  if (duration < 0.0) throw std::domain_error("negative duration");
  WeightedPath out;
  out.path.closed = false;
  out.path.dt = duration / slices_;
  out.path.slices.assign(static_cast<std::size_t>(slices_) + 1, x_start);
  if (duration == 0.0) return out;

  std::normal_distribution<double> normal;
  const double w = spring_.omega();
  const double dt = out.path.dt;
  const double decay = std::exp(-w * dt);
  const double sd = w == 0.0 ? std::sqrt(dt) : std::sqrt(-std::expm1(-2.0 * w * dt) / (2.0 * w));
  double x = x_start;
  for (int i = 1; i <= slices_; ++i) {
    x = x * decay + sd * normal(rng);
    out.path.slices[static_cast<std::size_t>(i)] = x;
  }
  out.weight = std::exp(-0.5 * w * duration + 0.5 * w * (x * x - x_start * x_start));
  return out;
}

DiscretePath sample_bridge(double u, double v, double duration, int intervals,
                           double rho, Rng& rng) {
  require_positive(duration, "bridge duration");
  if (intervals < 1) throw std::domain_error("bridge needs at least one interval");
  const Spring s(rho);
  std::normal_distribution<double> normal;
  DiscretePath out;
  out.closed = false;
  out.dt = duration / intervals;
  out.slices.resize(static_cast<std::size_t>(intervals) + 1);
  out.slices.front() = u;
  out.slices.back() = v;
  const double cw_step = s.coth_w(out.dt);
  const double sw_step = s.csch_w(out.dt);
  double x = u;
  for (int i = 1; i < intervals; ++i) {
    const double rest = out.dt * (intervals - i);
    const double precision = cw_step + s.coth_w(rest);
    const double mean = (sw_step * x + s.csch_w(rest) * v) / precision;
    x = mean + normal(rng) / std::sqrt(precision);
    out.slices[static_cast<std::size_t>(i)] = x;
  }
  return out;
}

void resample_segment(std::vector<double>& slices, std::size_t first,
                      std::size_t count, double dt, double centre,
                      const Spring& spring, Rng& rng) {
  const std::size_t m = slices.size();
  if (count == 0) return;
  if (count >= m) throw std::domain_error("segment longer than the loop");
  std::normal_distribution<double> normal;
  const double u = slices[first] - centre;
  const double v = slices[(first + count + 1) % m] - centre;
  const double cw_step = spring.coth_w(dt);
  const double sw_step = spring.csch_w(dt);
  double x = u;
  for (std::size_t i = 1; i <= count; ++i) {
    const double rest = dt * static_cast<double>(count + 1 - i);
    const double precision = cw_step + spring.coth_w(rest);
    const double mean = (sw_step * x + spring.csch_w(rest) * v) / precision;
    x = mean + normal(rng) / std::sqrt(precision);
    slices[(first + i) % m] = x + centre;
  }
}

}  // namespace wigner1d
