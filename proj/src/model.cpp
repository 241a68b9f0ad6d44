#include "wigner1d/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wigner1d {

namespace {

bool on_lattice(double x, double lambda) {
  const double k = x / lambda;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

void check_sorted_in_box(std::span<const double> x, const ModelParams& p) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || x[i] < p.a() || x[i] > p.b())
      throw std::domain_error("position " + std::to_string(i) +
                              " outside the box");
    if (i > 0 && x[i] < x[i - 1])
      throw std::domain_error("positions are not sorted");
  }
}

}  // namespace

ModelParams::ModelParams(double beta, double rho, double a, double b,
                         bool thermodynamic_limit)
    : beta_(beta),
      rho_(rho),
      lambda_(1.0 / rho),
      a_(a),
      b_(b),
      n_(0),
      thermodynamic_limit_(thermodynamic_limit) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::domain_error("beta must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::domain_error("rho must be positive");
  if (!(a < b)) throw std::domain_error("box requires a < b");
  const double n = rho * (b - a);
  const double rounded = std::round(n);
  if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw std::domain_error("rho * (b - a) must be a positive integer");
  n_ = static_cast<int>(rounded);
  if (thermodynamic_limit && !(on_lattice(a, lambda_) && on_lattice(b, lambda_)))
    throw std::domain_error("box endpoints must lie on lambda * Z");
}

ModelParams ModelParams::centered(double beta, double rho, int n_particles) {
  if (n_particles < 1) throw std::domain_error("need at least one particle");
  const double half = 0.5 * n_particles / rho;
  return ModelParams(beta, rho, -half, half);
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("model config must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "beta" && key != "rho" && key != "a" && key != "b")
      throw std::invalid_argument("unknown model key '" + key + "'");
  }
  return ModelParams(j.at("beta").get<double>(), j.at("rho").get<double>(),
                     j.at("a").get<double>(), j.at("b").get<double>());
}

nlohmann::json ModelParams::to_json() const {
  return {{"beta", beta_}, {"rho", rho_}, {"a", a_}, {"b", b_}};
}

Lattice::Lattice(const ModelParams& p) {
  sites_.resize(static_cast<std::size_t>(p.n_particles()));
  for (std::size_t j = 0; j < sites_.size(); ++j)
    sites_[j] = p.a() + p.lambda() * (static_cast<double>(j) + 0.5);
}

double potential_raw(std::span<const double> x, const ModelParams& p) {
  check_sorted_in_box(x, p);
  const double a = p.a();
  const double b = p.b();
  const double rho = p.rho();
  double pair = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k) pair -= std::abs(x[j] - x[k]);
  // int_a^b |x_j - x| dx = ((x_j - a)^2 + (b - x_j)^2) / 2
  double cross = 0.0;
  for (double xj : x) cross += 0.5 * ((xj - a) * (xj - a) + (b - xj) * (b - xj));
  // int int_{[a,b]^2} |x - x'| = (b - a)^3 / 3
  const double len = b - a;
  const double self = -0.5 * rho * rho * len * len * len / 3.0;
  return pair + rho * cross + self;
}

double potential_baxter(std::span<const double> x, const ModelParams& p) {
  if (x.size() != static_cast<std::size_t>(p.n_particles()))
    throw std::domain_error("configuration length does not match N");
  const double rho = p.rho();
  const double lambda = p.lambda();
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double m = p.a() + lambda * (static_cast<double>(j) + 0.5);
    sum += (x[j] - m) * (x[j] - m);
  }
  return rho * sum + static_cast<double>(x.size()) / (12.0 * rho);
}

}  // namespace wigner1d
