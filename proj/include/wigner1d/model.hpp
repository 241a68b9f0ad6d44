#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace wigner1d {

/// Physical configuration of a neutral jellium in the box [a, b].
///
/// The particle number is fixed by neutrality, N = rho * (b - a), which must be
/// a positive integer. When `thermodynamic_limit` is set the box endpoints must
/// also lie on the lattice lambda * Z, the only sequence of boxes along which
/// the infinite-volume limits are taken.
class ModelParams {
 public:
  ModelParams(double beta, double rho, double a, double b,
              bool thermodynamic_limit = false);

  /// Box [-N lambda / 2, N lambda / 2] for N particles at density rho.
  static ModelParams centered(double beta, double rho, int n_particles);

  double beta() const { return beta_; }
  double rho() const { return rho_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  double b() const { return b_; }
  int n_particles() const { return n_; }
  bool thermodynamic_limit() const { return thermodynamic_limit_; }

  /// Expects exactly the keys {beta, rho, a, b}; anything else is rejected.
  static ModelParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  double beta_;
  double rho_;
  double lambda_;
  double a_;
  double b_;
  int n_;
  bool thermodynamic_limit_;
};

/// Background lattice m_j = a + lambda (j - 1/2), j = 1..N, stored 0-based.
class Lattice {
 public:
  explicit Lattice(const ModelParams& p);

  std::span<const double> sites() const { return sites_; }
  double site(int j) const { return sites_.at(static_cast<std::size_t>(j)); }
  std::size_t size() const { return sites_.size(); }

 private:
  std::vector<double> sites_;
};

/// Potential energy from its definition: pair repulsion -|x_j - x_k|, the
/// background cross term and the background self-energy, all integrals in
/// closed form. `x` must be sorted and inside [a, b].
double potential_raw(std::span<const double> x, const ModelParams& p);

/// Quadratic-form rewrite rho * sum (x_j - m_j)^2 + N / (12 rho).
double potential_baxter(std::span<const double> x, const ModelParams& p);

}  // namespace wigner1d
