#include "wigner1d/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace wigner1d {

OracleResolutionError::OracleResolutionError(double coarse, double fine)
    : std::runtime_error("grid too coarse: log Z " + std::to_string(coarse) +
                         " (coarse) vs " + std::to_string(fine) + " (fine)"),
      coarse_(coarse),
      fine_(fine) {}

namespace {

constexpr double kMaxDisagreement = 0.05;

double log_sum_exp_neg(const Eigen::VectorXd& energies, double beta) {
  const double e0 = energies.minCoeff();
  double s = 0.0;
  for (Eigen::Index k = 0; k < energies.size(); ++k) s += std::exp(-beta * (energies[k] - e0));
  return -beta * e0 + std::log(s);
}

struct Level {
  double log_z;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // empty unless requested
};

Level one_body_level(double a, double b, const std::function<double(double)>& v,
                     double beta, int n, bool with_vectors) {
  const double h = (b - a) / (n + 1);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = 1.0 / (h * h) + v(a + (i + 1) * h);
  sub.setConstant(-0.5 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub,
                                with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  Level out{log_sum_exp_neg(solver.eigenvalues(), beta), solver.eigenvalues(), {}};
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

// Pair (i, j), i < j, of interior grid indices mapped to a dense row.
struct ChamberIndex {
  int n;
  int operator()(int i, int j) const { return i * n - i * (i + 1) / 2 + (j - i - 1); }
  int size() const { return n * (n - 1) / 2; }
};

Level two_body_level(const ModelParams& p, int n, bool with_vectors) {
  const double a = p.a();
  const double h = (p.b() - a) / (n + 1);
  const ChamberIndex idx{n};
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(idx.size(), idx.size());
  const double off = -0.5 / (h * h);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int r = idx(i, j);
      const double x[2] = {a + (i + 1) * h, a + (j + 1) * h};
      hmat(r, r) = 2.0 / (h * h) + potential_raw(x, p);
      // neighbours on the collision diagonal or outside the box are Dirichlet zeros
      if (i + 1 < j) {
        hmat(r, idx(i + 1, j)) = off;
        hmat(r, idx(i, j - 1)) = off;
      }
      if (i > 0) hmat(r, idx(i - 1, j)) = off;
      if (j + 1 < n) hmat(r, idx(i, j + 1)) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      hmat, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  Level out{log_sum_exp_neg(solver.eigenvalues(), p.beta()), solver.eigenvalues(), {}};
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

std::vector<double> thermal_weights(const Eigen::VectorXd& energies, double beta,
                                    double log_z) {
  std::vector<double> w(static_cast<std::size_t>(energies.size()));
  for (Eigen::Index k = 0; k < energies.size(); ++k)
    w[static_cast<std::size_t>(k)] = std::exp(-beta * energies[k] - log_z);
  return w;
}

void extrapolate(OracleResult& r, double h_coarse, double h_fine) {
  const double ratio = h_fine * h_fine / (h_coarse * h_coarse - h_fine * h_fine);
  r.log_z = r.log_z_fine + (r.log_z_fine - r.log_z_coarse) * ratio;
  r.log_z_error = std::abs(r.log_z - r.log_z_fine);
  if (std::abs(r.log_z_fine - r.log_z_coarse) >
      kMaxDisagreement * std::max(std::abs(r.log_z_fine), 1e-300))
    throw OracleResolutionError(r.log_z_coarse, r.log_z_fine);
}

int fine_points(int coarse) { return coarse + coarse / 2; }

}  // namespace

OracleResult diagonalize_one_body(double a, double b,
                                  const std::function<double(double)>& potential,
                                  double beta, int grid_points) {
  if (grid_points < 40) throw std::domain_error("oracle needs at least 40 grid points");
  if (!(a < b)) throw std::domain_error("oracle box requires a < b");
  OracleResult r;
  r.n_particles = 1;
  r.grid_points = grid_points;
  const int n_fine = 2 * grid_points + 1;
  const Level coarse = one_body_level(a, b, potential, beta, grid_points, true);
  const Level fine = one_body_level(a, b, potential, beta, n_fine, false);
  r.log_z_coarse = coarse.log_z;
  r.log_z_fine = fine.log_z;
  const double h = (b - a) / (grid_points + 1);
  extrapolate(r, h, (b - a) / (n_fine + 1));

  const auto w = thermal_weights(coarse.energies, beta, coarse.log_z);
  r.grid.resize(static_cast<std::size_t>(grid_points));
  r.rho1.assign(r.grid.size(), 0.0);
  for (int i = 0; i < grid_points; ++i) {
    r.grid[static_cast<std::size_t>(i)] = a + (i + 1) * h;
    double s = 0.0;
    for (int k = 0; k < grid_points; ++k) {
      const double psi = coarse.vectors(i, k);
      s += w[static_cast<std::size_t>(k)] * psi * psi;
    }
    r.rho1[static_cast<std::size_t>(i)] = s / h;
  }
  return r;
}

OracleResult diagonalize_small(const ModelParams& p, int grid_points) {
  if (grid_points < 40) throw std::domain_error("oracle needs at least 40 grid points");
  const int n = p.n_particles();
  if (n == 1) {
    const ModelParams copy = p;
    return diagonalize_one_body(
        p.a(), p.b(),
        [copy](double x) {
          const double pos[1] = {x};
          return potential_raw(pos, copy);
        },
        p.beta(), grid_points);
  }
  if (n != 2) throw std::domain_error("exact diagonalization supports N <= 2 only");

  OracleResult r;
  r.n_particles = 2;
  r.grid_points = grid_points;
  const int n_fine = fine_points(grid_points);
  const Level coarse = two_body_level(p, grid_points, true);
  const Level fine = two_body_level(p, n_fine, false);
  r.log_z_coarse = coarse.log_z;
  r.log_z_fine = fine.log_z;
  const double h = (p.b() - p.a()) / (grid_points + 1);
  extrapolate(r, h, (p.b() - p.a()) / (n_fine + 1));

  const auto w = thermal_weights(coarse.energies, p.beta(), coarse.log_z);
  const auto g = static_cast<std::size_t>(grid_points);
  r.grid.resize(g);
  for (std::size_t i = 0; i < g; ++i) r.grid[i] = p.a() + static_cast<double>(i + 1) * h;
  r.rho2.assign(g * g, 0.0);
  const ChamberIndex idx{grid_points};
  for (int i = 0; i < grid_points; ++i) {
    for (int j = i + 1; j < grid_points; ++j) {
      const int row = idx(i, j);
      double s = 0.0;
      for (int k = 0; k < idx.size(); ++k) {
        const double psi = coarse.vectors(row, k);
        s += w[static_cast<std::size_t>(k)] * psi * psi;
      }
      const double density = s / (h * h);
      r.rho2[static_cast<std::size_t>(i) * g + static_cast<std::size_t>(j)] = density;
      r.rho2[static_cast<std::size_t>(j) * g + static_cast<std::size_t>(i)] = density;
    }
  }
  r.rho1.assign(g, 0.0);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) r.rho1[i] += r.rho2[i * g + j] * h;
  return r;
}

double box_heat_kernel(double t, double x, double y, const Box& box) {
  if (!(t > 0.0)) throw std::domain_error("heat kernel time must be positive");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
  auto phi = [&](double z) { return norm * std::exp(-z * z / (2.0 * t)); };
  if (!box.bounded()) {
    if (std::isfinite(box.a)) return phi(y - x) - phi(y + x - 2.0 * box.a);
    if (std::isfinite(box.b)) return phi(y - x) - phi(2.0 * box.b - x - y);
    return phi(y - x);
  }
  if (x <= box.a || x >= box.b || y <= box.a || y >= box.b) return 0.0;
  const double len = box.b - box.a;
  double sum = phi(y - x) - phi(y + x - 2.0 * box.a);
  for (int n = 1;; ++n) {
    const double shift = 2.0 * n * len;
    const double terms[4] = {phi(y - x + shift), phi(y - x - shift),
                             phi(y + x - 2.0 * box.a + shift),
                             phi(y + x - 2.0 * box.a - shift)};
    sum += terms[0] + terms[1] - terms[2] - terms[3];
    if (*std::max_element(terms, terms + 4) < 1e-14 * norm) break;
  }
  return sum;
}

double karlin_mcgregor(std::span<const double> starts, std::span<const double> ends,
                       double t, const Box& box) {
  if (starts.size() != ends.size() || starts.empty())
    throw std::domain_error("start and end counts differ");
  for (std::size_t i = 1; i < starts.size(); ++i)
    if (starts[i] < starts[i - 1])
      throw std::domain_error("start points must be increasing");
  const auto n = static_cast<Eigen::Index>(starts.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = box_heat_kernel(t, starts[static_cast<std::size_t>(i)],
                                ends[static_cast<std::size_t>(j)], box);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m.fullPivLu().determinant();
}

double karlin_mcgregor_noncollision(std::span<const double> starts,
                                    std::span<const double> ends, double t,
                                    const Box& box) {
  double free = 1.0;
  for (std::size_t i = 0; i < starts.size(); ++i)
    free *= box_heat_kernel(t, starts[i], ends[i], Box{});
  return karlin_mcgregor(starts, ends, t, box) / free;
}

}  // namespace wigner1d
