#include "validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "wigner1d/gaussian.hpp"
#include "wigner1d/model.hpp"
#include "wigner1d/observables.hpp"
#include "wigner1d/oracle.hpp"
#include "wigner1d/pathspace.hpp"
#include "wigner1d/thermo.hpp"
#include "wigner1d/transfer.hpp"

namespace wigner1d::validation {

namespace {

using nlohmann::json;

std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

void append(std::string& s, const std::string& part) {
  if (!s.empty()) s += "; ";
  s += part;
}

// Trapezoid rule on [-h, h]; spectrally accurate for Gaussian integrands.
template <class F>
double trapezoid(F f, double half_width, int n) {
  const double h = 2.0 * half_width / n;
  double s = 0.5 * (f(-half_width) + f(half_width));
  for (int i = 1; i < n; ++i) s += f(-half_width + i * h);
  return s * h;
}

DiscretePath coarsen(const DiscretePath& fine, int factor) {
  DiscretePath p;
  p.closed = false;
  p.dt = fine.dt * factor;
  for (std::size_t i = 0; i < fine.slices.size(); i += static_cast<std::size_t>(factor))
    p.slices.push_back(fine.slices[i]);
  return p;
}

PathEnsemble tilted_ensemble(double beta, double rho, int paths, int slices, std::uint64_t seed,
                             double proposal) {
  EnsembleConfig cfg;
  cfg.paths = paths;
  cfg.slices = slices;
  cfg.seed = seed;
  cfg.proposal_rho = proposal;
  return PathEnsemble::sample(beta, rho, cfg);
}

// Spectral gap of the crossing-corrected operator at (beta, rho).
double empirical_gap(double beta, double rho, int paths, std::uint64_t seed) {
  const auto e = tilted_ensemble(beta, rho, paths, 64, seed, suggested_proposal_rho(beta, rho));
  const NystromOperator op(e, 1.0 / rho, CrossingMode::crossing_corrected);
  return principal_eigenpair(op).gap;
}

// Data section of a CLI artifact: everything after the metadata line of a
// CSV, or the "data" member of a JSON document.
std::string data_section(const std::string& text) {
  if (text.rfind("# ", 0) == 0) return text.substr(text.find('\n') + 1);
  return json::parse(text).at("data").dump();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CheckResult start(int criterion, const std::string& name) {
  CheckResult r;
  r.criterion = criterion;
  r.name = name;
  return r;
}

}  // namespace

CheckResult baxter_identity(const Options& opt) {
  auto r = start(1, "Baxter identity");
  Rng rng(opt.seed);
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int trials = 10000;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int n = count(rng);
    const double rho = 0.2 + 3.0 * unif(rng);
    const double a = -5.0 + 10.0 * unif(rng);
    const ModelParams p(1.0, rho, a, a + n / rho);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = p.a() + (p.b() - p.a()) * unif(rng);
    std::sort(x.begin(), x.end());
    const double raw = potential_raw(x, p);
    const double bax = potential_baxter(x, p);
    worst = std::max(worst, std::abs(raw - bax) / std::max(std::abs(raw), std::abs(bax)));
  }
  r.passed = worst <= 1e-10;
  r.detail = format("worst relative difference %.2e over %d configurations", worst, trials);
  r.data = {{"worst_relative", worst}, {"configurations", trials}, {"budget_seconds", 1.0}};
  return r;
}

CheckResult closed_forms(const Options& opt) {
  auto r = start(2, "closed forms");
  Rng rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
  double semigroup = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double s = pos(rng), t = pos(rng), x = u(rng), y = u(rng), rho = 0.1 + 2.0 * pos(rng);
    const double v = trapezoid(
        [&](double z) { return mehler(s, x, z, rho) * mehler(t, z, y, rho); }, 12.0, 6000);
    semigroup = std::max(semigroup, std::abs(v - mehler(s + t, x, y, rho)));
  }
  double trace = 0.0;
  for (double beta : {0.5, 1.0, 4.0})
    for (double rho : {0.5, 1.0, 2.0}) {
      const double v = trapezoid([&](double x) { return mehler(beta, x, x, rho); }, 12.0, 6000);
      trace = std::max(trace, std::abs(v - normalization_c(beta, rho)));
    }

  const double beta = 1.0, rho = 2.0;
  const BridgeLaw law(beta, rho, 64, true);
  const int draws = opt.quick ? 20000 : 100000;
  double m2 = 0.0, m4 = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double g = law.sample_closed_loop(rng).slices[0];
    m2 += g * g;
    m4 += g * g * g * g;
  }
  m2 /= draws;
  m4 /= draws;
  const double se = std::sqrt((m4 - m2 * m2) / draws);
  const double var = variance_sigma2(beta, rho);
  const double z = (m2 - var) / se;

  r.passed = semigroup < 1e-8 && trace < 1e-10 && std::abs(z) < 4.0;
  r.detail = format("semigroup %.1e, trace %.1e, sigma^2 %.5f vs %.5f (%.2f SE, %d draws)",
                    semigroup, trace, m2, var, z, draws);
  r.data = {{"semigroup_error", semigroup}, {"trace_error", trace}, {"sigma2_sampled", m2},
            {"sigma2_se", se}, {"sigma2", var}, {"budget_seconds", 60.0}};
  return r;
}

CheckResult free_bridge_oracle(const Options& opt) {
  auto r = start(3, "free-bridge oracle");
  const Box box{0.0, 2.0};
  const std::vector<double> x{0.5, 1.2};
  const double t = 1.0;
  const double exact = karlin_mcgregor_noncollision(x, x, t, box);
  const ChamberSpec spec{0.0, 2.0, 1.0, 2};
  const int fine = 128;
  const std::vector<int> grids{16, 32, 64, 128};
  const long n = opt.quick ? 100000 : 1000000;
  Rng rng(opt.seed);
  double corrected = 0.0, corrected2 = 0.0;
  std::vector<double> strict(grids.size(), 0.0);
  for (long k = 0; k < n; ++k) {
    // nested grids: a strict pass on a fine grid implies a pass on every coarser one
    const std::vector<DiscretePath> paths{sample_bridge(x[0], x[0], t, fine, 0.0, rng),
                                          sample_bridge(x[1], x[1], t, fine, 0.0, rng)};
    for (std::size_t g = 0; g < grids.size(); ++g) {
      const int factor = fine / grids[g];
      const std::vector<DiscretePath> coarse{coarsen(paths[0], factor), coarsen(paths[1], factor)};
      strict[g] += in_chamber_direct(coarse, spec, CrossingMode::strict);
      if (grids[g] == 64) {
        const double w = in_chamber_direct(coarse, spec, CrossingMode::crossing_corrected);
        corrected += w;
        corrected2 += w * w;
      }
    }
  }
  const double mean = corrected / static_cast<double>(n);
  const double se = std::sqrt((corrected2 / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
  std::vector<double> bias;
  for (double s : strict) bias.push_back(s / static_cast<double>(n) - exact);
  bool monotone = true;
  for (std::size_t g = 1; g < bias.size(); ++g) monotone = monotone && bias[g] < bias[g - 1];
  const double z = (mean - exact) / se;
  r.passed = std::abs(z) < 3.0 && monotone;
  r.detail = format("corrected M=64 %.5f vs KM %.5f (%.2f SE); strict bias M=16..128: %.4f %.4f %.4f %.4f",
                    mean, exact, z, bias[0], bias[1], bias[2], bias[3]);
  r.data = {{"karlin_mcgregor", exact}, {"corrected", mean}, {"corrected_se", se},
            {"strict_bias", bias}, {"grids", grids}, {"samples", n}, {"budget_seconds", 300.0}};
  return r;
}

CheckResult partition_function(const Options& opt) {
  auto r = start(4, "partition function vs exact diagonalization");
  const int paths = opt.quick ? 4000 : 20000;
  const std::vector<std::pair<double, double>> points{{1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0}};
  const auto mode = CrossingMode::crossing_corrected;
  bool ok = true;
  json rows = json::array();
  for (const auto& [beta, rho] : points) {
    const auto e = tilted_ensemble(beta, rho, paths, 64, opt.seed, suggested_proposal_rho(beta, rho));
    const NystromOperator op(e, 1.0 / rho, mode);
    const auto amps = amplitude_series(op, boundary_vector_f(e, mode), boundary_vector_g(e, mode), 2,
                                       nullptr, 10);
    for (int n = 1; n <= 2; ++n) {
      const auto p = ModelParams::centered(beta, rho, n);
      const auto oracle = diagonalize_small(p, n == 1 ? 400 : 40);
      const double log_z = partition_function_log(p, amps[static_cast<std::size_t>(n - 1)].log_value);
      const double rel = (log_z - oracle.log_z) / std::abs(oracle.log_z);
      const double tol = n == 1 ? 0.02 : 0.05;
      ok = ok && std::abs(rel) < tol;
      append(r.detail, format("(%g,%g) N=%d %+.2f%%", beta, rho, n, 100.0 * rel));
      rows.push_back({{"beta", beta}, {"rho", rho}, {"n", n}, {"log_z", log_z},
                      {"log_z_error", amps[static_cast<std::size_t>(n - 1)].log_error},
                      {"oracle", oracle.log_z}, {"relative", rel}});
    }
  }
  r.passed = ok;
  r.data = {{"paths", paths}, {"slices", 64}, {"rows", rows}, {"budget_seconds", 900.0}};
  return r;
}

CheckResult surface_corrections(const Options& opt) {
  auto r = start(5, "surface corrections");
  const double beta = 1.0, rho = 1.0;
  const int paths = opt.quick ? 3000 : 4000;
  const auto e = tilted_ensemble(beta, rho, paths, 64, opt.seed, suggested_proposal_rho(beta, rho));
  const NystromOperator op(e, 1.0 / rho, CrossingMode::crossing_corrected);
  const double gap = principal_eigenpair(op).gap;
  const auto s = surface_from_transfer(op, e, 2, 12, 10);
  const double ratio = s.rate / gap;
  const bool rate_ok = std::isfinite(s.rate) && ratio >= 0.5 && ratio <= 2.0;
  const bool s_ok = std::isfinite(s.s) && s.s_error < 0.1 * std::abs(s.s);
  r.passed = rate_ok && s_ok && !s.flagged;
  r.detail = format("rate %.3f vs gap %.3f (ratio %.2f); s = %.4f +- %.4f%s", s.rate, gap, ratio,
                    s.s, s.s_error, s.flagged ? "; tail flagged" : "");
  r.data = to_json(s);
  r.data["gap"] = gap;
  r.data["paths"] = paths;
  r.data["budget_seconds"] = 1800.0;
  return r;
}

CheckResult low_density_limit(const Options& opt) {
  auto r = start(6, "low-density limit of z0");
  const double beta = 1.0;
  const int paths = opt.quick ? 1000 : 4000;
  const std::vector<double> rhos{1e-3, 0.1, 0.5, 1.0, 2.0};
  EigenOptions eo;
  eo.z1_max_iter = 0;
  std::vector<double> z0;
  for (double rho : rhos) {
    const auto e = tilted_ensemble(beta, rho, paths, 64, opt.seed, suggested_proposal_rho(beta, rho));
    const NystromOperator op(e, 1.0 / rho, CrossingMode::crossing_corrected);
    z0.push_back(principal_eigenpair(op, eo).z0);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < z0.size(); ++k) monotone = monotone && z0[k] <= z0[k - 1];
  r.passed = z0[0] > 0.99 && monotone;
  for (std::size_t k = 0; k < z0.size(); ++k) append(r.detail, format("rho=%g z0=%.5f", rhos[k], z0[k]));
  r.data = {{"rho", rhos}, {"z0", z0}, {"paths", paths}, {"budget_seconds", 600.0}};
  return r;
}

CheckResult symmetry_breaking(const Options& opt) {
  auto r = start(7, "symmetry breaking");
  const double beta = 4.0, rho = 1.0;
  const int paths = opt.quick ? 8000 : 20000;
  const int bins = 10;
  const int slices = 64;

  const auto e = tilted_ensemble(beta, rho, paths, slices, opt.seed,
                                 bounded_proposal_rho(beta, rho, slices));
  EigenOptions eo;
  eo.z1_max_iter = 200;
  auto limit = [&] {
    const NystromOperator op(e, 1.0 / rho, CrossingMode::crossing_corrected);
    const auto sp = principal_eigenpair(op, eo);
    return one_particle_density(limit_marginal_density(sp, op, e, bins), 4);
  }();

  const auto p = ModelParams::centered(beta, rho, 8);
  const int margin = 2;
  ChainConfig cc;
  cc.seed = opt.seed;
  const auto samples = sample_chains(p, cc, 1, opt.quick ? 1500 : 3000);
  const auto mc = sampled_density(samples, p, margin, bins);

  const bool mass_ok = std::abs(limit.mass - 1.0) <= 1e-3 + 3.0 * limit.mass_error;
  int outliers = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < limit.values.size(); ++k) {
    const double z = std::abs(limit.values[k] - mc.values[k]) / std::hypot(limit.errors[k], mc.errors[k]);
    worst = std::max(worst, z);
    outliers += z > 3.0;
  }
  const bool pointwise_ok = outliers == 0;

  bool shift_ok = true;
  json shifts = json::array();
  std::string shift_text;
  for (double frac : {0.0, 0.25, 0.5, 1.0}) {
    const double u = frac * p.lambda();
    const auto d = detect_shift(shifted(samples, u), p, margin);
    const double target = std::fmod(u, p.lambda());
    double dist = std::abs(d.shift - target);
    dist = std::min(dist, p.lambda() - dist);
    const bool ok = dist <= std::max(4.0 * d.error, 0.02 * p.lambda());
    shift_ok = shift_ok && ok;
    shift_text += format(" %.2f->%.3f", frac, d.shift / p.lambda());
    shifts.push_back({{"injected", u}, {"detected", d.shift}, {"error", d.error}, {"ok", ok}});
  }

  // significant crystallinity: the estimate must clear the threshold by two standard errors
  const bool amplitude_ok = limit.amplitude - 2.0 * limit.amplitude_error > 0.5;
  r.passed = amplitude_ok && mass_ok && pointwise_ok && shift_ok;
  // the independent finite-N oracle puts the amplitude itself below the threshold
  r.expected_failure = !amplitude_ok && mass_ok && pointwise_ok && shift_ok &&
                       mc.amplitude + 3.0 * mc.amplitude_error < 0.5;
  r.detail = format("amplitude %.3f +- %.3f (MCMC N=8: %.3f +- %.3f, needs > 0.5) %s; mass %.4f +- %.4f %s; "
                    "pointwise worst %.2f SE %s; shifts/lambda%s %s",
                    limit.amplitude, limit.amplitude_error, mc.amplitude, mc.amplitude_error,
                    amplitude_ok ? "ok" : "FAIL", limit.mass, limit.mass_error, mass_ok ? "ok" : "FAIL",
                    worst, pointwise_ok ? "ok" : "FAIL", shift_text.c_str(), shift_ok ? "ok" : "FAIL");
  r.data = {{"limit", to_json(limit)}, {"mcmc", to_json(mc)}, {"shifts", shifts},
            {"paths", paths}, {"proposal_rho", e.proposal_rho()}, {"mcmc_samples", samples.size()},
            {"budget_seconds", 1800.0}};
  return r;
}

CheckResult correlation_decay(const Options& opt) {
  auto r = start(8, "correlation decay");
  const double beta = 1.0, rho = 1.0;
  const double gap = empirical_gap(beta, rho, 4000, opt.seed);
  const int n = 24, margin = 6;
  const auto p = ModelParams::centered(beta, rho, n);
  ChainConfig cc;
  cc.seed = opt.seed;
  cc.slices = 32;
  const auto samples = sample_chains(p, cc, 1, opt.quick ? 4000 : 8000);
  const auto c = truncated_two_point(samples, p, margin, n - 2 * margin - 1);
  int nonzero_far = 0;
  for (std::size_t k = 7; k < c.value.size(); ++k) nonzero_far += std::abs(c.value[k]) > 3.0 * c.error[k];
  const double reference = gap * rho;
  const double ratio = c.rate / reference;
  const bool rate_ok = c.fitted && ratio >= 0.5 && ratio <= 2.0;
  r.passed = nonzero_far == 0 && rate_ok;
  r.detail = format("%d of %zu separations > 6 lambda beyond 3 SE; rate %.3f +- %.3f (%d points) vs gap*rho %.3f",
                    nonzero_far, c.value.size() - 7, c.rate, c.rate_error, c.fit_points, reference);
  r.data = to_json(c);
  r.data["gap"] = gap;
  r.data["samples"] = samples.size();
  r.data["budget_seconds"] = 1800.0;
  return r;
}

CheckResult count_concentration(const Options& opt) {
  auto r = start(9, "particle-number concentration");
  const double beta = 2.0, rho = 1.0;
  const int n = 24, margin = 4;
  const double length = 8.0;
  const auto p = ModelParams::centered(beta, rho, n);
  ChainConfig cc;
  cc.seed = opt.seed;
  cc.slices = 32;
  const auto samples = sample_chains(p, cc, 1, opt.quick ? 8000 : 20000, 8);
  // pool interval placements at several phases relative to the lattice
  std::vector<double> tail(3, 0.0);
  long observations = 0;
  for (double phase : {0.0, 0.25, 0.5, 0.75}) {
    const auto t = particle_count_tails(samples, p, p.a() + margin * p.lambda() + phase * p.lambda(),
                                        length, margin);
    for (std::size_t k = 0; k < 3; ++k) tail[k] += t.tail[k] * static_cast<double>(t.observations);
    observations += t.observations;
  }
  for (double& v : tail) v /= static_cast<double>(observations);
  const bool observed = tail[2] > 0.0;
  const bool decreasing = tail[0] > tail[1] && tail[1] > tail[2];
  double r2 = 0.0, slope = 0.0;
  if (observed) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int k = 1; k <= 3; ++k) {
      const double x = k * k, y = std::log(tail[static_cast<std::size_t>(k - 1)]);
      sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
    }
    const double cxx = sxx - sx * sx / 3.0, cxy = sxy - sx * sy / 3.0, cyy = syy - sy * sy / 3.0;
    slope = cxy / cxx;
    r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  }
  r.passed = observed && decreasing && r2 > 0.9;
  r.detail = format("P(|N_I - rho|I|| >= n) = %.2e %.2e %.2e over %ld placements; n^2 fit slope %.3f R^2 %.4f",
                    tail[0], tail[1], tail[2], observations, slope, r2);
  if (!observed) append(r.detail, "n = 3 never observed");
  r.data = {{"tail", tail}, {"observations", observations}, {"slope", slope}, {"r_squared", r2},
            {"length", length}, {"samples", samples.size()}, {"budget_seconds", 900.0}};
  return r;
}

CheckResult determinism(const Options& opt) {
  auto r = start(10, "determinism");
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wigner1d-determinism-" + std::to_string(opt.seed));
  std::filesystem::create_directories(dir);
  const std::string seed = std::to_string(opt.seed);
  const std::vector<std::vector<std::string>> commands{
      {"constants", "--beta", "1", "--rho", "2"},
      {"spectrum", "--beta", "1", "--rho", "1", "--ensemble", "400", "--seed", seed},
      {"free-energy", "--beta", "1", "--rho", "1", "--ensemble", "400", "--seed", seed},
      {"surface", "--beta", "1", "--rho", "1", "--ensemble", "400", "--n-max", "6", "--seed", seed},
      {"density", "--beta", "2", "--rho", "1", "--ensemble", "800", "--seed", seed},
      {"density", "--route", "mcmc", "--beta", "2", "--rho", "1", "--n", "6", "--samples", "100",
       "--seed", seed},
      {"rdm", "--beta", "1", "--rho", "1", "--x", "0.2", "--y", "0.5", "--ensemble", "400",
       "--samples", "50", "--seed", seed},
      {"correlations", "--beta", "1", "--rho", "1", "--n", "8", "--samples", "1000", "--thin", "2",
       "--slices", "16", "--margin", "2", "--seed", seed},
      {"correlations", "--observable", "count-tails", "--beta", "1", "--rho", "1", "--n", "8",
       "--samples", "100", "--margin", "2", "--length", "2", "--seed", seed},
      {"symmetry-test", "--beta", "2", "--rho", "1", "--n", "8", "--samples", "100", "--shift",
       "0.25", "--seed", seed},
      {"oracle", "--beta", "1", "--rho", "1", "--n", "1", "--grid", "60"},
      {"sample", "--beta", "1", "--rho", "1", "--n", "4", "--sweeps", "200", "--thin", "4",
       "--seed", seed, "--out", (dir / "sample.csv").string()},
  };
  int mismatches = 0;
  for (const auto& cmd : commands) {
    std::string data[2];
    for (int run = 0; run < 2; ++run) {
      std::ostringstream out, err;
      const int code = cli::run_cli(cmd, out, err);
      if (code != 0) throw std::runtime_error(cmd.front() + " failed: " + err.str());
      data[run] = cmd.front() == "sample"
                      ? data_section(slurp(dir / "sample.csv")) + data_section(slurp(dir / "sample.json"))
                      : data_section(out.str());
    }
    if (data[0] != data[1]) {
      ++mismatches;
      append(r.detail, cmd.front() + " differs");
    }
  }
  std::filesystem::remove_all(dir);
  r.passed = mismatches == 0;
  if (r.passed) r.detail = format("%zu commands reproduce byte-identical data sections", commands.size());
  r.data = {{"commands", commands.size()}, {"mismatches", mismatches}};
  return r;
}

std::vector<Check> all_checks() {
  return {{1, baxter_identity},     {2, closed_forms},      {3, free_bridge_oracle},
          {4, partition_function},  {5, surface_corrections}, {6, low_density_limit},
          {7, symmetry_breaking},   {8, correlation_decay},   {9, count_concentration},
          {10, determinism}};
}

std::vector<CheckResult> run(const std::vector<Check>& checks, const Options& opt, std::ostream* log) {
  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = check.run(opt);
    } catch (const std::exception& e) {
      r = start(check.criterion, "criterion " + std::to_string(check.criterion));
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!opt.quick && r.data.contains("budget_seconds") &&
        r.seconds > r.data["budget_seconds"].get<double>()) {
      r.passed = false;
      r.expected_failure = false;
      append(r.detail, format("runtime %.0f s over budget", r.seconds));
    }
    if (log) *log << summary_line(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

std::string status(const CheckResult& r) {
  if (r.passed) return "PASS";
  return r.expected_failure ? "FAIL (expected)" : "FAIL";
}

std::string summary_line(const CheckResult& r) {
  return format("[%s] %2d %s: %s (%.1f s)", status(r).c_str(), r.criterion, r.name.c_str(),
                r.detail.c_str(), r.seconds);
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed || r.expected_failure; });
}

json to_json(const CheckResult& r) {
  return {{"criterion", r.criterion}, {"name", r.name},     {"passed", r.passed},
          {"expected_failure", r.expected_failure},         {"status", status(r)},
          {"detail", r.detail},       {"seconds", r.seconds}, {"data", r.data}};
}

}  // namespace wigner1d::validation
