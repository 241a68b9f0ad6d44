#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "validation.hpp"
#include "wigner1d/gaussian.hpp"
#include "wigner1d/kernels.hpp"
#include "wigner1d/mcmc.hpp"
#include "wigner1d/observables.hpp"
#include "wigner1d/oracle.hpp"
#include "wigner1d/thermo.hpp"
#include "wigner1d/transfer.hpp"

#ifndef WIGNER1D_GIT_DESCRIBE
#define WIGNER1D_GIT_DESCRIBE "unknown"
#endif

namespace wigner1d::cli {

namespace {

using nlohmann::json;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// CSV with a one-line JSON metadata comment; rows are already formatted.
std::string csv(const json& meta, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  s << "# " << meta.dump() << '\n';
  for (std::size_t k = 0; k < header.size(); ++k) s << (k ? "," : "") << header[k];
  s << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << row[k];
    s << '\n';
  }
  return s.str();
}

std::string document(const json& meta, const json& data) {
  return json{{"meta", meta}, {"data", data}}.dump(2) + "\n";
}

struct Settings {
  double beta = 1.0;
  double rho = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;

  int ensemble = 4000;
  int slices = 64;
  std::string mode = "corrected";
  std::string proposal = "auto";
  int jackknife = 10;

  int n_min = 2;
  int n_max = 12;

  std::string route = "limit";
  int bins = 20;
  int images = 4;

  int n = 8;
  int samples = 2000;
  int thin = 0;
  int margin = 2;
  int chains = 1;
  int sweeps = 0;

  double x = 0.0;
  double y = 0.0;
  int w_max = 3;
  double tolerance = 1e-3;

  std::string observable = "two-point";
  int max_separation = 0;
  int fit_from = 2;
  double gap = 0.0;
  double length = 1.0;
  double offset = 0.0;

  double shift = 0.0;

  int grid = 100;
  bool quick = false;
};

class Runner {
 public:
  Runner() : app_("Numerics for the one-dimensional quantum jellium", "wigner1d") {
    app_.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app_.require_subcommand(1);
    app_.fallthrough(false);
    build();
  }

  int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    try {
      apply_config(args);
      std::reverse(args.begin(), args.end());
      app_.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << (active_ ? active_->help() : app_.help());
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app_.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      return fail(err, kUsage, "usage", e.what());
    } catch (const std::invalid_argument& e) {
      return fail(err, kUsage, "config", e.what());
    } catch (const json::exception& e) {
      return fail(err, kUsage, "config", e.what());
    }
    const CLI::App* sub = app_.get_subcommands().front();
    try {
      return handlers_.at(sub->get_name())(*sub, out);
    } catch (const CLI::ParseError& e) {
      return fail(err, kUsage, "usage", e.what());
    } catch (const std::invalid_argument& e) {
      return fail(err, kUsage, "usage", e.what());
    } catch (const std::domain_error& e) {
      return fail(err, kUsage, "usage", e.what());
    } catch (const ConvergenceError& e) {
      return fail(err, kNumerical, "convergence", e.what());
    } catch (const std::exception& e) {
      return fail(err, kNumerical, "numerical", e.what());
    }
  }

  std::string reference() const {
    std::ostringstream s;
    s << "# wigner1d command reference\n\n"
      << "Every flag can also be set from a JSON file given with `--config`; keys are flag\n"
      << "names without the leading dashes, unknown keys are rejected, and flags on the\n"
      << "command line override the file. The thread count follows `OMP_NUM_THREADS`.\n";
    for (const CLI::App* sub : app_.get_subcommands({})) {
      s << "\n## " << sub->get_name() << "\n\n" << sub->get_description() << "\n\n";
      s << "| flag | default | description |\n|---|---|---|\n";
      for (const CLI::Option* o : sub->get_options()) {
        if (o->get_name() == "--help") continue;
        std::string def = o->get_required() ? "required" : o->get_default_str();
        if (o->get_type_size() == 0) def = "off";
        s << "| `" << o->get_name() << "` | " << (def.empty() ? "" : "`" + def + "`") << " | "
          << o->get_description() << " |\n";
      }
    }
    return s.str();
  }

 private:
  using Handler = std::function<int(const CLI::App&, std::ostream&)>;

  using Preset = std::function<void(Settings&)>;

  // Settings are shared between subcommands; each one starts from its own
  // defaults, applied at registration (for the help text) and before parsing.
  CLI::App* command(const std::string& name, const std::string& description, Handler handler) {
    CLI::App* sub = app_.add_subcommand(name, description);
    s_ = Settings{};
    sub->add_option("--config", s_.config, "JSON file of flag values");
    sub->preparse_callback([this, sub, name](std::size_t) {
      active_ = sub;
      s_ = Settings{};
      if (const auto it = presets_.find(name); it != presets_.end()) it->second(s_);
    });
    handlers_[name] = std::move(handler);
    return sub;
  }

  void preset(CLI::App* sub, Preset p) {
    p(s_);
    presets_[sub->get_name()] = std::move(p);
  }

  template <class T>
  CLI::Option* option(CLI::App* sub, const std::string& flag, T& var, const std::string& help) {
    params_[sub->get_name()].push_back({flag, [&var] { return json(var); }});
    return sub->add_option("--" + flag, var, help)->capture_default_str();
  }

  void physics(CLI::App* sub) {
    option(sub, "beta", s_.beta, "inverse temperature")->required()->check(CLI::PositiveNumber);
    option(sub, "rho", s_.rho, "density")->required()->check(CLI::PositiveNumber);
  }
  void seeded(CLI::App* sub) { option(sub, "seed", s_.seed, "base random seed"); }
  void output(CLI::App* sub, const std::string& help = "write the artifact here instead of stdout") {
    sub->add_option("--out", s_.out, help);
  }
  void ensemble(CLI::App* sub) {
    option(sub, "ensemble", s_.ensemble, "number of Nystrom nodes S")->check(CLI::Range(2, 100000));
    option(sub, "slices", s_.slices, "time slices per loop M")->check(CLI::Range(2, 4096));
    option(sub, "mode", s_.mode, "crossing treatment: corrected or strict")
        ->check(CLI::IsMember({"corrected", "crossing_corrected", "strict"}));
    option(sub, "proposal", s_.proposal,
           "sampling spring: auto, bounded, nu or a number");
    option(sub, "jackknife", s_.jackknife, "leave-block-out blocks (0 disables)")
        ->check(CLI::Range(0, 1000));
  }
  void chain(CLI::App* sub) {
    option(sub, "n", s_.n, "particle number of the finite box")->check(CLI::Range(1, 100000));
    option(sub, "samples", s_.samples, "stored configurations")->check(CLI::PositiveNumber);
    option(sub, "thin", s_.thin, "sweeps between stored configurations (0 = 2 tau)")
        ->check(CLI::NonNegativeNumber);
    option(sub, "margin", s_.margin, "boundary cells dropped on each side")
        ->check(CLI::NonNegativeNumber);
    option(sub, "slices", s_.slices, "time slices per loop M")->check(CLI::Range(2, 4096));
    option(sub, "chains", s_.chains, "independent chains")->check(CLI::Range(1, 1024));
  }

  json meta(const CLI::App& sub, const json& results = json::object()) const {
    json params = json::object();
    for (const auto& [flag, get] : params_.at(sub.get_name())) params[flag] = get();
    json m{{"command", sub.get_name()},
           {"git_describe", WIGNER1D_GIT_DESCRIBE},
           {"seed", s_.seed},
           {"params", params},
           {"timestamp", utc_timestamp()},
           {"threads", kernels::thread_count()}};
    if (!results.empty()) m["results"] = results;
    return m;
  }

  void emit(const std::string& text, std::ostream& out) const {
    if (s_.out.empty()) {
      out << text;
      return;
    }
    std::ofstream file(s_.out, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot write " + s_.out);
    file << text;
  }

  double proposal_rho() const {
    if (s_.proposal == "auto") return suggested_proposal_rho(s_.beta, s_.rho);
    if (s_.proposal == "bounded") return bounded_proposal_rho(s_.beta, s_.rho, s_.slices);
    if (s_.proposal == "nu") return 0.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.proposal, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s_.proposal.size() || !(v >= 0.0))
      throw std::invalid_argument("--proposal must be auto, bounded, nu or a non-negative number");
    return v;
  }

  PathEnsemble make_ensemble() const {
    EnsembleConfig cfg;
    cfg.paths = s_.ensemble;
    cfg.slices = s_.slices;
    cfg.seed = s_.seed;
    cfg.proposal_rho = proposal_rho();
    return PathEnsemble::sample(s_.beta, s_.rho, cfg);
  }

  struct Limit {
    PathEnsemble ensemble;
    NystromOperator op;
    TransferSpectrum spectrum;
  };

  Limit make_limit(bool jackknife) const {
    auto e = make_ensemble();
    NystromOperator op(e, 1.0 / s_.rho, crossing_mode_from_string(s_.mode));
    auto sp = principal_eigenpair(op);
    if (jackknife && s_.jackknife > 1) jackknife_z0(op, sp, s_.jackknife);
    return {std::move(e), std::move(op), std::move(sp)};
  }

  json ensemble_summary(const Limit& l) const {
    return {{"proposal_rho", l.ensemble.proposal_rho()},
            {"effective_size", l.ensemble.effective_size()},
            {"z0", l.spectrum.z0},
            {"gap", std::isfinite(l.spectrum.gap) ? json(l.spectrum.gap) : json("inf")}};
  }

  ModelParams box() const { return ModelParams::centered(s_.beta, s_.rho, s_.n); }

  ChainConfig chain_config() const {
    ChainConfig cc;
    cc.slices = s_.slices;
    cc.seed = s_.seed;
    return cc;
  }

  SampleStream chain_samples() const {
    return sample_chains(box(), chain_config(), s_.chains, s_.samples, s_.thin);
  }

  static json stream_summary(const SampleStream& s) {
    return {{"tau", s.tau}, {"thinning", s.thinning}, {"tau_warning", s.tau_warning},
            {"configurations", s.size()}};
  }

  static std::vector<std::vector<std::string>> profile_rows(const DensityProfile& d) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < d.grid.size(); ++k)
      rows.push_back({number(d.grid[k]), number(d.values[k]), number(d.errors[k])});
    return rows;
  }

  static json profile_summary(const DensityProfile& d) {
    return {{"mass", d.mass},
            {"mass_error", d.mass_error},
            {"amplitude", d.amplitude},
            {"amplitude_error", d.amplitude_error}};
  }

  void build() {
    auto* constants = command("constants", "closed-form loop constants c and sigma^2",
                              [this](const CLI::App& sub, std::ostream& out) {
      const json data{{"beta", s_.beta},
                      {"rho", s_.rho},
                      {"lambda", 1.0 / s_.rho},
                      {"omega", std::sqrt(2.0 * s_.rho)},
                      {"c", normalization_c(s_.beta, s_.rho)},
                      {"c_exp_form", normalization_c_exp_form(s_.beta, s_.rho)},
                      {"log_c", log_normalization_c(s_.beta, s_.rho)},
                      {"sigma2", variance_sigma2(s_.beta, s_.rho)}};
      emit(document(meta(sub), data), out);
      return kOk;
    });
    physics(constants);
    output(constants);

    auto* spectrum = command("spectrum", "principal eigenpair and gap of the transfer operator",
                             [this](const CLI::App& sub, std::ostream& out) {
      const auto l = make_limit(true);
      json data = to_json(l.spectrum);
      data["proposal_rho"] = l.ensemble.proposal_rho();
      data["effective_size"] = l.ensemble.effective_size();
      data["nodes"] = l.ensemble.size();
      emit(document(meta(sub), data), out);
      return kOk;
    });
    physics(spectrum);
    ensemble(spectrum);
    seeded(spectrum);
    output(spectrum);

    auto* free = command("free-energy", "bulk free energy per particle",
                         [this](const CLI::App& sub, std::ostream& out) {
      const auto l = make_limit(true);
      emit(document(meta(sub), to_json(free_energy(s_.beta, s_.rho, l.spectrum))), out);
      return kOk;
    });
    physics(free);
    ensemble(free);
    seeded(free);
    output(free);

    auto* surface = command("surface", "finite-N corrections -(log Z_N + beta N f) (CSV)",
                            [this](const CLI::App& sub, std::ostream& out) {
      const auto e = make_ensemble();
      const NystromOperator op(e, 1.0 / s_.rho, crossing_mode_from_string(s_.mode));
      const auto r = surface_from_transfer(op, e, s_.n_min, s_.n_max, std::max(s_.jackknife, 2));
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < r.n.size(); ++k)
        rows.push_back({std::to_string(r.n[k]), number(r.log_z[k]), number(r.correction[k]),
                        number(r.correction_error[k])});
      json summary = to_json(r);
      for (const char* key : {"n", "log_z", "correction", "correction_error"}) summary.erase(key);
      emit(csv(meta(sub, summary), {"N", "log_z", "correction", "correction_error"}, rows), out);
      return kOk;
    });
    physics(surface);
    ensemble(surface);
    option(surface, "n-min", s_.n_min, "smallest N")->check(CLI::Range(1, 10000));
    option(surface, "n-max", s_.n_max, "largest N")->check(CLI::Range(1, 10000));
    seeded(surface);
    output(surface);

    auto* density = command("density", "one-particle density over one period (CSV)",
                            [this](const CLI::App& sub, std::ostream& out) {
      if (s_.route == "limit") {
        const auto l = make_limit(false);
        const auto md = limit_marginal_density(l.spectrum, l.op, l.ensemble, s_.bins);
        const auto d = one_particle_density(md, s_.images);
        json summary = profile_summary(d);
        summary.update(ensemble_summary(l));
        emit(csv(meta(sub, summary), {"x", "density", "error"}, profile_rows(d)), out);
      } else {
        const auto samples = chain_samples();
        const auto d = sampled_density(samples, box(), s_.margin, s_.bins);
        json summary = profile_summary(d);
        summary.update(stream_summary(samples));
        emit(csv(meta(sub, summary), {"x", "density", "error"}, profile_rows(d)), out);
      }
      return kOk;
    });
    preset(density, [](Settings& s) { s.proposal = "bounded"; });
    physics(density);
    option(density, "route", s_.route, "limit (transfer operator) or mcmc (finite box)")
        ->check(CLI::IsMember({"limit", "mcmc"}));
    option(density, "bins", s_.bins, "bins per period")->check(CLI::Range(1, 10000));
    option(density, "images", s_.images, "periodic images summed on the limit route")
        ->check(CLI::Range(1, 1000));
    option(density, "ensemble", s_.ensemble, "number of Nystrom nodes S")->check(CLI::Range(2, 100000));
    option(density, "mode", s_.mode, "crossing treatment: corrected or strict")
        ->check(CLI::IsMember({"corrected", "crossing_corrected", "strict"}));
    option(density, "proposal", s_.proposal, "sampling spring: auto, bounded, nu or a number");
    chain(density);
    seeded(density);
    output(density);

    auto* rdm = command("rdm", "off-diagonal one-particle matrix by winding number (CSV)",
                        [this](const CLI::App& sub, std::ostream& out) {
      const auto l = make_limit(false);
      RdmOptions opt;
      opt.w_max = s_.w_max;
      opt.samples = s_.samples;
      opt.tolerance = s_.tolerance;
      opt.seed = s_.seed;
      const auto m = one_particle_matrix(s_.x, s_.y, l.spectrum, l.op, l.ensemble, opt);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t w = 0; w < m.by_winding.size(); ++w)
        rows.push_back({std::to_string(w + 1), number(m.by_winding[w]), number(m.by_winding_error[w])});
      rows.push_back({"total", number(m.value), number(m.error)});
      json summary = ensemble_summary(l);
      summary["truncation_bound"] = std::isfinite(m.truncation_bound) ? json(m.truncation_bound) : json("inf");
      summary["flagged"] = m.flagged;
      emit(csv(meta(sub, summary), {"winding", "value", "error"}, rows), out);
      return kOk;
    });
    preset(rdm, [](Settings& s) { s.proposal = "bounded"; });
    physics(rdm);
    option(rdm, "x", s_.x, "first argument")->required();
    option(rdm, "y", s_.y, "second argument")->required();
    option(rdm, "w-max", s_.w_max, "largest winding number")->check(CLI::Range(1, 100));
    option(rdm, "tolerance", s_.tolerance, "flag when the truncation bound exceeds this");
    option(rdm, "ensemble", s_.ensemble, "number of Nystrom nodes S")->check(CLI::Range(2, 100000));
    option(rdm, "slices", s_.slices, "time slices per loop M")->check(CLI::Range(2, 4096));
    option(rdm, "proposal", s_.proposal, "sampling spring: auto, bounded, nu or a number");
    option(rdm, "samples", s_.samples, "chain draws per site and winding")->check(CLI::Range(2, 100000000));
    seeded(rdm);
    output(rdm);

    auto* corr = command("correlations", "two-point function or count tails from MCMC (CSV)",
                         [this](const CLI::App& sub, std::ostream& out) {
      const auto p = box();
      const auto samples = chain_samples();
      if (s_.observable == "two-point") {
        const int max_sep = s_.max_separation > 0 ? s_.max_separation : s_.n - 2 * s_.margin - 1;
        auto c = truncated_two_point(samples, p, s_.margin, max_sep, 20, s_.fit_from);
        if (s_.gap > 0.0) c.reference_rate = s_.gap * s_.rho;
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < c.value.size(); ++k)
          rows.push_back({std::to_string(c.separation[k]), number(c.value[k]), number(c.error[k])});
        json summary = to_json(c);
        for (const char* key : {"separation", "value", "error"}) summary.erase(key);
        summary.update(stream_summary(samples));
        emit(csv(meta(sub, summary), {"separation", "value", "error"}, rows), out);
      } else {
        const double start = p.a() + s_.margin * p.lambda() + s_.offset;
        const auto t = particle_count_tails(samples, p, start, s_.length, s_.margin);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < t.n.size(); ++k)
          rows.push_back({std::to_string(t.n[k]), number(t.tail[k]), number(t.tail_error[k])});
        json summary = to_json(t);
        for (const char* key : {"n", "tail", "tail_error"}) summary.erase(key);
        summary.update(stream_summary(samples));
        emit(csv(meta(sub, summary), {"n", "tail", "error"}, rows), out);
      }
      return kOk;
    });
    preset(corr, [](Settings& s) { s.samples = 4000; });
    physics(corr);
    option(corr, "observable", s_.observable, "two-point or count-tails")
        ->check(CLI::IsMember({"two-point", "count-tails"}));
    option(corr, "max-separation", s_.max_separation, "largest separation in cells (0 = all)")
        ->check(CLI::NonNegativeNumber);
    option(corr, "fit-from", s_.fit_from, "first separation used in the decay fit")
        ->check(CLI::PositiveNumber);
    option(corr, "gap", s_.gap, "spectral gap for the reference rate (0 = none)")
        ->check(CLI::NonNegativeNumber);
    option(corr, "length", s_.length, "interval length for count tails")->check(CLI::NonNegativeNumber);
    option(corr, "offset", s_.offset, "interval start past the margin")->check(CLI::NonNegativeNumber);
    chain(corr);
    seeded(corr);
    output(corr);

    auto* sym = command("symmetry-test", "shift detector and ergodic averages on MCMC samples (CSV)",
                        [this](const CLI::App& sub, std::ostream& out) {
      const auto p = box();
      const auto samples = shifted(chain_samples(), s_.shift);
      const auto d = detect_shift(samples, p, s_.margin);
      const auto e = ergodic_average_y(samples, p, s_.margin);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < e.running_mean.size(); ++k)
        rows.push_back({std::to_string(k + 1), number(e.running_mean[k]), number(e.band[k])});
      json summary{{"injected", s_.shift},    {"shift", d.shift},       {"shift_error", d.error},
                   {"resultant", d.resultant}, {"mean_y", e.mean},       {"mean_y_error", e.error},
                   {"flagged", e.flagged}};
      summary.update(stream_summary(samples));
      emit(csv(meta(sub, summary), {"n", "running_mean", "band"}, rows), out);
      return kOk;
    });
    physics(sym);
    option(sym, "shift", s_.shift, "displacement u added to every position");
    chain(sym);
    seeded(sym);
    output(sym);

    auto* sample = command("sample", "MCMC configurations (CSV) with a JSON sidecar",
                           [this](const CLI::App& sub, std::ostream& out) {
      if (s_.out.empty()) throw std::invalid_argument("sample needs --out");
      if (s_.thin < 1) throw std::invalid_argument("--thin must be at least 1");
      if (s_.sweeps < s_.thin) throw std::invalid_argument("--sweeps must be at least --thin");
      const auto p = box();
      const int per_chain = s_.sweeps / s_.thin;
      std::vector<SampleStream> streams(static_cast<std::size_t>(s_.chains));
      std::vector<json> diagnostics(streams.size());
#pragma omp parallel for schedule(dynamic)
      for (int c = 0; c < s_.chains; ++c) {
        ChainConfig cc = chain_config();
        cc.seed = derive_seed(s_.seed, static_cast<std::uint64_t>(c));
        Chain chain(p, cc);
        streams[static_cast<std::size_t>(c)] = sample_configurations(chain, per_chain, s_.thin);
        streams[static_cast<std::size_t>(c)].chain_seeds = {cc.seed};
        diagnostics[static_cast<std::size_t>(c)] = chain.diagnostics();
      }
      std::vector<std::vector<std::string>> rows;
      std::vector<std::string> header;
      for (int j = 1; j <= s_.n; ++j) header.push_back("x" + std::to_string(j));
      json chains = json::array();
      for (std::size_t c = 0; c < streams.size(); ++c) {
        const auto& s = streams[c];
        for (std::size_t k = 0; k < s.size(); ++k) {
          std::vector<std::string> row;
          for (double v : s.configuration(k)) row.push_back(number(v));
          rows.push_back(std::move(row));
        }
        chains.push_back({{"seed", s.chain_seeds.front()}, {"tau", s.tau},
                          {"tau_warning", s.tau_warning}, {"diagnostics", diagnostics[c]}});
      }
      const json m = meta(sub);
      emit(csv(m, header, rows), out);
      auto sidecar = std::filesystem::path(s_.out).replace_extension(".json");
      std::ofstream file(sidecar, std::ios::binary);
      if (!file) throw std::invalid_argument("cannot write " + sidecar.string());
      file << document(m, {{"configurations", rows.size()}, {"chains", chains}});
      return kOk;
    });
    preset(sample, [](Settings& s) { s.thin = 1; });
    physics(sample);
    option(sample, "n", s_.n, "particle number")->required()->check(CLI::Range(1, 100000));
    option(sample, "sweeps", s_.sweeps, "sweeps per chain after thermalization")->required();
    option(sample, "thin", s_.thin, "sweeps between stored configurations");
    option(sample, "slices", s_.slices, "time slices per loop M")->check(CLI::Range(2, 4096));
    option(sample, "chains", s_.chains, "independent chains")->check(CLI::Range(1, 1024));
    seeded(sample);
    output(sample, "CSV path; the sidecar goes next to it with a .json extension");

    auto* oracle = command("oracle", "exact diagonalization for N = 1 or 2 (JSON)",
                           [this](const CLI::App& sub, std::ostream& out) {
      const auto r = diagonalize_small(box(), s_.grid);
      json data{{"n", r.n_particles},         {"log_z", r.log_z},
                {"log_z_error", r.log_z_error}, {"log_z_coarse", r.log_z_coarse},
                {"log_z_fine", r.log_z_fine},   {"grid_points", r.grid_points},
                {"grid", r.grid},               {"rho1", r.rho1}};
      if (!r.rho2.empty()) data["rho2"] = r.rho2;
      emit(document(meta(sub), data), out);
      return kOk;
    });
    physics(oracle);
    option(oracle, "n", s_.n, "particle number, 1 or 2")->required()->check(CLI::IsMember({1, 2}));
    option(oracle, "grid", s_.grid, "interior grid points per dimension")->check(CLI::Range(40, 4000));
    output(oracle);

    auto* validate = command("validate", "run the cross-check suite and report pass/fail",
                             [this](const CLI::App& sub, std::ostream& out) {
      validation::Options opt;
      opt.quick = s_.quick;
      opt.seed = s_.seed;
      const auto results = validation::run(validation::all_checks(), opt, &out);
      if (!s_.out.empty()) {
        json data = json::array();
        for (const auto& r : results) data.push_back(validation::to_json(r));
        emit(document(meta(sub), data), out);
      }
      return validation::all_passed(results) ? kOk : kValidationFailed;
    });
    params_["validate"].push_back({"quick", [this] { return json(s_.quick); }});
    validate->add_flag("--quick", s_.quick, "CI-scale sizes");
    seeded(validate);
    output(validate, "also write a JSON report here");

    command("reference", "print this flag reference as markdown",
            [this](const CLI::App&, std::ostream& out) {
      out << reference();
      return kOk;
    });
  }

  // Config keys become flags inserted right after the subcommand name, so
  // flags given on the command line come later and win.
  void apply_config(std::vector<std::string>& args) {
    if (args.empty()) return;
    CLI::App* sub = nullptr;
    for (CLI::App* s : app_.get_subcommands({}))
      if (s->get_name() == args.front()) sub = s;
    if (!sub) return;
    std::string path;
    for (std::size_t k = 1; k < args.size(); ++k) {
      if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
      if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config " + path);
    const json j = json::parse(in);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
      const CLI::Option* o = sub->get_option_no_throw("--" + key);
      if (!o || key == "config" || key == "help")
        throw std::invalid_argument("unknown config key '" + key + "' for " + sub->get_name());
      if (o->get_type_size() == 0) {
        if (!value.is_boolean()) throw std::invalid_argument("config key '" + key + "' must be a boolean");
        if (value.get<bool>()) tokens.push_back("--" + key);
        continue;
      }
      tokens.push_back("--" + key);
      if (value.is_string())
        tokens.push_back(value.get<std::string>());
      else if (value.is_number() || value.is_boolean())
        tokens.push_back(value.dump());
      else
        throw std::invalid_argument("config key '" + key + "' must be a scalar");
    }
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  }

  static int fail(std::ostream& err, int code, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
  }

  Settings s_;
  CLI::App app_;
  const CLI::App* active_ = nullptr;
  std::map<std::string, Handler> handlers_;
  std::map<std::string, Preset> presets_;
  std::map<std::string, std::vector<std::pair<std::string, std::function<json()>>>> params_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner;
  return runner.run(args, out, err);
}

std::string reference_markdown() { return Runner().reference(); }

}  // namespace wigner1d::cli
