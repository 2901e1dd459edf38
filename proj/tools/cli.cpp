#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "polymer_lab/fluctuation.hpp"
#include "polymer_lab/mc_harness.hpp"
#include "polymer_lab/moment_oracle.hpp"
#include "polymer_lab/report_io.hpp"
#include "polymer_lab/scaling.hpp"
#include "polymer_lab/srw_kernel.hpp"

namespace plab::cli {
namespace {

struct Options {
  int dim = 1;
  std::vector<int> N;
  std::optional<double> eps;
  std::optional<double> c;
  int replicas = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  bool check = false;
  int nmax = 50;
  double eps_prob = 0.1;
};

double resolved_eps(const Options& o) { return o.eps ? *o.eps : (o.dim == 2 ? 0.25 : 0.05); }

const std::vector<int>& require_grid(const Options& o) {
  if (o.N.empty()) throw std::invalid_argument("--N is required");
  return o.N;
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.d = o.dim;
  cfg.eps = resolved_eps(o);
  cfg.grid = require_grid(o);
  cfg.replicas = o.replicas;
  cfg.master_seed = o.seed;
  cfg.eps_prob = o.eps_prob;
  cfg.c_override = o.c;
  cfg.out_dir = o.out;
  cfg.workers = o.threads;
  validate(cfg);
  return cfg;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// Writes `<out>/<name>` when --out is set, and always prints the JSON.
void emit(const Options& o, const std::string& name, const Json& j, std::ostream& out) {
  const std::string text = dump(j);
  if (!o.out.empty()) write_text_file(std::filesystem::path(o.out) / name, text);
  out << text;
}

int finish(const Options& o, bool pass, std::ostream& err, const char* what) {
  if (o.check && !pass) {
    err << "check failed: " << what << "\n";
    return kExitCheck;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckRow {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
};

int cmd_kernel_check(const Options& o, std::ostream& out, std::ostream& err) {
  require_dim(o.dim);
  if (o.nmax < 2) throw std::invalid_argument("--nmax must be at least 2");
  const int d = o.dim;
  const auto kernel = TransitionKernel::build(d, o.nmax);

  CheckRow norm{"normalization", 0.0, 1e-12};
  CheckRow sym{"symmetry", 0.0, 1e-15};
  CheckRow odd{"odd_moments_vanish", 0.0, 1e-12};
  for (int n = 1; n <= o.nmax; ++n) {
    const Slice s = kernel.slice(n);
    const auto layer = kernel.layer(n);
    double mass = 0.0, m1 = 0.0, a1 = 0.0, m3 = 0.0, a3 = 0.0;
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      const LatticePoint x = s.point(idx);
      const double p = layer[idx];
      mass += p;
      const double x1 = x.x;
      m1 += x1 * p;
      a1 += std::abs(x1) * p;
      m3 += x1 * x1 * x1 * p;
      a3 += std::abs(x1 * x1 * x1) * p;
      sym.max_error = std::max(sym.max_error, std::abs(p - kernel.at(n, {-x.x, -x.y})));
      if (d == 2) {
        sym.max_error = std::max(sym.max_error, std::abs(p - kernel.at(n, {x.y, x.x})));
        sym.max_error = std::max(sym.max_error, std::abs(p - kernel.at(n, {x.x, -x.y})));
      }
    }
    norm.max_error = std::max(norm.max_error, std::abs(mass - 1.0));
    odd.max_error = std::max({odd.max_error, a1 > 0.0 ? std::abs(m1) / a1 : 0.0, a3 > 0.0 ? std::abs(m3) / a3 : 0.0});
  }

  CheckRow coll{"collision_identity", 0.0, 1e-12};
  for (int n = 1; 2 * n <= o.nmax; ++n) {
    coll.max_error = std::max(coll.max_error, std::abs(collision_mass(kernel, n) - kernel.at(2 * n, {0, 0})));
  }

  CheckRow mom{"moment_closed_forms", 0.0, 1e-9};
  std::vector<MomentKind> kinds{MomentKind::Second, MomentKind::Fourth};
  if (d == 2) kinds.insert(kinds.end(), {MomentKind::PartialSecond, MomentKind::PartialFourth, MomentKind::Cross});
  for (int n = 1; n <= std::min(o.nmax, 50); ++n) {
    for (auto k : kinds) {
      mom.max_error = std::max(mom.max_error, rel_diff(moment(kernel, {k, n}), moment_closed_form(d, {k, n})));
    }
  }

  CheckRow shifted{"shifted_moment_closed_forms", 0.0, 1e-9};
  for (int m = 1; m <= std::min(o.nmax, 30); ++m) {
    for (int y1 = -6; y1 <= 6; ++y1) {
      for (int y2 = (d == 2 ? -6 : 0); y2 <= (d == 2 ? 6 : 0); ++y2) {
        if (std::abs(y1) + std::abs(y2) > 6) continue;
        for (int order : {2, 4}) {
          const LatticePoint y{y1, y2};
          shifted.max_error = std::max(shifted.max_error, rel_diff(shifted_moment(kernel, m, y, order),
                                                                   shifted_moment_closed_form(d, m, y, order)));
        }
      }
    }
  }

  bool all = true;
  Json checks = Json::array();
  for (const auto* row : {&norm, &sym, &odd, &coll, &mom, &shifted}) {
    const bool pass = row->max_error <= row->tolerance;
    all = all && pass;
    checks.push_back(
        {{"name", row->name}, {"max_error", row->max_error}, {"tolerance", row->tolerance}, {"pass", pass}});
  }
  const auto env = residual_envelope(kernel, 1, o.nmax);
  Json j;
  j["command"] = "kernel-check";
  j["config"] = {{"dim", d}, {"nmax", o.nmax}};
  j["checks"] = checks;
  j["residual_envelope"] = {{"uniform", env.uniform}, {"spatial", env.spatial}};
  j["peak_constant"] = peak_constant(kernel);
  j["pass"] = all;
  emit(o, "kernel-check.json", j, out);
  return finish(o, all, err, "kernel identities");
}

int cmd_moments(const Options& o, std::ostream& out, std::ostream& err) {
  require_dim(o.dim);
  if (o.nmax < 1) throw std::invalid_argument("--nmax must be at least 1");
  const int d = o.dim;
  const auto kernel = TransitionKernel::build(d, o.nmax);
  std::vector<MomentKind> kinds{MomentKind::Second, MomentKind::Fourth};
  if (d == 2) kinds.insert(kinds.end(), {MomentKind::PartialSecond, MomentKind::PartialFourth, MomentKind::Cross});
  Json rows = Json::array();
  double worst = 0.0;
  for (int n = 1; n <= o.nmax; ++n) {
    for (auto k : kinds) {
      const double v = moment(kernel, {k, n});
      const double cf = moment_closed_form(d, {k, n});
      const double e = rel_diff(v, cf);
      worst = std::max(worst, e);
      rows.push_back({{"n", n}, {"kind", to_string(k)}, {"value", v}, {"closed_form", cf}, {"rel_error", e}});
    }
  }
  Json j;
  j["command"] = "moments";
  j["config"] = {{"dim", d}, {"nmax", o.nmax}};
  j["moments"] = rows;
  j["max_rel_error"] = worst;
  emit(o, "moments.json", j, out);
  return finish(o, worst <= 1e-9, err, "moment closed forms");
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  require_dim(o.dim);
  const int d = o.dim;
  const double eps = resolved_eps(o);
  const auto& grid = require_grid(o);
  std::optional<ScalingRule> rule;
  if (!o.c) rule = ScalingRule::make(d, eps);
  bool agree = true;
  Json points = Json::array();
  for (int N : grid) {
    if (N < 1 || N > kExpansionCap[d]) {
      throw std::invalid_argument("oracle N must lie in [1, " + std::to_string(kExpansionCap[d]) + "]");
    }
    const double c = o.c ? *o.c : rule->c_of(N);
    const auto cm = centered_moments(N, c, d);
    const auto z = ez2_expansion(N, c, d);
    const auto k = ek2_expansion(N, c, d);
    Json p;
    p["d"] = d;
    p["N"] = N;
    p["c"] = c;
    p["ez2"] = cm.ez2;
    p["ek2"] = cm.ek2;
    p["var_Z"] = cm.var_z;
    p["var_K"] = cm.var_k;
    p["z_method"] = cm.z_method;
    p["k_method"] = cm.k_method;
    p["per_order_terms"] = {{"Z", z.terms}, {"K", k.terms}, {"Z_truncated", z.truncated}, {"K_truncated", k.truncated}};
    if (d == 1 || N >= 2) {
      const auto cal = calibrate_point(N, c, d);
      p["calibrated_A"] = {{"rate", cal.rate},
                           {"A_Z", cal.a_z},
                           {"A_K", cal.a_k},
                           {"A_Z_per_order", cal.a_z_per_order},
                           {"A_K_per_order", cal.a_k_per_order}};
    } else {
      p["calibrated_A"] = nullptr;
    }
    const double dz = rel_diff(cm.ez2, z.total());
    const double dk = rel_diff(cm.ek2, k.total());
    p["method_agreement"] = {{"ez2_rel_diff", dz}, {"ek2_rel_diff", dk}};
    agree = agree && dz <= 1e-10 && dk <= 1e-10;
    points.push_back(p);
  }
  Json j;
  j["command"] = "oracle";
  j["config"] = {{"dim", d}, {"N", grid}, {"eps", eps}, {"c", optional_json(o.c)}};
  j["points"] = points;
  emit(o, "oracle.json", j, out);
  return finish(o, agree, err, "oracle method agreement");
}

int cmd_clt(const Options& o, std::ostream& out, std::ostream& err) {
  require_dim(o.dim);
  const int d = o.dim;
  const double eps = resolved_eps(o);
  const auto& grid = require_grid(o);
  const auto rule = ScalingRule::make(d, eps);
  Json points = Json::array();
  bool decreasing = true;
  std::optional<double> prev;
  for (int N : grid) {
    if (N < (d == 2 ? 2 : 1) || N > kMaxTime) throw std::invalid_argument("clt N out of range");
    const double c = o.c ? *o.c : rule.c_of(N);
    validate_disorder(c);
    Json p;
    p["d"] = d;
    p["N"] = N;
    p["eps"] = eps;
    p["c"] = c;
    const bool has_a = c > 0.0;
    const double a = has_a ? rule.a_of(N, c) : 0.0;
    p["a"] = has_a ? Json(a) : Json(nullptr);
    p["sigma2"] = limit_variance(rule, N);
    p["sigma2_target"] = d == 2 ? Json(sigma2_target(d)) : Json(nullptr);
    p["sigma2_numeric_reference"] = sigma2_target(d);
    p["linear_var"] = linear_variance_exact(N, c, d);
    const int cap = d == 1 ? kDifferenceCap[1] : kExpansionCap[2];
    if (N <= cap) {
      const double rv = remainder_variance_exact(N, c, d);
      p["remainder_var"] = rv;
      if (has_a) {
        const double scaled = a * a * rv;
        p["remainder_var_scaled"] = scaled;
        if (prev && !(scaled < *prev)) decreasing = false;
        prev = scaled;
      } else {
        p["remainder_var_scaled"] = nullptr;
      }
    } else {
      p["remainder_var"] = nullptr;
      p["remainder_var_scaled"] = nullptr;
    }
    points.push_back(p);
  }
  Json j;
  j["command"] = "clt";
  j["config"] = {{"dim", d}, {"N", grid}, {"eps", eps}, {"c", optional_json(o.c)}};
  j["points"] = points;
  emit(o, "clt.json", j, out);
  return finish(o, decreasing, err, "scaled remainder variance not strictly decreasing");
}

// ---------------------------------------------------------------------------

Json point_header(const GridPointRun& run, const ScalingRule& rule) {
  Json p;
  p["N"] = run.N;
  p["c"] = run.c;
  p["a"] = run.c > 0.0 ? Json(run.a) : Json(nullptr);
  p["sigma2"] = limit_variance(rule, run.N);
  return p;
}

void write_runs(const Options& o, const ExperimentConfig& cfg, const std::vector<GridPointRun>& runs,
                const Json& summary, std::ostream& out) {
  if (!o.out.empty()) {
    write_text_file(std::filesystem::path(o.out) / "replicas.csv", replicas_csv(cfg.d, runs));
    write_text_file(std::filesystem::path(o.out) / "summary.json", dump(summary));
  }
  out << dump(summary);
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = experiment_config(o);
  const auto rule = ScalingRule::make(cfg.d, cfg.eps);
  const auto runs = run_replicas(cfg);
  bool pass = true;
  Json points = Json::array();
  for (const auto& run : runs) {
    Json p = point_header(run, rule);
    const auto zs = z_moments(run);
    p["moments"] = to_json(zs);
    p["exceedance"] = empirical_exceedance(run, cfg.eps_prob);
    p["normality"] = to_json(normality_report(run, p["sigma2"].get<double>()));
    if (std::abs(zs.mean - 1.0) > 5.0 * zs.mean_stderr) pass = false;
    points.push_back(p);
  }
  Json j;
  j["command"] = "simulate";
  j["config"] = to_json(cfg);
  j["points"] = points;
  write_runs(o, cfg, runs, j, out);
  return finish(o, pass, err, "mean of Z more than 5 standard errors from 1");
}

int cmd_concentration(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = experiment_config(o);
  for (int N : cfg.grid) {
    if (N > kExpansionCap[cfg.d]) {
      throw std::invalid_argument("concentration needs exact moments; N is limited to " +
                                  std::to_string(kExpansionCap[cfg.d]));
    }
  }
  const auto rule = ScalingRule::make(cfg.d, cfg.eps);
  const auto runs = run_replicas(cfg);
  bool violation = false;
  int inversions = 0;
  std::optional<double> prev;
  Json points = Json::array();
  for (const auto& run : runs) {
    const auto s = concentration_report(run, cfg.eps_prob, cfg.d);
    violation = violation || s.violation;
    if (prev && s.exceedance > *prev) ++inversions;
    prev = s.exceedance;
    Json p = point_header(run, rule);
    p["concentration"] = to_json(s);
    points.push_back(p);
  }
  Json j;
  j["command"] = "concentration";
  j["config"] = to_json(cfg);
  j["points"] = points;
  j["trend"] = {{"inversions", inversions}, {"nonincreasing_up_to_one_inversion", inversions <= 1}};
  j["chebyshev_violation"] = violation;
  write_runs(o, cfg, runs, j, out);
  return finish(o, !violation && inversions <= 1, err, "exceedance trend or Chebyshev bound");
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  o.threads = std::max(1, omp_get_num_procs());

  CLI::App app{"Directed polymer in a +-1 random environment: kernels, exact moments, Monte Carlo."};
  app.name("polymer-lab");
  app.set_config("--config", "", "Flat `key = value` file; keys are flag names without dashes. Flags win.");
  app.fallthrough();
  app.require_subcommand(1, 1);

  app.add_option("--dim", o.dim, "Lattice dimension (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
  app.add_option("--N", o.N, "Polymer length; repeat or comma-separate for a grid")->delimiter(',');
  app.add_option("--eps", o.eps, "Scaling exponent eps (default 0.05 for d=1, 0.25 for d=2)");
  app.add_option("--c", o.c, "Disorder strength; overrides the scaling rule")->check(CLI::Range(0.0, 1.0));
  app.add_option("--replicas", o.replicas, "Environments per grid point")->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads (env POLYMER_LAB_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("--check", o.check, "Exit with status 3 when the subcommand's self-check fails");
  app.add_option("--nmax", o.nmax, "Kernel horizon for kernel-check / moments")->capture_default_str();
  app.add_option("--eps-prob", o.eps_prob, "Concentration threshold on |msd/N - 1|")->capture_default_str();

  using Handler = std::function<int(const Options&, std::ostream&, std::ostream&)>;
  struct Sub {
    const char* name;
    const char* help;
    const char* flags;
    Handler run;
  };
  const std::vector<Sub> subs{
      {"kernel-check", "Check walk-kernel identities and report local-CLT constants", "--dim --nmax --out --check",
       cmd_kernel_check},
      {"moments", "Walk moments against their closed forms", "--dim --nmax --out --check", cmd_moments},
      {"oracle", "Exact E Z^2, E K^2, per-order collision terms and calibrated constants",
       "--dim --N --eps | --c, --out --check", cmd_oracle},
      {"simulate", "Monte Carlo replicas: CSV per replica plus JSON summary",
       "--dim --N --eps | --c, --replicas --seed --threads --eps-prob --out --check", cmd_simulate},
      {"clt", "Exact fluctuation variances (linear part, remainder, limit)", "--dim --N --eps | --c, --out --check",
       cmd_clt},
      {"concentration", "Empirical exceedance of |msd/N - 1| against the exact Chebyshev bound",
       "--dim --N --eps | --c, --replicas --seed --threads --eps-prob --out --check", cmd_concentration},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->footer(std::string("Flags: ") + s.flags + "\nAll flags may also be given in a --config file.");
    handles.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  // CLI11 drops env values that fail validation, so the variable is read here
  if (app.count("--threads") == 0) {
    if (const char* env = std::getenv("POLYMER_LAB_THREADS")) {
      const std::string_view v(env);
      int t = 0;
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), t);
      if (ec != std::errc{} || ptr != v.data() + v.size() || t < 1) {
        err << "error: POLYMER_LAB_THREADS must be a positive integer, got '" << v << "'\n";
        return kExitValidation;
      }
      o.threads = t;
    }
  }
  omp_set_num_threads(o.threads);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!handles[i]->parsed()) continue;
    try {
      return subs[i].run(o, out, err);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::out_of_range& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::domain_error& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitFailure;
    }
  }
  return kExitValidation;
}

}  // namespace plab::cli
