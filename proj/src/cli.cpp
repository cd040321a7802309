#include "eulerlab/cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "eulerlab/classify.hpp"
#include "eulerlab/field.hpp"
#include "eulerlab/verify.hpp"

namespace eulerlab::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes either to a file or to the provided stream when path is "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      os_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

struct SeedFlags {
  double a0 = 1.0, a1 = 0.0, xi = 0.0, b0 = 0.0, b1 = 0.0, alpha = 1.0;
  double K = 1.0, gamma = 2.0, mu = 0.0;
  double rtol = 1e-10, atol = 1e-12;
  double collapse_threshold = 1e-8;
  std::string y_equation = "ode28";

  [[nodiscard]] SeedData seed() const { return SeedData(a0, a1, xi, b0, b1, alpha); }
  [[nodiscard]] ModelParams params() const { return ModelParams(K, gamma, mu); }
  [[nodiscard]] IntegrateOptions integrate_options() const {
    IntegrateOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    opt.collapse_threshold_factor = collapse_threshold;
    opt.y_form = y_form();
    return opt;
  }
  [[nodiscard]] YEquationForm y_form() const {
    if (y_equation == "ode28") return YEquationForm::GammaScaled;
    if (y_equation == "theorem") return YEquationForm::Unscaled;
    throw std::invalid_argument("--y-equation must be ode28 or theorem");
  }
};

void add_seed_flags(CLI::App* cmd, SeedFlags& f, bool with_integration) {
  cmd->add_option("--a0", f.a0, "a(0), positive")->required();
  cmd->add_option("--a1", f.a1, "da/dt(0)");
  cmd->add_option("--xi", f.xi, "scale-equation constant");
  cmd->add_option("--b0", f.b0, "b(0)");
  cmd->add_option("--b1", f.b1, "db/dt(0)");
  cmd->add_option("--alpha", f.alpha, "rho(0,0), nonnegative");
  cmd->add_option("--K", f.K, "pressure constant");
  cmd->add_option("--gamma", f.gamma, "adiabatic exponent, > 1")->required();
  cmd->add_option("--mu", f.mu, "viscosity (Navier-Stokes residual)");
  if (with_integration) {
    cmd->add_option("--rtol", f.rtol, "relative tolerance");
    cmd->add_option("--atol", f.atol, "absolute tolerance");
    cmd->add_option("--collapse-threshold", f.collapse_threshold,
                    "collapse event threshold as a fraction of a0");
    cmd->add_option("--y-equation", f.y_equation,
                    "y-equation form: ode28 (default) or theorem")
        ->check(CLI::IsMember({"ode28", "theorem"}));
  }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int do_classify(const SeedFlags& f, std::ostream& out) {
  const SeedData seed = f.seed();
  const ModelParams params = f.params();
  Classification cls = classify(seed, params);

  if (cls.verdict == Verdict::BlowupFiniteTime) {
    const double t_est =
        cls.T_formula ? *cls.T_formula : blowup_time_quadrature(seed, params, 1e-10);
    const Trajectory traj =
        integrate(seed, params, 10.0 * std::max(t_est, 1.0), f.integrate_options());
    if (traj.status() == TerminationStatus::BlowupDetected) {
      cls.T_numeric = traj.blowup_time();
    }
  }

  out << "verdict=" << to_string(cls.verdict) << "\n";
  out << "criterion=" << to_string(cls.criterion) << "\n";
  out << "E=" << fmt(cls.energy) << "\n";
  if (cls.T_formula) out << "T_formula=" << fmt(*cls.T_formula) << "\n";
  if (cls.T_numeric) out << "T_numeric=" << fmt(*cls.T_numeric) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

int do_integrate(const SeedFlags& f, double t_end, const std::string& output,
                 std::ostream& fallback) {
  const Trajectory traj = integrate(f.seed(), f.params(), t_end, f.integrate_options());

  Output o(output, fallback);
  std::ostream& os = o.stream();
  os << "t,a,adot,b,bdot,y\n";
  for (const TrajectoryState& s : traj.states()) {
    os << fmt(s.t) << ',' << fmt(s.a) << ',' << fmt(s.adot) << ',' << fmt(s.b) << ','
       << fmt(s.bdot) << ',' << fmt(s.y) << "\n";
  }
  switch (traj.status()) {
    case TerminationStatus::Completed:
      os << "# status=completed,t_end=" << fmt(traj.t_covered()) << "\n";
      return 0;
    case TerminationStatus::BlowupDetected:
      os << "# status=blowup_detected,T=" << fmt(traj.blowup_time()) << "\n";
      return 0;
    case TerminationStatus::StepSizeUnderflow:
      os << "# status=step_size_underflow,t_last=" << fmt(traj.t_covered()) << "\n";
      return 3;
  }
  return 3;
}

// ---------------------------------------------------------------------------
// field
// ---------------------------------------------------------------------------

int do_field(const SeedFlags& f, double t0, double t1, long nt, double x_lo, double x_hi,
             long nx, bool radial, const std::string& output, std::ostream& fallback) {
  if (nt < 1 || nx < 1 || !(t1 >= t0) || !(x_hi >= x_lo)) {
    throw std::invalid_argument("field: bad lattice specification");
  }
  const SeedData seed = f.seed();
  const ModelParams params = f.params();
  const Trajectory traj =
      integrate(seed, params, std::max(t1, 1e-12), f.integrate_options());

  Output o(output, fallback);
  std::ostream& os = o.stream();
  os << (radial ? "t,r,rho,u,in_support\n" : "t,x,rho,u,in_support\n");
  for (long i = 0; i < nt; ++i) {
    const double t =
        (nt == 1) ? t0 : (i == nt - 1 ? t1 : t0 + i * (t1 - t0) / static_cast<double>(nt - 1));
    const TrajectoryState st = traj.state_at(t);
    for (long j = 0; j < nx; ++j) {
      const double x = (nx == 1) ? x_lo
                                 : (j == nx - 1 ? x_hi
                                                : x_lo + j * (x_hi - x_lo) /
                                                             static_cast<double>(nx - 1));
      if (radial && x < 0.0) continue;  // radial domain is r >= 0
      const FieldSample s = radial ? eval_radial(x, st, params, seed.xi)
                                   : eval_field(x, st, params, seed.xi);
      os << fmt(t) << ',' << fmt(x) << ',' << fmt(s.rho) << ',' << fmt(s.u) << ','
         << (s.in_support ? '1' : '0') << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

json stats_json(const ResidualStats& s) { return json{{"max", s.max}, {"l2", s.l2}}; }

int do_verify(const SeedFlags& f, GridSpec grid, int levels, const std::string& form_name,
              double threshold, const std::string& output, std::ostream& fallback) {
  const SeedData seed = f.seed();
  const ModelParams params = f.params();
  const MomentumForm form = (form_name == "nonconservative") ? MomentumForm::NonConservative
                                                             : MomentumForm::Conservative;

  const Trajectory traj =
      integrate(seed, params, grid.t_hi + 2.0 * grid.ht(), f.integrate_options());

  const ResidualField mass = residual_mass(grid, traj, seed, params);
  const ResidualField momentum = residual_momentum(grid, traj, seed, params, form);
  std::optional<NsResidualResult> ns;
  if (params.mu > 0.0) ns = residual_navier_stokes(grid, traj, seed, params);

  std::optional<ConvergenceResult> study;
  if (levels >= 3) study = convergence_study(grid, traj, seed, params, levels, form);

  bool pass = mass.stats.max <= threshold && momentum.stats.max <= threshold;
  if (ns) pass = pass && ns->field.stats.max <= threshold;

  json report;
  report["grid"] = {{"t_lo", grid.t_lo}, {"t_hi", grid.t_hi}, {"nt", grid.nt},
                    {"x_lo", grid.x_lo}, {"x_hi", grid.x_hi}, {"nx", grid.nx},
                    {"margin", grid.margin}};
  report["mass_residual"] = stats_json(mass.stats);
  report["momentum_residual"] = stats_json(momentum.stats);
  report["ns_residual"] = ns ? stats_json(ns->field.stats) : json(nullptr);
  if (study && study->observed_order_mass) {
    report["observed_order"] = *study->observed_order_mass;
  } else {
    report["observed_order"] = nullptr;
  }
  report["ode_tolerance_floor"] = 100.0 * traj.rtol();
  report["status"] = pass ? "pass" : "fail";
  if (study) {
    json lv = json::array();
    for (const ConvergenceLevel& l : study->levels) {
      lv.push_back({{"n", l.n}, {"h", l.h}, {"mass", stats_json(l.mass)},
                    {"momentum", stats_json(l.momentum)}});
    }
    report["convergence"] = {{"levels", lv},
                             {"floor_limited", study->floor_limited},
                             {"boundary_kink_warning", study->boundary_kink_warning}};
  }

  Output o(output, fallback);
  o.stream() << report.dump(2) << "\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct Range {
  double lo = 0.0, hi = 0.0;
  long n = 1;

  [[nodiscard]] double value(long i) const {
    if (n == 1) return lo;
    if (i == n - 1) return hi;
    return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(n - 1);
  }
};

Range parse_range(const std::string& text) {
  Range r;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    r.lo = r.hi = std::stod(text);
    r.n = 1;
    return r;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("range must be lo:hi:n");
  r.lo = std::stod(text.substr(0, c1));
  r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  r.n = std::stol(text.substr(c2 + 1));
  if (r.n < 1) throw std::invalid_argument("range step count must be >= 1");
  return r;
}

unsigned worker_count() {
  if (const char* env = std::getenv("EULERLAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

int do_sweep(double K, const std::string& xi_s, const std::string& a0_s,
             const std::string& a1_s, const std::string& gamma_s, double quad_tol,
             const std::string& output, std::ostream& fallback) {
  const Range xi_r = parse_range(xi_s);
  const Range a0_r = parse_range(a0_s);
  const Range a1_r = parse_range(a1_s);
  const Range g_r = parse_range(gamma_s);
  const long total = xi_r.n * a0_r.n * a1_r.n * g_r.n;
  if (total < 1) throw std::invalid_argument("sweep: empty parameter grid");

  struct Row {
    double xi, a0, a1, gamma, E, T;
    Verdict verdict;
  };
  std::vector<Row> rows(static_cast<std::size_t>(total));

  auto cell = [&](long idx) {
    long rem = idx;
    const long ig = rem % g_r.n;
    rem /= g_r.n;
    const long ia1 = rem % a1_r.n;
    rem /= a1_r.n;
    const long ia0 = rem % a0_r.n;
    const long ixi = rem / a0_r.n;
    Row& row = rows[static_cast<std::size_t>(idx)];
    row.xi = xi_r.value(ixi);
    row.a0 = a0_r.value(ia0);
    row.a1 = a1_r.value(ia1);
    row.gamma = g_r.value(ig);
    const SeedData seed(row.a0, row.a1, row.xi);
    const ModelParams params(K, row.gamma);
    const Classification cls = classify(seed, params);
    row.verdict = cls.verdict;
    row.E = cls.energy;
    if (cls.verdict == Verdict::BlowupFiniteTime) {
      row.T = cls.T_formula ? *cls.T_formula : blowup_time_quadrature(seed, params, quad_tol);
    } else {
      row.T = std::numeric_limits<double>::quiet_NaN();
    }
  };

  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(total));
  if (workers <= 1) {
    for (long i = 0; i < total; ++i) cell(i);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (long i = next.fetch_add(1); i < total; i = next.fetch_add(1)) cell(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  Output o(output, fallback);
  std::ostream& os = o.stream();
  os << "xi,a0,a1,gamma,verdict,E,T\n";
  for (const Row& r : rows) {
    os << fmt(r.xi) << ',' << fmt(r.a0) << ',' << fmt(r.a1) << ',' << fmt(r.gamma) << ','
       << to_string(r.verdict) << ',' << fmt(r.E) << ',' << fmt(r.T) << "\n";
  }
  return 0;
}

}  // namespace

std::string format_double(double v) { return fmt(v); }

TrajectoryCsv read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  TrajectoryCsv out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      // footer: "# status=<token>,<key>=<value>"
      const auto eq = line.find("status=");
      if (eq != std::string::npos) {
        const auto rest = line.substr(eq + 7);
        const auto comma = rest.find(',');
        out.status = rest.substr(0, comma);
        if (comma != std::string::npos) {
          const auto kv = rest.substr(comma + 1);
          const auto kveq = kv.find('=');
          const std::string key = kv.substr(0, kveq);
          const double value = std::stod(kv.substr(kveq + 1));
          if (key == "T") out.T = value;
          if (key == "t_end") out.t_end = value;
        }
      }
      continue;
    }
    TrajectoryState s{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &s.t, &s.a, &s.adot, &s.b,
                    &s.bdot, &s.y) == 6) {
      out.states.push_back(s);
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact-solution laboratory for the 1-D compressible Euler equations"};
  app.require_subcommand(1);
  app.footer("Every subcommand also accepts --config FILE with key=value lines "
             "mirroring its long flags.");

  SeedFlags f;
  std::string output = "-";

  CLI::App* c_classify = app.add_subcommand("classify", "Collapse-vs-global verdict for a seed");
  add_seed_flags(c_classify, f, true);

  CLI::App* c_integrate = app.add_subcommand("integrate", "Integrate the reduced system to CSV");
  double t_end = 1.0;
  add_seed_flags(c_integrate, f, true);
  c_integrate->add_option("--t-end", t_end, "integration horizon")->required();
  c_integrate->add_option("-o,--output", output, "output path or - for stdout");

  CLI::App* c_field = app.add_subcommand("field", "Sample density/velocity on a lattice to CSV");
  double t0 = 0.0, t1 = 1.0, x_lo = -1.0, x_hi = 1.0;
  long nt = 2, nx = 2;
  bool radial = false;
  add_seed_flags(c_field, f, true);
  c_field->add_option("--t0", t0, "first sample time");
  c_field->add_option("--t1", t1, "last sample time")->required();
  c_field->add_option("--nt", nt, "time samples")->required();
  c_field->add_option("--x-lo", x_lo, "window lower edge")->required();
  c_field->add_option("--x-hi", x_hi, "window upper edge")->required();
  c_field->add_option("--nx", nx, "space samples")->required();
  c_field->add_flag("--radial", radial, "radial mode: clip to r >= 0");
  c_field->add_option("-o,--output", output, "output path or - for stdout");

  CLI::App* c_verify = app.add_subcommand("verify", "Finite-difference PDE residual report (JSON)");
  GridSpec grid{0.0, 1.0, 64, -1.0, 1.0, 64, 0.05};
  int levels = 1;
  std::string form_name = "conservative";
  double threshold = 1e-6;
  add_seed_flags(c_verify, f, true);
  c_verify->add_option("--t-lo", grid.t_lo, "first residual time")->required();
  c_verify->add_option("--t-hi", grid.t_hi, "last residual time")->required();
  c_verify->add_option("--nt", grid.nt, "time resolution")->required();
  c_verify->add_option("--x-lo", grid.x_lo, "window lower edge")->required();
  c_verify->add_option("--x-hi", grid.x_hi, "window upper edge")->required();
  c_verify->add_option("--nx", grid.nx, "space resolution")->required();
  c_verify->add_option("--margin", grid.margin, "support margin fraction");
  c_verify->add_option("--levels", levels, "grid-halving levels (>= 3 fits an order)");
  c_verify->add_option("--form", form_name, "momentum form")
      ->check(CLI::IsMember({"conservative", "nonconservative"}));
  c_verify->add_option("--threshold", threshold, "max-norm acceptance threshold");
  c_verify->add_option("-o,--output", output, "output path or - for stdout");

  CLI::App* c_sweep = app.add_subcommand("sweep", "Classify a parameter grid to CSV");
  std::string xi_s = "0", a0_s = "1", a1_s = "0", gamma_s = "2";
  double K_sweep = 1.0, quad_tol = 1e-10;
  c_sweep->add_option("--xi", xi_s, "value or lo:hi:n");
  c_sweep->add_option("--a0", a0_s, "value or lo:hi:n");
  c_sweep->add_option("--a1", a1_s, "value or lo:hi:n");
  c_sweep->add_option("--gamma", gamma_s, "value or lo:hi:n");
  c_sweep->add_option("--K", K_sweep, "pressure constant");
  c_sweep->add_option("--quad-tol", quad_tol, "collapse-time quadrature tolerance");
  c_sweep->add_option("-o,--output", output, "output path or - for stdout");

  // --config FILE splices key=value lines into the argument list in place,
  // so required-flag checking and unknown-key rejection work unchanged.
  std::vector<std::string> args;
  try {
    for (int i = 0; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) {
        std::ifstream cfg(argv[++i]);
        if (!cfg) throw std::invalid_argument(std::string("cannot read config file: ") + argv[i]);
        std::string line;
        while (std::getline(cfg, line)) {
          if (line.empty() || line[0] == '#') continue;
          const auto eq = line.find('=');
          if (eq == std::string::npos) {
            throw std::invalid_argument("config file lines must be key=value: " + line);
          }
          args.push_back("--" + line.substr(0, eq));
          args.push_back(line.substr(eq + 1));
        }
      } else {
        args.push_back(arg);
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  }
  std::vector<const char*> argv_expanded;
  argv_expanded.reserve(args.size());
  for (const std::string& a : args) argv_expanded.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv_expanded.size()), argv_expanded.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (c_classify->parsed()) return do_classify(f, out);
    if (c_integrate->parsed()) return do_integrate(f, t_end, output, out);
    if (c_field->parsed()) return do_field(f, t0, t1, nt, x_lo, x_hi, nx, radial, output, out);
    if (c_verify->parsed()) return do_verify(f, grid, levels, form_name, threshold, output, out);
    if (c_sweep->parsed())
      return do_sweep(K_sweep, xi_s, a0_s, a1_s, gamma_s, quad_tol, output, out);
    err << "no command given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace eulerlab::cli
