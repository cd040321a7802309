// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. An optional list of criterion numbers selects a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eulerlab/classify.hpp"
#include "eulerlab/field.hpp"
#include "eulerlab/ode.hpp"
#include "eulerlab/verify.hpp"

namespace {

using namespace eulerlab;

struct Outcome {
  bool pass;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Largest window that stays inside the margin-shrunk support for every
// sampled time in [t_lo - ht, t_hi + ht], shrunk a further 2% for safety.
struct Window {
  double lo, hi;
};

Window margin_window(const Trajectory& traj, const SeedData& seed, const ModelParams& params,
                     double t_lo, double t_hi, double ht, double margin) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const int samples = 64;
  for (int i = 0; i <= samples; ++i) {
    const double t = (t_lo - ht) + (t_hi - t_lo + 2.0 * ht) * i / samples;
    const SupportSet sup = support(traj.state_at(std::max(t, 0.0)), params, seed.xi);
    if (sup.kind == SupportSet::Kind::Interval) {
      const double inset = margin * (sup.hi - sup.lo);
      lo = std::max(lo, sup.lo + inset);
      hi = std::min(hi, sup.hi - inset);
    }
  }
  if (!std::isfinite(lo)) return {-1.0, 1.0};  // unbounded support
  const double width = hi - lo;
  return {lo + 0.02 * width, hi - 0.02 * width};
}

// The nine residual-study cases: three seed families at three exponents.
struct StudyCase {
  std::string name;
  SeedData seed;
  ModelParams params;
  double t_lo, t_hi;
};

std::vector<StudyCase> residual_cases() {
  std::vector<StudyCase> cases;
  for (double gamma : {1.4, 2.0, 3.0}) {
    const ModelParams params(1.0, gamma);
    cases.push_back({"xi=1,b=0,g=" + fmt(gamma), SeedData(1.0, 0.0, 1.0), params, 0.2, 0.8});
    cases.push_back({"xi=1,b0=1,g=" + fmt(gamma), SeedData(1.0, 0.0, 1.0, 1.0, 0.0, 1.0),
                     params, 0.2, 0.8});
    const SeedData pre_blowup(1.0, 0.0, -1.0);
    const double T = blowup_time_quadrature(pre_blowup, params, 1e-10);
    cases.push_back({"xi=-1,g=" + fmt(gamma), pre_blowup, params, 0.05 * T, 0.4 * T});
  }
  return cases;
}

GridSpec study_grid(const StudyCase& c, const Trajectory& traj, long n) {
  GridSpec g{c.t_lo, c.t_hi, n, -1.0, 1.0, n, 0.05};
  // Windows sit well inside the support so the difference stencils see only
  // smooth fields; the grid's own 5% margin check stays comfortably met.
  const Window w = margin_window(traj, c.seed, c.params, c.t_lo, c.t_hi, g.ht(), 0.12);
  g.x_lo = 0.75 * w.lo;
  g.x_hi = 0.75 * w.hi;
  return g;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const double t0 = now_seconds();
  std::mt19937 rng(202408u);
  std::uniform_real_distribution<double> u_a0(0.5, 2.0), u_a1(0.5, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double a0 = u_a0(rng);
    const double a1 = -u_a1(rng);
    const SeedData seed(a0, a1, 0.0);
    const ModelParams params(1.0, 2.0);
    const double T_exact = -a0 / a1;
    const Trajectory traj = integrate(seed, params, 10.0 * std::max(T_exact, 1.0));
    if (traj.status() != TerminationStatus::BlowupDetected) {
      return {false, "collapse not detected for a0=" + fmt(a0) + " a1=" + fmt(a1)};
    }
    worst = std::max(worst, std::abs(traj.blowup_time() - T_exact) / T_exact);
  }
  const double elapsed = now_seconds() - t0;
  const bool pass = worst <= 1e-8 && elapsed < 1.0;
  return {pass, "20 seeds, max rel err " + fmt(worst) + " (limit 1e-8), " + fmt(elapsed) +
                    " s (limit 1)"};
}

Outcome criterion_2() {
  const SeedData seed(1.0, 0.0, -1.0);
  const ModelParams params(1.0, 3.0);
  const Trajectory traj = integrate(seed, params, 5.0);
  if (traj.status() != TerminationStatus::BlowupDetected) {
    return {false, "collapse not detected"};
  }
  const double T_int = traj.blowup_time();
  const double T_quad = blowup_time_quadrature(seed, params, 1e-9);
  const double err_int = std::abs(T_int - 1.0);
  const double err_quad = std::abs(T_quad - 1.0);
  const bool pass = err_int <= 1e-6 && err_quad <= 1e-6;
  return {pass, "integration err " + fmt(err_int) + ", quadrature err " + fmt(err_quad) +
                    " (limit 1e-6)"};
}

struct GridSweepResult {
  int cells = 0;
  int mismatches = 0;
  int t_mismatches = 0;
  double worst_drift = 0.0;  // energy drift over the global seeds (criterion 8)
  double elapsed = 0.0;
};

GridSweepResult run_grid_sweep() {
  const double t0 = now_seconds();
  GridSweepResult out;
  const double a_floor = 1e-6;
  for (double xi : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double a0 : {0.5, 1.0, 2.0}) {
      for (double a1 : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (double gamma : {1.4, 2.0, 3.0}) {
          ++out.cells;
          const SeedData seed(a0, a1, xi);
          const ModelParams params(1.0, gamma);
          const Classification cls = classify(seed, params);
          if (cls.verdict == Verdict::BlowupFiniteTime) {
            const double T_quad = blowup_time_quadrature(seed, params, 1e-9);
            const Trajectory traj = integrate(seed, params, 10.0 * std::max(T_quad, 1.0));
            if (traj.status() != TerminationStatus::BlowupDetected) {
              ++out.mismatches;
              continue;
            }
            if (std::abs(traj.blowup_time() - T_quad) > 1e-6 * std::max(T_quad, 1.0)) {
              ++out.t_mismatches;
            }
          } else {
            const Trajectory traj = integrate(seed, params, 50.0);
            const TrajectoryState& last = traj.states().back();
            const bool ok = traj.status() == TerminationStatus::Completed &&
                            last.a >= a_floor &&
                            (!(xi > 0.0 || cls.energy > 0.0) || last.adot > 0.0);
            if (!ok) {
              ++out.mismatches;
              continue;
            }
            const double e0 = cls.energy;
            double drift = 0.0;
            for (const TrajectoryState& s : traj.states()) {
              drift = std::max(drift, std::abs(emden_energy_at(s, params, xi) - e0));
            }
            out.worst_drift =
                std::max(out.worst_drift, drift / std::max(std::abs(e0), 1.0));
          }
        }
      }
    }
  }
  out.elapsed = now_seconds() - t0;
  return out;
}

Outcome criterion_3() {
  const GridSweepResult r = run_grid_sweep();
  const bool pass =
      r.mismatches == 0 && r.t_mismatches == 0 && r.cells == 270 && r.elapsed < 30.0;
  return {pass, std::to_string(r.cells) + " cells, " + std::to_string(r.mismatches) +
                    " verdict mismatches, " + std::to_string(r.t_mismatches) +
                    " collapse-time disagreements > 1e-6, " + fmt(r.elapsed) +
                    " s (limit 30)"};
}

Outcome criterion_4() {
  const ModelParams params(1.0, 3.0);
  const SeedData below(1.0, 1.0 - 1e-3, -1.0);
  const SeedData above(1.0, 1.0 + 1e-3, -1.0);

  const Classification c_below = classify(below, params);
  const Classification c_above = classify(above, params);
  bool pass = c_below.verdict == Verdict::BlowupFiniteTime &&
              c_above.verdict == Verdict::Global;
  std::string detail = "classification " + std::string(pass ? "ok" : "WRONG");

  const double T_quad = blowup_time_quadrature(below, params, 1e-9);
  const Trajectory t_below = integrate(below, params, 10.0 * std::max(T_quad, 1.0));
  pass = pass && t_below.status() == TerminationStatus::BlowupDetected;
  detail += "; below-threshold collapse " +
            std::string(t_below.status() == TerminationStatus::BlowupDetected ? "detected"
                                                                              : "MISSED");

  const Trajectory t_above = integrate(above, params, 105.0);
  const bool grows = t_above.status() == TerminationStatus::Completed &&
                     t_above.states().back().adot > 0.0 &&
                     t_above.states().back().a > above.a0;
  pass = pass && grows;
  detail += "; above-threshold growth past t=100 " + std::string(grows ? "ok" : "WRONG");
  return {pass, detail};
}

Outcome criterion_5() {
  const double t0 = now_seconds();
  std::ostringstream detail;
  bool pass = true;
  for (const StudyCase& c : residual_cases()) {
    IntegrateOptions opt;
    opt.rtol = 1e-12;  // keeps the ODE floor below the finest truncation level
    opt.atol = 1e-14;
    const GridSpec coarse{c.t_lo, c.t_hi, 257, -1.0, 1.0, 257, 0.05};
    const Trajectory traj =
        integrate(c.seed, c.params, c.t_hi + 2.0 * coarse.ht(), opt);
    const GridSpec base = study_grid(c, traj, 257);
    const ConvergenceResult r = convergence_study(base, traj, c.seed, c.params, 4);
    const double finest_mass = r.levels.back().mass.max;
    const double finest_mom = r.levels.back().momentum.max;
    const bool order_ok =
        r.observed_order_mass && std::abs(*r.observed_order_mass - 2.0) <= 0.2 &&
        r.observed_order_momentum && std::abs(*r.observed_order_momentum - 2.0) <= 0.2;
    const bool norm_ok = finest_mass <= 1e-6 && finest_mom <= 1e-6;
    if (!(order_ok && norm_ok)) {
      pass = false;
      detail << " [" << c.name << ": order_mass="
             << (r.observed_order_mass ? fmt(*r.observed_order_mass) : "n/a")
             << " order_mom="
             << (r.observed_order_momentum ? fmt(*r.observed_order_momentum) : "n/a")
             << " mass@2048=" << fmt(finest_mass) << " mom@2048=" << fmt(finest_mom)
             << "]";
    }
  }
  const double elapsed = now_seconds() - t0;
  pass = pass && elapsed < 120.0;
  std::string text = "9 cases, orders within 2.0+-0.2, norms at n=2048 <= 1e-6, " +
                     fmt(elapsed) + " s (limit 120)";
  if (!detail.str().empty()) text += "; failures:" + detail.str();
  return {pass, text};
}

Outcome criterion_6() {
  // This criterion pins gamma=2, b=0, xi=1, alpha=1 and requires the
  // unscaled ("theorem") y-equation to leave a mass-residual plateau above
  // 1e-3 while the default form converges. At gamma = 2 the two forms are
  // the same equation ((gamma-1) = 1), so the plateau arm cannot occur; it
  // is reported honestly below, and the arbitration itself is demonstrated
  // at gamma = 3 where the forms differ (supplementary line).
  const ModelParams params(1.0, 2.0);
  const SeedData seed(1.0, 0.0, 1.0, 0.0, 0.0, 1.0);
  const GridSpec probe{0.2, 1.0, 257, -1.0, 1.0, 257, 0.05};

  IntegrateOptions opt;
  opt.y_form = YEquationForm::Unscaled;
  const Trajectory bad = integrate(seed, params, probe.t_hi + 2.0 * probe.ht(), opt);
  const GridSpec grid = study_grid({"", seed, params, probe.t_lo, probe.t_hi}, bad, 257);
  const ConvergenceResult r_bad = convergence_study(grid, bad, seed, params, 3);
  const double plateau = r_bad.levels.back().mass.max;
  const bool plateau_seen = plateau > 1e-3;

  opt.y_form = YEquationForm::GammaScaled;
  const Trajectory good = integrate(seed, params, probe.t_hi + 2.0 * probe.ht(), opt);
  const ConvergenceResult r_good = convergence_study(grid, good, seed, params, 3);
  const bool converges = r_good.observed_order_mass &&
                         *r_good.observed_order_mass > 1.8 &&
                         r_good.levels.back().mass.max < 1e-5;

  // Supplementary: the same experiment at gamma = 3, where the forms differ.
  const ModelParams params3(1.0, 3.0);
  IntegrateOptions opt3;
  opt3.y_form = YEquationForm::Unscaled;
  const GridSpec probe3{0.25, 0.75, 129, -1.0, 1.0, 129, 0.05};
  const Trajectory bad3 = integrate(seed, params3, probe3.t_hi + 2.0 * probe3.ht(), opt3);
  const GridSpec grid3 =
      study_grid({"", seed, params3, probe3.t_lo, probe3.t_hi}, bad3, 129);
  const ConvergenceResult r_bad3 = convergence_study(grid3, bad3, seed, params3, 3);
  const double plateau3 = r_bad3.levels.back().mass.max;

  const bool pass = plateau_seen && converges;
  std::string text = "default form converges (order " +
                     (r_good.observed_order_mass ? fmt(*r_good.observed_order_mass)
                                                 : std::string("n/a")) +
                     "); unscaled form at gamma=2: finest mass residual " + fmt(plateau) +
                     " (required plateau > 1e-3";
  if (!plateau_seen) {
    text +=
        " -- unattainable: at gamma=2 the factor (gamma-1)=1 makes both y-equation "
        "forms identical, so the residual converges in either mode";
  }
  text += "). Supplementary gamma=3 arbitration: unscaled plateau " + fmt(plateau3) +
          " (> 1e-3 as expected: " + (plateau3 > 1e-3 ? "yes" : "no") + ")";
  return {pass, text};
}

Outcome criterion_7() {
  std::mt19937 rng(77002u);
  std::uniform_real_distribution<double> u_gamma(1.2, 3.2), u_a0(0.5, 2.0),
      u_a1(-1.5, 1.5), u_b(-2.0, 2.0), u_alpha(0.5, 2.0), u_xi(-1.0, 1.0);
  double worst_b = 0.0, worst_y = 0.0;

  for (int k = 0; k < 10; ++k) {
    // Equidimensional b(t) oracle at xi = 0.
    const ModelParams params(1.0, u_gamma(rng));
    const SeedData seed(u_a0(rng), u_a1(rng), 0.0, u_b(rng), u_b(rng), 1.0);
    const double T = seed.a1 < 0.0 ? -seed.a0 / seed.a1
                                   : std::numeric_limits<double>::infinity();
    const double horizon = std::min(0.9 * T, 5.0);
    const Trajectory traj = integrate(seed, params, horizon);
    double max_err = 0.0, max_b = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double t = horizon * i / 40.0;
      const BValue cf = closed_form_b_xi0(t, seed, params);
      max_err = std::max(max_err, std::abs(traj.state_at(t).b - cf.b));
      max_b = std::max(max_b, std::abs(cf.b));
    }
    worst_b = std::max(worst_b, max_err / std::max(max_b, 1e-30));
  }

  for (int k = 0; k < 10; ++k) {
    // b == 0 closed-form y(t) oracle, including collapsing seeds.
    const ModelParams params(1.0, u_gamma(rng));
    const SeedData seed(u_a0(rng), u_a1(rng), u_xi(rng), 0.0, 0.0, u_alpha(rng));
    double horizon = 5.0;
    if (classify(seed, params).verdict == Verdict::BlowupFiniteTime) {
      horizon = std::min(horizon, 0.9 * blowup_time_quadrature(seed, params, 1e-9));
    }
    const Trajectory traj = integrate(seed, params, horizon);
    double max_rel = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double t = horizon * i / 40.0;
      const TrajectoryState s = traj.state_at(t);
      const double expect = closed_form_y_b0(s.a, seed, params);
      max_rel = std::max(max_rel, std::abs(s.y - expect) / std::max(std::abs(expect), 1e-30));
    }
    worst_y = std::max(worst_y, max_rel);
  }

  const bool pass = worst_b <= 1e-6 && worst_y <= 1e-6;
  return {pass, "b-oracle max rel err " + fmt(worst_b) + ", y-oracle max rel err " +
                    fmt(worst_y) + " (limit 1e-6)"};
}

Outcome criterion_8() {
  const GridSweepResult r = run_grid_sweep();
  const double limit = 100.0 * 1e-10;  // default rtol
  const bool pass = r.worst_drift <= limit;
  return {pass, "worst relative energy drift over global grid seeds to t=50: " +
                    fmt(r.worst_drift) + " (limit " + fmt(limit) + ")"};
}

Outcome criterion_9() {
  const ModelParams params(1.0, 2.0);
  const double quad_tol = 1e-9;

  const SeedData drifting(1.0, 0.0, 1.0, 1.0, 0.0, 1.0);
  const Trajectory traj = integrate(drifting, params, 5.0);
  const double m0 = total_mass(traj.state_at(0.0), params, drifting.xi, quad_tol);
  double worst = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.5 * i;
    worst = std::max(worst,
                     std::abs(total_mass(traj.state_at(t), params, drifting.xi, quad_tol) - m0));
  }

  const SeedData symmetric(1.0, 0.0, 1.0);
  const Trajectory sym = integrate(symmetric, params, 0.1);
  const double m_sym = total_mass(sym.state_at(0.0), params, symmetric.xi, quad_tol);
  const double err_sym = std::abs(m_sym - 8.0 / 3.0);

  const bool pass = worst <= 1e-6 && err_sym <= quad_tol;
  return {pass, "max |m(t)-m(0)| = " + fmt(worst) + " (limit 1e-6); symmetric t=0 mass err " +
                    fmt(err_sym) + " (limit " + fmt(quad_tol) + ")"};
}

Outcome criterion_10() {
  double worst_diff = 0.0, worst_visc = 0.0;
  for (const StudyCase& c : residual_cases()) {
    const GridSpec probe{c.t_lo, c.t_hi, 257, -1.0, 1.0, 257, 0.05};
    const Trajectory traj = integrate(c.seed, c.params, c.t_hi + 2.0 * probe.ht());
    const GridSpec grid = study_grid(c, traj, 257);
    const double euler = residual_momentum(grid, traj, c.seed, c.params).stats.max;
    for (double mu : {0.1, 1.0, 10.0}) {
      const ModelParams viscous(c.params.K, c.params.gamma, mu);
      const NsResidualResult ns = residual_navier_stokes(grid, traj, c.seed, viscous);
      worst_diff = std::max(worst_diff, std::abs(ns.field.stats.max - euler));
      worst_visc = std::max(worst_visc, ns.viscous_max);
    }
  }
  const bool pass = worst_diff <= 1e-9;
  return {pass, "max |NS - Euler| residual difference " + fmt(worst_diff) +
                    " (limit 1e-9); max discrete viscous term " + fmt(worst_visc)};
}

Outcome criterion_11() {
  const Trajectory traj = integrate(SeedData(1.0, -2.0, 0.0), ModelParams(1.0, 2.0), 10.0);
  if (traj.status() != TerminationStatus::BlowupDetected) {
    return {false, "collapse not detected"};
  }
  const std::vector<double> bounds{10.0, 100.0, 1000.0};
  const auto report = velocity_gradient_blowup_check(traj, bounds);
  double worst = 0.0;
  for (const GradientCrossing& c : report) {
    worst = std::max(worst, std::abs(c.t - (1.0 - 2.0 / c.bound) / 2.0));
  }
  const bool pass = worst <= 1e-6;
  return {pass, "max |t_M - (1-2/M)/2| = " + fmt(worst) + " (limit 1e-6)"};
}

const char* kTitles[] = {
    "exact collapse time for xi=0 seeds",
    "derived collapse time (xi=-1, gamma=3)",
    "classifier-integrator agreement on the 270-seed grid",
    "threshold sharpness at a1 = 1 -+ 1e-3",
    "PDE residual convergence (order 2, norms <= 1e-6 at n=2048)",
    "y-equation residual arbitration at gamma=2",
    "closed-form oracle agreement on random draws",
    "energy conservation along global grid trajectories",
    "mass conservation and the 8/3 reference value",
    "viscous/inviscid residual compatibility",
    "velocity-gradient first-passage times",
};

using CriterionFn = Outcome (*)();
const CriterionFn kCriteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                 criterion_5, criterion_6, criterion_7, criterion_8,
                                 criterion_9, criterion_10, criterion_11};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 11) {
      std::fprintf(stderr, "usage: acceptance [criterion numbers 1..11]\n");
      return 64;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int n = 1; n <= 11; ++n) selected.push_back(n);
  }

  int failures = 0;
  for (int n : selected) {
    Outcome outcome{false, ""};
    try {
      outcome = kCriteria[n - 1]();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2d. %s: %s\n", outcome.pass ? "PASS" : "FAIL", n, kTitles[n - 1],
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
