#include "eulerlab/verify.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

namespace eulerlab {

namespace {

constexpr double kVacuumFloor = 1e-12;

struct Slice {
  double t;
  double b;
  double c;  // adot/a
  QuadraticCoeffs q;
};

// Sampling lattice with one halo layer in each direction. Slice index i runs
// over -1..nt (stored shifted by one); column index j over -1..nx.
struct Lattice {
  GridSpec g;
  double ht, hx;
  std::vector<Slice> slices;  // nt + 2
  std::vector<double> xs;     // nx + 2
  std::vector<double> rho;    // (nt+2) * (nx+2)
  double exponent;            // 1/(gamma-1)
  bool touched_vacuum = false;
  double min_rho = std::numeric_limits<double>::infinity();

  [[nodiscard]] std::size_t idx(long i, long j) const {
    return static_cast<std::size_t>(i + 1) * static_cast<std::size_t>(g.nx + 2) +
           static_cast<std::size_t>(j + 1);
  }
  [[nodiscard]] double u(long i, long j) const {
    const Slice& s = slices[static_cast<std::size_t>(i + 1)];
    return s.c * xs[static_cast<std::size_t>(j + 1)] + s.b;
  }
};

void validate_grid(const GridSpec& g) {
  if (!(g.t_hi > g.t_lo) || !(g.x_hi > g.x_lo) || g.nt < 2 || g.nx < 2) {
    throw std::invalid_argument("GridSpec: need t_hi > t_lo, x_hi > x_lo, nt,nx >= 2");
  }
  if (!(g.margin >= 0.0) || g.margin >= 0.5) {
    throw std::invalid_argument("GridSpec: margin must lie in [0, 0.5)");
  }
}

// Margin clearance for one time slice. The window includes the spatial halo.
void check_window_inside_support(const SupportSet& sup, double win_lo, double win_hi,
                                 double margin) {
  switch (sup.kind) {
    case SupportSet::Kind::EmptyInterior:
      throw GridOutsideSupport("residual grid: support has empty interior");
    case SupportSet::Kind::Interval: {
      const double inset = margin * (sup.hi - sup.lo);
      if (win_lo < sup.lo + inset || win_hi > sup.hi - inset) {
        throw GridOutsideSupport("residual grid: window leaves the margin-shrunk support");
      }
      return;
    }
    case SupportSet::Kind::HalfLine: {
      const double inset = margin * (win_hi - win_lo);
      if (std::isfinite(sup.hi) && win_hi > sup.hi - inset) {
        throw GridOutsideSupport("residual grid: window too close to the vacuum boundary");
      }
      if (std::isfinite(sup.lo) && win_lo < sup.lo + inset) {
        throw GridOutsideSupport("residual grid: window too close to the vacuum boundary");
      }
      return;
    }
    case SupportSet::Kind::Unbounded: {
      if (sup.has_gap()) {
        const double inset = margin * (sup.gap_hi - sup.gap_lo);
        const bool left = win_hi < sup.gap_lo - inset;
        const bool right = win_lo > sup.gap_hi + inset;
        if (!left && !right) {
          throw GridOutsideSupport("residual grid: window meets the excluded interval");
        }
      }
      return;
    }
  }
}

Lattice build_lattice(const GridSpec& g, const Trajectory& traj, const SeedData& seed,
                      const ModelParams& params) {
  validate_grid(g);
  Lattice lat;
  lat.g = g;
  lat.ht = g.ht();
  lat.hx = g.hx();
  lat.exponent = 1.0 / (params.gamma - 1.0);

  const double t_first = g.t_lo - lat.ht;
  const double t_last = g.t_hi + lat.ht;
  if (t_first < traj.t_begin()) {
    throw std::invalid_argument("residual grid: t_lo - ht precedes the trajectory start");
  }
  if (t_last > traj.t_covered()) {
    if (traj.status() == TerminationStatus::BlowupDetected) {
      throw BlowupInsideRange("residual grid: collapse occurs inside the sampled range");
    }
    throw std::invalid_argument("residual grid: trajectory does not cover t_hi + ht");
  }

  lat.xs.resize(static_cast<std::size_t>(g.nx) + 2);
  for (long j = -1; j <= g.nx; ++j) {
    lat.xs[static_cast<std::size_t>(j + 1)] =
        (j == g.nx - 1) ? g.x_hi : g.x_lo + static_cast<double>(j) * lat.hx;
  }

  lat.slices.resize(static_cast<std::size_t>(g.nt) + 2);
  for (long i = -1; i <= g.nt; ++i) {
    const double t = (i == g.nt - 1) ? g.t_hi : g.t_lo + static_cast<double>(i) * lat.ht;
    const TrajectoryState st = traj.state_at(t);
    Slice& s = lat.slices[static_cast<std::size_t>(i + 1)];
    s.t = t;
    s.b = st.b;
    s.c = st.adot / st.a;
    s.q = quadratic_coeffs(st, params, seed.xi);
    if (g.margin > 0.0) {
      SupportSet sup = support(st, params, seed.xi);
      check_window_inside_support(sup, lat.xs.front(), lat.xs.back(), g.margin);
    }
  }

  lat.rho.resize(lat.slices.size() * lat.xs.size());
  for (std::size_t si = 0; si < lat.slices.size(); ++si) {
    const QuadraticCoeffs& q = lat.slices[si].q;
    for (std::size_t sj = 0; sj < lat.xs.size(); ++sj) {
      const double v = q(lat.xs[sj]);
      double r;
      if (v <= 0.0) {
        r = 0.0;
        lat.touched_vacuum = true;
      } else {
        r = std::pow(v, lat.exponent);
      }
      lat.min_rho = std::min(lat.min_rho, r);
      lat.rho[si * lat.xs.size() + sj] = r;
    }
  }
  return lat;
}

ResidualStats finish_stats(const std::vector<double>& values) {
  double mx = 0.0, sq = 0.0;
  for (double v : values) {
    mx = std::max(mx, std::abs(v));
    sq += v * v;
  }
  return {mx, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace

ResidualField residual_mass(const GridSpec& grid, const Trajectory& traj,
                            const SeedData& seed, const ModelParams& params) {
  const Lattice lat = build_lattice(grid, traj, seed, params);
  ResidualField out;
  out.grid = grid;
  out.touched_vacuum = lat.touched_vacuum;
  out.values.resize(static_cast<std::size_t>(grid.nt) * static_cast<std::size_t>(grid.nx));

  const double i2ht = 1.0 / (2.0 * lat.ht);
  const double i2hx = 1.0 / (2.0 * lat.hx);
  for (long i = 0; i < grid.nt; ++i) {
    for (long j = 0; j < grid.nx; ++j) {
      const double rho_t = (lat.rho[lat.idx(i + 1, j)] - lat.rho[lat.idx(i - 1, j)]) * i2ht;
      const double flux_x = (lat.rho[lat.idx(i, j + 1)] * lat.u(i, j + 1) -
                             lat.rho[lat.idx(i, j - 1)] * lat.u(i, j - 1)) *
                            i2hx;
      out.values[static_cast<std::size_t>(i) * grid.nx + j] = rho_t + flux_x;
    }
  }
  out.stats = finish_stats(out.values);
  return out;
}

ResidualField residual_momentum(const GridSpec& grid, const Trajectory& traj,
                                const SeedData& seed, const ModelParams& params,
                                MomentumForm form) {
  const Lattice lat = build_lattice(grid, traj, seed, params);
  if (form == MomentumForm::NonConservative && lat.min_rho < kVacuumFloor) {
    throw VacuumOnGrid("residual_momentum: nonconservative form requires rho above floor");
  }
  ResidualField out;
  out.grid = grid;
  out.touched_vacuum = lat.touched_vacuum;
  out.values.resize(static_cast<std::size_t>(grid.nt) * static_cast<std::size_t>(grid.nx));

  const double i2ht = 1.0 / (2.0 * lat.ht);
  const double i2hx = 1.0 / (2.0 * lat.hx);
  const double g = params.gamma;

  if (form == MomentumForm::Conservative) {
    // Precompute pressure on the lattice.
    std::vector<double> pressure(lat.rho.size());
    for (std::size_t n = 0; n < lat.rho.size(); ++n) {
      pressure[n] = params.K * std::pow(lat.rho[n], g);
    }
    for (long i = 0; i < grid.nt; ++i) {
      for (long j = 0; j < grid.nx; ++j) {
        const double m_t = (lat.rho[lat.idx(i + 1, j)] * lat.u(i + 1, j) -
                            lat.rho[lat.idx(i - 1, j)] * lat.u(i - 1, j)) *
                           i2ht;
        const double up = lat.u(i, j + 1), um = lat.u(i, j - 1);
        const double flux_x = (lat.rho[lat.idx(i, j + 1)] * up * up + pressure[lat.idx(i, j + 1)] -
                               lat.rho[lat.idx(i, j - 1)] * um * um - pressure[lat.idx(i, j - 1)]) *
                              i2hx;
        out.values[static_cast<std::size_t>(i) * grid.nx + j] = m_t + flux_x;
      }
    }
  } else {
    const double enthalpy_coef = params.K * g / (g - 1.0);
    for (long i = 0; i < grid.nt; ++i) {
      const QuadraticCoeffs& q = lat.slices[static_cast<std::size_t>(i + 1)].q;
      for (long j = 0; j < grid.nx; ++j) {
        const double u_t = (lat.u(i + 1, j) - lat.u(i - 1, j)) * i2ht;
        const double u_x = (lat.u(i, j + 1) - lat.u(i, j - 1)) * i2hx;
        // rho^(gamma-1) = max(q, 0)
        const double w_p = std::max(q(lat.xs[static_cast<std::size_t>(j + 2)]), 0.0);
        const double w_m = std::max(q(lat.xs[static_cast<std::size_t>(j)]), 0.0);
        const double press_x = enthalpy_coef * (w_p - w_m) * i2hx;
        out.values[static_cast<std::size_t>(i) * grid.nx + j] =
            u_t + lat.u(i, j) * u_x + press_x;
      }
    }
  }
  out.stats = finish_stats(out.values);
  return out;
}

NsResidualResult residual_navier_stokes(const GridSpec& grid, const Trajectory& traj,
                                        const SeedData& seed, const ModelParams& params) {
  if (!(params.mu > 0.0)) {
    throw std::invalid_argument("residual_navier_stokes: requires mu > 0");
  }
  const Lattice lat = build_lattice(grid, traj, seed, params);
  NsResidualResult out;
  out.field = residual_momentum(grid, traj, seed, params, MomentumForm::Conservative);
  out.viscous_max = 0.0;

  const double ihx2 = 1.0 / (lat.hx * lat.hx);
  for (long i = 0; i < grid.nt; ++i) {
    for (long j = 0; j < grid.nx; ++j) {
      const double u_xx =
          (lat.u(i, j + 1) - 2.0 * lat.u(i, j) + lat.u(i, j - 1)) * ihx2;
      const double viscous = params.mu * u_xx;
      out.viscous_max = std::max(out.viscous_max, std::abs(viscous));
      out.field.values[static_cast<std::size_t>(i) * grid.nx + j] -= viscous;
    }
  }
  out.field.stats = finish_stats(out.field.values);
  return out;
}

ConvergenceResult convergence_study(const GridSpec& base, const Trajectory& traj,
                                    const SeedData& seed, const ModelParams& params,
                                    int levels, MomentumForm form) {
  if (levels < 3) throw std::invalid_argument("convergence_study: levels must be >= 3");
  ConvergenceResult out;
  out.ode_tolerance_floor = 100.0 * traj.rtol();

  for (int k = 0; k < levels; ++k) {
    GridSpec g = base;
    const long factor = 1L << k;
    g.nt = (base.nt - 1) * factor + 1;  // halves the step exactly
    g.nx = (base.nx - 1) * factor + 1;
    const ResidualField mass = residual_mass(g, traj, seed, params);
    const ResidualField mom = residual_momentum(g, traj, seed, params, form);
    out.levels.push_back({g.nx, g.hx(), mass.stats, mom.stats});
    out.boundary_kink_warning = out.boundary_kink_warning || mass.touched_vacuum;
  }

  // Least-squares slope of log(max) vs log(h) over floor-free levels.
  auto fit = [&](auto stat_of) -> std::optional<double> {
    std::vector<double> lx, ly;
    for (const ConvergenceLevel& lv : out.levels) {
      const double m = stat_of(lv);
      if (m < 10.0 * out.ode_tolerance_floor) {
        out.floor_limited = true;
        continue;
      }
      lx.push_back(std::log(lv.h));
      ly.push_back(std::log(m));
    }
    const std::size_t n = lx.size();
    if (n < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  out.observed_order_mass = fit([](const ConvergenceLevel& l) { return l.mass.max; });
  out.observed_order_momentum = fit([](const ConvergenceLevel& l) { return l.momentum.max; });
  return out;
}

double total_mass(const TrajectoryState& state, const ModelParams& params, double xi,
                  double quad_tol) {
  if (!(quad_tol > 0.0)) throw std::invalid_argument("total_mass: quad_tol must be positive");
  const SupportSet sup = support(state, params, xi);
  if (sup.kind == SupportSet::Kind::EmptyInterior) return 0.0;
  if (sup.kind != SupportSet::Kind::Interval) {
    throw UnboundedSupport("total_mass: support is not a bounded interval");
  }
  const double m = 1.0 / (params.gamma - 1.0);
  auto f = [&](double x) {
    const double v = sup.q(x);
    return v <= 0.0 ? 0.0 : std::pow(v, m);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0, l1 = 0.0;
  const double value = integrator.integrate(f, sup.lo, sup.hi, 1e-12, &error, &l1);
  if (!std::isfinite(value) || error > std::max(quad_tol, 1e-13 * std::max(l1, 1.0))) {
    throw QuadratureFailure("total_mass: quadrature did not reach the requested tolerance");
  }
  return value;
}

}  // namespace eulerlab
