#pragma once

#include <optional>
#include <vector>

#include "eulerlab/field.hpp"
#include "eulerlab/model.hpp"
#include "eulerlab/ode.hpp"

namespace eulerlab {

/// Space-time sampling lattice for residual evaluation. Central differences
/// use one halo step on each side, so the trajectory must cover
/// [t_lo - ht, t_hi + ht] and the window (plus one spatial halo step) must
/// stay inside the support shrunk by `margin` at every sampled time.
/// margin = 0 disables the support check: samples that fall outside the
/// support are recorded as a boundary-kink warning instead.
struct GridSpec {
  double t_lo;
  double t_hi;
  long nt;
  double x_lo;
  double x_hi;
  long nx;
  double margin = 0.05;

  [[nodiscard]] double ht() const { return (t_hi - t_lo) / static_cast<double>(nt - 1); }
  [[nodiscard]] double hx() const { return (x_hi - x_lo) / static_cast<double>(nx - 1); }
};

struct ResidualStats {
  double max;
  double l2;  // root mean square over the lattice
};

enum class MomentumForm { Conservative, NonConservative };

/// Pointwise residual field on the nt-by-nx lattice (row-major in time).
struct ResidualField {
  GridSpec grid;
  std::vector<double> values;
  ResidualStats stats;
  bool touched_vacuum = false;
};

/// Residual of mass conservation, rho_t + (rho u)_x, by second-order central
/// differences applied to exact field samples.
[[nodiscard]] ResidualField residual_mass(const GridSpec& grid, const Trajectory& traj,
                                          const SeedData& seed, const ModelParams& params);

/// Residual of the momentum equation: conservative form
/// (rho u)_t + (rho u^2)_x + (K rho^gamma)_x, or nonconservative form
/// u_t + u u_x + (K gamma/(gamma-1)) (rho^(gamma-1))_x (requires rho bounded
/// away from 0 on the lattice).
[[nodiscard]] ResidualField residual_momentum(const GridSpec& grid, const Trajectory& traj,
                                              const SeedData& seed, const ModelParams& params,
                                              MomentumForm form = MomentumForm::Conservative);

struct NsResidualResult {
  ResidualField field;
  /// Largest |mu * u_xx| seen on the lattice; analytically zero since u is
  /// linear in x, so this records pure rounding.
  double viscous_max;
};

/// Residual of the viscous momentum equation: the conservative Euler residual
/// minus mu * u_xx (discrete second difference). Requires params.mu > 0.
[[nodiscard]] NsResidualResult residual_navier_stokes(const GridSpec& grid,
                                                      const Trajectory& traj,
                                                      const SeedData& seed,
                                                      const ModelParams& params);

struct ConvergenceLevel {
  long n;    // lattice points per direction at this level
  double h;  // spatial step
  ResidualStats mass;
  ResidualStats momentum;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  /// Least-squares slope of log(max norm) vs log(h) over the levels above the
  /// ODE-tolerance floor; absent when fewer than two usable levels remain.
  std::optional<double> observed_order_mass;
  std::optional<double> observed_order_momentum;
  bool floor_limited = false;
  bool boundary_kink_warning = false;
  double ode_tolerance_floor = 0.0;
};

/// Grid-halving study: runs `levels` refinements of the base grid (doubling
/// resolution each time) and fits the observed convergence order.
[[nodiscard]] ConvergenceResult convergence_study(const GridSpec& base, const Trajectory& traj,
                                                  const SeedData& seed,
                                                  const ModelParams& params, int levels,
                                                  MomentumForm form = MomentumForm::Conservative);

/// Total mass integral of rho over an Interval support, by endpoint-aware
/// adaptive quadrature. EmptyInterior gives 0; other support kinds throw
/// UnboundedSupport.
[[nodiscard]] double total_mass(const TrajectoryState& state, const ModelParams& params,
                                double xi, double quad_tol);

}  // namespace eulerlab
