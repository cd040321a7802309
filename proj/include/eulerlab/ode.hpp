#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "eulerlab/model.hpp"

namespace eulerlab {

/// Which first-order equation drives y = rho^(gamma-1)(0,t). GammaScaled is
/// the self-consistent form with damping coefficient (gamma-1)*adot/a; it is
/// the one under which the constructed fields solve the PDE. Unscaled drops
/// the (gamma-1) factor on the damping term and exists for the residual
/// arbitration mode of the verifier (the two coincide at gamma = 2).
enum class YEquationForm { GammaScaled, Unscaled };

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Collapse event threshold as a fraction of a0: the event fires when
  /// a(t) <= collapse_threshold_factor * a0.
  double collapse_threshold_factor = 1e-8;
  YEquationForm y_form = YEquationForm::GammaScaled;
  long max_steps = 50'000'000;
};

/// One sample of the reduced dynamical system. y is the untruncated constant
/// term of the density quadratic and may be negative.
struct TrajectoryState {
  double t;
  double a;
  double adot;
  double b;
  double bdot;
  double y;
};

enum class TerminationStatus { Completed, BlowupDetected, StepSizeUnderflow };

[[nodiscard]] const char* to_string(TerminationStatus status);

/// Quartic interpolation coefficients for one accepted step (valid on
/// [t0, t0+h]).
struct DenseSegment {
  double t0;
  double h;
  std::array<std::array<double, 5>, 5> r;  // r[k][component]
};

/// Result of an integration run: the accepted states, per-step dense output,
/// termination status, and the tolerances actually used. All stored states
/// have a > 0; on a collapse the final stored state sits at the event
/// threshold crossing.
class Trajectory {
 public:
  [[nodiscard]] const std::vector<TrajectoryState>& states() const { return states_; }
  [[nodiscard]] TerminationStatus status() const { return status_; }
  [[nodiscard]] double rtol() const { return rtol_; }
  [[nodiscard]] double atol() const { return atol_; }
  [[nodiscard]] double collapse_threshold() const { return collapse_threshold_; }

  [[nodiscard]] double t_begin() const { return states_.front().t; }
  /// Last time covered by the dense output.
  [[nodiscard]] double t_covered() const { return states_.back().t; }

  /// Time at which a(t) crossed the collapse threshold (BlowupDetected only).
  [[nodiscard]] double event_time() const;
  /// Refined estimate of the time where a reaches 0 (BlowupDetected only).
  [[nodiscard]] double blowup_time() const;

  /// Dense-output evaluation anywhere in [t_begin, t_covered].
  [[nodiscard]] TrajectoryState state_at(double t) const;
  /// Time derivative of the dense interpolant (d/dt of a, adot, b, bdot, y).
  [[nodiscard]] std::array<double, 5> derivatives_at(double t) const;

 private:
  friend class Integrator;
  std::vector<TrajectoryState> states_;
  std::vector<DenseSegment> segments_;
  TerminationStatus status_ = TerminationStatus::Completed;
  double rtol_ = 0.0;
  double atol_ = 0.0;
  double collapse_threshold_ = 0.0;
  double event_time_ = 0.0;
  double blowup_time_ = 0.0;

  [[nodiscard]] const DenseSegment& segment_for(double t) const;
};

/// Right-hand side of the scale equation: d2a/dt2 = xi / a^gamma.
[[nodiscard]] double emden_rhs(double a, const ModelParams& params, double xi);

/// Right-hand side of the full reduced system. Input ordering matches
/// TrajectoryState: (a, adot, b, bdot, y); returns their derivatives.
[[nodiscard]] std::array<double, 5> coupled_rhs(
    const TrajectoryState& state, const ModelParams& params, double xi,
    YEquationForm form = YEquationForm::GammaScaled);

/// Adaptive embedded Runge-Kutta 5(4) integration of the reduced system with
/// PI step control, dense output and collapse detection on a(t).
[[nodiscard]] Trajectory integrate(const SeedData& seed, const ModelParams& params,
                                   double t_end, const IntegrateOptions& options = {});

[[nodiscard]] Trajectory integrate(const SeedData& seed, const ModelParams& params,
                                   double t_end, double rtol, double atol);

/// Fixed-step variant (no error control, no events). Used for convergence
/// checks of the RK pair itself.
[[nodiscard]] Trajectory integrate_fixed(const SeedData& seed, const ModelParams& params,
                                         double t_end, long n_steps,
                                         const IntegrateOptions& options = {});

/// Recomputes the collapse time of a blown-up trajectory: bisection on the
/// dense output for the threshold crossing, then a first-order vacuum-tail
/// correction a/|adot| so the returned value estimates the time where a
/// reaches 0. Throws NotABlowupTrajectory otherwise.
[[nodiscard]] double refine_collapse_time(const Trajectory& trajectory);

/// Conserved quantity of the scale equation,
/// E = adot^2/2 + xi * a^(1-gamma)/(gamma-1).
[[nodiscard]] double emden_energy_at(const TrajectoryState& state,
                                     const ModelParams& params, double xi);

}  // namespace eulerlab
