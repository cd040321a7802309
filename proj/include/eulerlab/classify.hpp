#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eulerlab/model.hpp"
#include "eulerlab/ode.hpp"

namespace eulerlab {

enum class Verdict { BlowupFiniteTime, Global };

/// Which branch of the scale-equation dichotomy fired.
enum class Criterion {
  XiNegativeBelowThreshold,      // xi < 0, a1 under the escape threshold
  XiNegativeAtOrAboveThreshold,  // xi < 0, otherwise
  XiZeroContracting,             // xi = 0, a1 < 0 (T = -a0/a1)
  XiZeroNonContracting,          // xi = 0, otherwise
  XiPositive                     // xi > 0, always global
};

[[nodiscard]] const char* to_string(Verdict v);
[[nodiscard]] const char* to_string(Criterion c);

struct Classification {
  Verdict verdict;
  Criterion criterion;
  std::optional<double> T_formula;  // exact collapse time, xi = 0 branch only
  std::optional<double> T_numeric;  // event-detected collapse time, if computed
  double energy;
};

/// Conserved quantity of d2a/dt2 = xi/a^kappa:
/// E = a1^2/2 + xi * a0^(1-kappa)/(kappa-1).
[[nodiscard]] double emden_energy(double xi, double a0, double a1, double kappa);

[[nodiscard]] double energy(const SeedData& seed, const ModelParams& params);

/// Escape threshold on a1 for xi < 0:
/// sqrt(-2 xi/(kappa-1)) * a0^((1-kappa)/2). Equivalent to E = 0.
[[nodiscard]] double emden_threshold(double xi, double a0, double kappa);

/// Collapse-vs-global dichotomy at the generic exponent kappa > 1. Boundary
/// equality cases classify as Global.
[[nodiscard]] Classification classify_emden(double xi, double a0, double a1, double kappa);

/// Classification of a full seed; depends only on (xi, a0, a1, gamma).
[[nodiscard]] Classification classify(const SeedData& seed, const ModelParams& params);

/// Collapse time by energy quadrature: T = integral of da/sqrt(2E - 2 xi
/// a^(1-gamma)/(gamma-1)) over the collapsing branch, with the turnaround
/// handled by the substitution a = a_max - s^2. Throws NotABlowupSeed for
/// global seeds.
[[nodiscard]] double blowup_time_quadrature(const SeedData& seed, const ModelParams& params,
                                            double tol);

struct GradientCrossing {
  double bound;  // requested magnitude M
  double t;      // first time with |adot/a| >= M
};

/// First-passage times of the velocity gradient magnitude |adot/a| through a
/// ladder of bounds; requires a blown-up trajectory.
[[nodiscard]] std::vector<GradientCrossing> velocity_gradient_blowup_check(
    const Trajectory& trajectory, std::span<const double> bounds);

}  // namespace eulerlab
