#pragma once

#include <limits>

#include "eulerlab/model.hpp"
#include "eulerlab/ode.hpp"

namespace eulerlab {

/// One evaluation of the closed-form fields at a point. rho is already
/// vacuum-truncated: rho = 0 exactly when in_support is false.
struct FieldSample {
  double x;
  double rho;
  double u;
  bool in_support;
};

/// Coefficients of the density quadratic q(x) = y - B*x - C*x^2, where
/// rho^(gamma-1)(x,t) = max(q(x), 0).
struct QuadraticCoeffs {
  double y;
  double B;
  double C;

  [[nodiscard]] double operator()(double x) const { return y - (B + C * x) * x; }
};

/// The set where the density quadratic is positive.
struct SupportSet {
  enum class Kind { Interval, HalfLine, Unbounded, EmptyInterior };

  Kind kind;
  QuadraticCoeffs q;
  /// Support bounds; -inf / +inf on unbounded sides, NaN for EmptyInterior.
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  /// For Kind::Unbounded with a downward excursion (C < 0 with real roots):
  /// the excluded interval where q <= 0. NaN when absent.
  double gap_lo = std::numeric_limits<double>::quiet_NaN();
  double gap_hi = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] bool has_gap() const { return gap_lo == gap_lo; }
  [[nodiscard]] bool contains(double x) const { return q(x) > 0.0; }
};

[[nodiscard]] QuadraticCoeffs quadratic_coeffs(const TrajectoryState& state,
                                               const ModelParams& params, double xi);

/// rho(x,t) = max(q(x), 0)^(1/(gamma-1)).
[[nodiscard]] double eval_density(double x, const TrajectoryState& state,
                                  const ModelParams& params, double xi);

/// u(x,t) = (adot/a) x + b.
[[nodiscard]] double eval_velocity(double x, const TrajectoryState& state);

[[nodiscard]] FieldSample eval_field(double x, const TrajectoryState& state,
                                     const ModelParams& params, double xi);

[[nodiscard]] SupportSet support(const TrajectoryState& state, const ModelParams& params,
                                 double xi);

/// Support of the radial-coordinate solution: the planar support intersected
/// with r >= 0.
[[nodiscard]] SupportSet support_radial(const TrajectoryState& state,
                                        const ModelParams& params, double xi);

/// Radial variant of the field evaluation; throws NegativeRadius for r < 0.
[[nodiscard]] FieldSample eval_radial(double r, const TrajectoryState& state,
                                      const ModelParams& params, double xi);

struct BValue {
  double b;
  double bdot;
};

/// Closed-form b(t) for xi = 0, where a(t) = a0 + a1*t turns the b equation
/// equidimensional. Exponents are the roots of m^2 + gamma*m + (gamma-1) = 0,
/// i.e. m = -1 and m = 1-gamma, with a logarithmic second solution at the
/// gamma = 2 double root. a1 = 0 reduces to constant coefficients.
[[nodiscard]] BValue closed_form_b_xi0(double t, const SeedData& seed,
                                       const ModelParams& params);

/// Closed-form y(t) for b == 0: y = alpha^(gamma-1) * (a0/a)^(gamma-1).
[[nodiscard]] double closed_form_y_b0(double a_at_t, const SeedData& seed,
                                      const ModelParams& params);

}  // namespace eulerlab
