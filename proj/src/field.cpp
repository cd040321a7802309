#include "eulerlab/field.hpp"

#include <cmath>

namespace eulerlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QuadraticCoeffs quadratic_coeffs(const TrajectoryState& state, const ModelParams& params,
                                 double xi) {
  const double g1 = params.gamma - 1.0;
  const double c = state.adot / state.a;
  QuadraticCoeffs q;
  q.y = state.y;
  q.B = g1 / (params.K * params.gamma) * (state.bdot + state.b * c);
  q.C = g1 * xi / (2.0 * params.K * params.gamma * std::pow(state.a, params.gamma + 1.0));
  return q;
}

double eval_density(double x, const TrajectoryState& state, const ModelParams& params,
                    double xi) {
  const QuadraticCoeffs q = quadratic_coeffs(state, params, xi);
  const double v = q(x);
  if (v <= 0.0) return 0.0;
  return std::pow(v, 1.0 / (params.gamma - 1.0));
}

double eval_velocity(double x, const TrajectoryState& state) {
  return state.adot / state.a * x + state.b;
}

FieldSample eval_field(double x, const TrajectoryState& state, const ModelParams& params,
                       double xi) {
  FieldSample s;
  s.x = x;
  s.rho = eval_density(x, state, params, xi);
  s.u = eval_velocity(x, state);
  s.in_support = s.rho > 0.0;
  return s;
}

SupportSet support(const TrajectoryState& state, const ModelParams& params, double xi) {
  SupportSet out;
  out.q = quadratic_coeffs(state, params, xi);
  const double y = out.q.y, B = out.q.B, C = out.q.C;

  if (C == 0.0) {
    if (B == 0.0) {
      out.kind = (y > 0.0) ? SupportSet::Kind::Unbounded : SupportSet::Kind::EmptyInterior;
      if (y > 0.0) {
        out.lo = -kInf;
        out.hi = kInf;
      }
      return out;
    }
    // q = y - B x: positive on a half line ending at y/B.
    out.kind = SupportSet::Kind::HalfLine;
    if (B > 0.0) {
      out.lo = -kInf;
      out.hi = y / B;
    } else {
      out.lo = y / B;
      out.hi = kInf;
    }
    return out;
  }

  const double disc = B * B + 4.0 * C * y;
  if (C > 0.0) {
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      out.kind = SupportSet::Kind::Interval;
      out.lo = (-B - sq) / (2.0 * C);
      out.hi = (-B + sq) / (2.0 * C);
    } else {
      out.kind = SupportSet::Kind::EmptyInterior;
    }
    return out;
  }

  // C < 0: upward-opening in the q = y - Bx - Cx^2 sense, positive for large
  // |x|; an excluded interval exists when the roots are real.
  out.kind = SupportSet::Kind::Unbounded;
  out.lo = -kInf;
  out.hi = kInf;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double r1 = (-B - sq) / (2.0 * C);
    const double r2 = (-B + sq) / (2.0 * C);
    out.gap_lo = std::min(r1, r2);
    out.gap_hi = std::max(r1, r2);
  }
  return out;
}

SupportSet support_radial(const TrajectoryState& state, const ModelParams& params,
                          double xi) {
  SupportSet s = support(state, params, xi);
  switch (s.kind) {
    case SupportSet::Kind::EmptyInterior:
      return s;
    case SupportSet::Kind::Interval:
    case SupportSet::Kind::HalfLine:
    case SupportSet::Kind::Unbounded: {
      const double lo = std::max(s.lo, 0.0);
      if (!(s.hi > lo)) {
        s.kind = SupportSet::Kind::EmptyInterior;
        s.lo = s.hi = std::numeric_limits<double>::quiet_NaN();
        return s;
      }
      s.lo = lo;
      if (s.has_gap() && s.gap_hi <= 0.0) {
        s.gap_lo = s.gap_hi = std::numeric_limits<double>::quiet_NaN();
      } else if (s.has_gap()) {
        s.gap_lo = std::max(s.gap_lo, 0.0);
      }
      if (s.kind == SupportSet::Kind::Unbounded) {
        return s;  // [0, inf), possibly minus a clipped gap
      }
      if (std::isfinite(s.lo) && std::isfinite(s.hi)) {
        s.kind = SupportSet::Kind::Interval;
      } else {
        s.kind = SupportSet::Kind::HalfLine;
      }
      return s;
    }
  }
  return s;
}

FieldSample eval_radial(double r, const TrajectoryState& state, const ModelParams& params,
                        double xi) {
  if (r < 0.0) throw NegativeRadius("eval_radial: r must be nonnegative");
  return eval_field(r, state, params, xi);
}

BValue closed_form_b_xi0(double t, const SeedData& seed, const ModelParams& params) {
  if (seed.xi != 0.0) {
    throw std::invalid_argument("closed_form_b_xi0: requires xi = 0");
  }
  const double a0 = seed.a0, a1 = seed.a1, g = params.gamma;

  if (a1 == 0.0) {
    // a is constant, so bddot = 0.
    return {seed.b0 + seed.b1 * t, seed.b1};
  }

  const double s = a0 + a1 * t;
  if (!(s > 0.0)) throw std::domain_error("closed_form_b_xi0: a(t) <= 0");

  if (std::abs(g - 2.0) < 1e-12) {
    // Double root m = -1: b = (C1 + C2 ln s) / s.
    const double L0 = std::log(a0);
    const double c2 = a0 * seed.b0 + a0 * a0 * seed.b1 / a1;
    const double c1 = a0 * seed.b0 - c2 * L0;
    const double L = std::log(s);
    const double b = (c1 + c2 * L) / s;
    const double dbds = (c2 - c1 - c2 * L) / (s * s);
    return {b, a1 * dbds};
  }

  // b = C1 s^m1 + C2 s^m2 with m1 = -1, m2 = 1-g; constants from the 2x2
  // system for (b0, b1).
  const double m1 = -1.0, m2 = 1.0 - g;
  const double p11 = std::pow(a0, m1), p12 = std::pow(a0, m2);
  const double p21 = a1 * m1 * std::pow(a0, m1 - 1.0);
  const double p22 = a1 * m2 * std::pow(a0, m2 - 1.0);
  const double det = p11 * p22 - p12 * p21;
  const double c1 = (seed.b0 * p22 - p12 * seed.b1) / det;
  const double c2 = (p11 * seed.b1 - seed.b0 * p21) / det;
  const double b = c1 * std::pow(s, m1) + c2 * std::pow(s, m2);
  const double bdot =
      a1 * (c1 * m1 * std::pow(s, m1 - 1.0) + c2 * m2 * std::pow(s, m2 - 1.0));
  return {b, bdot};
}

double closed_form_y_b0(double a_at_t, const SeedData& seed, const ModelParams& params) {
  if (seed.b0 != 0.0 || seed.b1 != 0.0) {
    throw std::invalid_argument("closed_form_y_b0: requires b0 = b1 = 0");
  }
  if (!(a_at_t > 0.0)) throw std::domain_error("closed_form_y_b0: a must be positive");
  const double g1 = params.gamma - 1.0;
  return std::pow(seed.alpha, g1) * std::pow(seed.a0 / a_at_t, g1);
}

}  // namespace eulerlab
