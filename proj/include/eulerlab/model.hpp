#pragma once

#include <cmath>
#include <stdexcept>

namespace eulerlab {

/// Physical constants of the pressure law P = K * rho^gamma, plus the
/// optional Navier-Stokes viscosity. Invalid values are rejected on
/// construction.
struct ModelParams {
  double K;
  double gamma;
  double mu;

  explicit ModelParams(double K_, double gamma_, double mu_ = 0.0)
      : K(K_), gamma(gamma_), mu(mu_) {
    if (!(K > 0.0)) throw std::invalid_argument("ModelParams: K must be positive");
    if (!(gamma > 1.0)) throw std::invalid_argument("ModelParams: gamma must exceed 1");
    if (!(mu >= 0.0)) throw std::invalid_argument("ModelParams: mu must be nonnegative");
  }
};

/// Initial data selecting one member of the solution family:
/// a(0)=a0, da/dt(0)=a1, the scale-equation constant xi, b(0)=b0,
/// db/dt(0)=b1, and the centre density rho(0,0)=alpha.
struct SeedData {
  double a0;
  double a1;
  double xi;
  double b0;
  double b1;
  double alpha;

  explicit SeedData(double a0_, double a1_, double xi_, double b0_ = 0.0,
                    double b1_ = 0.0, double alpha_ = 1.0)
      : a0(a0_), a1(a1_), xi(xi_), b0(b0_), b1(b1_), alpha(alpha_) {
    if (!(a0 > 0.0)) throw std::invalid_argument("SeedData: a0 must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("SeedData: alpha must be nonnegative");
    if (!std::isfinite(a1) || !std::isfinite(xi) || !std::isfinite(b0) ||
        !std::isfinite(b1)) {
      throw std::invalid_argument("SeedData: non-finite field");
    }
  }

  /// Initial value of the y component, y(0) = alpha^(gamma-1).
  [[nodiscard]] double y0(const ModelParams& params) const {
    return std::pow(alpha, params.gamma - 1.0);
  }
};

// ---------------------------------------------------------------------------
// Error types. invalid_argument-derived errors indicate bad configuration;
// runtime_error-derived ones indicate numerical failure at run time.
// ---------------------------------------------------------------------------

struct InvalidTolerance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NegativeRadius : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridOutsideSupport : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct VacuumOnGrid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BlowupInsideRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnboundedSupport : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotABlowupTrajectory : std::logic_error {
  using std::logic_error::logic_error;
};

struct NotABlowupSeed : std::logic_error {
  using std::logic_error::logic_error;
};

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eulerlab
