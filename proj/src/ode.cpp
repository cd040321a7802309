#include "eulerlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eulerlab {

namespace {

using State5 = std::array<double, 5>;

// Dormand-Prince 5(4) tableau. The system is autonomous, so the stage nodes
// c_i never enter the stage evaluations.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0,
                 kA75 = -2187.0 / 6784.0, kA76 = 11.0 / 84.0;
// Difference between 5th- and 4th-order weights.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double kD1 = -12715105075.0 / 11282082432.0, kD3 = 87487479700.0 / 32700410799.0,
                 kD4 = -10690763975.0 / 1880347072.0, kD5 = 701980252875.0 / 199316789632.0,
                 kD6 = -1453857185.0 / 822651844.0, kD7 = 69997945.0 / 29380423.0;

// Step-size controller constants (Lund stabilisation).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // smallest allowed h ratio
constexpr double kFacMax = 10.0;  // largest allowed h ratio

bool eval_rhs(const double* s, double* f, const ModelParams& p, double xi,
              YEquationForm form) {
  const double a = s[0];
  if (!(a > 0.0) || !std::isfinite(a)) return false;
  const double c = s[1] / a;
  const double a_gamma = std::pow(a, p.gamma);
  const double g1 = p.gamma - 1.0;
  f[0] = s[1];
  f[1] = xi / a_gamma;
  f[2] = s[3];
  f[3] = -(1.0 + p.gamma) * c * s[3] - (2.0 * xi / (a_gamma * a) + g1 * c * c) * s[2];
  const double drive = g1 / (p.K * p.gamma) * (s[3] + s[2] * c) * s[2];
  const double y_coef = (form == YEquationForm::GammaScaled) ? g1 : 1.0;
  f[4] = -y_coef * c * s[4] + drive;
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(f[i])) return false;
  }
  return true;
}

double error_norm(const State5& y, const State5& ynew, const State5& err, double atol,
                  double rtol) {
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    const double e = err[i] / sc;
    sum += e * e;
  }
  return std::sqrt(sum / 5.0);
}

double eval_dense(const DenseSegment& seg, int comp, double theta) {
  const double t1 = 1.0 - theta;
  const auto& r = seg.r;
  return r[0][comp] +
         theta * (r[1][comp] + t1 * (r[2][comp] + theta * (r[3][comp] + t1 * r[4][comp])));
}

double eval_dense_derivative(const DenseSegment& seg, int comp, double theta) {
  // d/dtheta of r1 + th*r2 + th(1-th)r3 + th^2(1-th)r4 + th^2(1-th)^2 r5,
  // divided by h to give d/dt.
  const auto& r = seg.r;
  const double d = r[1][comp] + (1.0 - 2.0 * theta) * r[2][comp] +
                   theta * (2.0 - 3.0 * theta) * r[3][comp] +
                   2.0 * theta * (1.0 - theta) * (1.0 - 2.0 * theta) * r[4][comp];
  return d / seg.h;
}

// Bisects the dense a-component for a(t) = threshold on [t0, t0+h], assuming
// a(t0) > threshold >= a(t0+h). Returns a time with a <= threshold.
double bisect_collapse(const DenseSegment& seg, double threshold) {
  double lo = 0.0, hi = 1.0;
  while ((hi - lo) * std::abs(seg.h) > 1e-12 && hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (eval_dense(seg, 0, mid) > threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return seg.t0 + hi * seg.h;
}

// Initial step-size heuristic (order-5 version of the standard algorithm).
double initial_step(const State5& y0, const State5& f0, double t_end, double atol,
                    double rtol, const ModelParams& p, double xi, YEquationForm form) {
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc = atol + rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / 5.0);
  d1 = std::sqrt(d1 / 5.0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_end);

  State5 y1, f1;
  for (int i = 0; i < 5; ++i) y1[i] = y0[i] + h0 * f0[i];
  double d2 = 0.0;
  if (eval_rhs(y1.data(), f1.data(), p, xi, form)) {
    for (int i = 0; i < 5; ++i) {
      const double sc = atol + rtol * std::abs(y0[i]);
      const double df = (f1[i] - f0[i]) / sc;
      d2 += df * df;
    }
    d2 = std::sqrt(d2 / 5.0) / h0;
  }
  const double dm = std::max(d1, d2);
  const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, t_end});
}

}  // namespace

const char* to_string(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::Completed: return "completed";
    case TerminationStatus::BlowupDetected: return "blowup_detected";
    case TerminationStatus::StepSizeUnderflow: return "step_size_underflow";
  }
  return "unknown";
}

double emden_rhs(double a, const ModelParams& params, double xi) {
  if (!(a > 0.0)) throw std::invalid_argument("emden_rhs: a must be positive");
  const double out = xi / std::pow(a, params.gamma);
  if (!std::isfinite(out)) throw std::overflow_error("emden_rhs: non-finite result");
  return out;
}

std::array<double, 5> coupled_rhs(const TrajectoryState& state, const ModelParams& params,
                                  double xi, YEquationForm form) {
  const double s[5] = {state.a, state.adot, state.b, state.bdot, state.y};
  std::array<double, 5> f{};
  if (!eval_rhs(s, f.data(), params, xi, form)) {
    throw std::overflow_error("coupled_rhs: evaluation failure (a near 0?)");
  }
  return f;
}

double emden_energy_at(const TrajectoryState& state, const ModelParams& params, double xi) {
  return 0.5 * state.adot * state.adot +
         xi * std::pow(state.a, 1.0 - params.gamma) / (params.gamma - 1.0);
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

const DenseSegment& Trajectory::segment_for(double t) const {
  const double t_lo = t_begin();
  const double t_hi = t_covered();
  if (segments_.empty() || t < t_lo || t > t_hi) {
    throw CoverageExceeded("trajectory: t outside covered range");
  }
  // Last segment whose start is <= t.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const DenseSegment& s) { return v < s.t0; });
  if (it != segments_.begin()) --it;
  return *it;
}

TrajectoryState Trajectory::state_at(double t) const {
  const auto& seg = segment_for(t);
  const double theta = std::clamp((t - seg.t0) / seg.h, 0.0, 1.0);
  TrajectoryState out{};
  out.t = t;
  out.a = eval_dense(seg, 0, theta);
  out.adot = eval_dense(seg, 1, theta);
  out.b = eval_dense(seg, 2, theta);
  out.bdot = eval_dense(seg, 3, theta);
  out.y = eval_dense(seg, 4, theta);
  return out;
}

std::array<double, 5> Trajectory::derivatives_at(double t) const {
  const auto& seg = segment_for(t);
  const double theta = std::clamp((t - seg.t0) / seg.h, 0.0, 1.0);
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i) out[i] = eval_dense_derivative(seg, i, theta);
  return out;
}

double Trajectory::event_time() const {
  if (status_ != TerminationStatus::BlowupDetected) {
    throw NotABlowupTrajectory("trajectory did not detect a collapse");
  }
  return event_time_;
}

double Trajectory::blowup_time() const {
  if (status_ != TerminationStatus::BlowupDetected) {
    throw NotABlowupTrajectory("trajectory did not detect a collapse");
  }
  return blowup_time_;
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

class Integrator {
 public:
  Integrator(const SeedData& seed, const ModelParams& params, const IntegrateOptions& opt)
      : params_(params), xi_(seed.xi), opt_(opt) {
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0) || !std::isfinite(opt.rtol) ||
        !std::isfinite(opt.atol)) {
      throw InvalidTolerance("integrate: rtol and atol must be positive");
    }
    y_[0] = seed.a0;
    y_[1] = seed.a1;
    y_[2] = seed.b0;
    y_[3] = seed.b1;
    y_[4] = seed.y0(params);
    collapse_threshold_ = opt.collapse_threshold_factor * seed.a0;
  }

  Trajectory run(double t_end) {
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
    init_trajectory();

    if (!eval_rhs(y_.data(), k1_.data(), params_, xi_, opt_.y_form)) {
      throw std::overflow_error("integrate: right-hand side failed at initial state");
    }
    double h = initial_step(y_, k1_, t_end, opt_.atol, opt_.rtol, params_, xi_, opt_.y_form);
    double facold = 1e-4;
    long n_steps = 0;

    while (t_ < t_end) {
      if (++n_steps > opt_.max_steps) {
        throw std::runtime_error("integrate: maximum step count exceeded");
      }
      const double eps_t = std::numeric_limits<double>::epsilon() * std::max(std::abs(t_), 1.0);
      if (h <= 16.0 * eps_t) {
        // For strongly singular collapses (large gamma) the threshold
        // crossing can lie below the resolution of t itself; a step-size
        // underflow with the scale factor racing to zero is then the
        // collapse signal.
        const double tail = (y_[1] < 0.0) ? y_[0] / -y_[1]
                                          : std::numeric_limits<double>::infinity();
        if (tail <= 1e5 * eps_t) {
          traj_.status_ = TerminationStatus::BlowupDetected;
          traj_.event_time_ = t_;
          traj_.blowup_time_ = t_ + tail;
        } else {
          traj_.status_ = TerminationStatus::StepSizeUnderflow;
        }
        return std::move(traj_);
      }
      const bool last = t_ + h >= t_end;
      if (last) h = t_end - t_;

      State5 ynew, err, k7;
      if (!try_step(h, ynew, err, k7) || !(ynew[0] > 0.0)) {
        h *= 0.5;  // stage failure or nonpositive scale factor: retry smaller
        continue;
      }
      const double errn = error_norm(y_, ynew, err, opt_.atol, opt_.rtol);
      if (errn > 1.0) {
        const double fac11 = std::pow(errn, kExpo1);
        h /= std::min(1.0 / kFacMin, fac11 / kSafety);
        continue;
      }

      // Accepted.
      push_segment(h, ynew, k7);
      if (ynew[0] <= collapse_threshold_) {
        finish_blowup();
        return std::move(traj_);
      }
      t_ = last ? t_end : t_ + h;
      y_ = ynew;
      k1_ = k7;  // FSAL
      push_state();
      if (t_ >= t_end) break;

      const double fac11 = std::pow(errn, kExpo1);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
      facold = std::max(errn, 1e-4);
      h /= fac;
    }
    traj_.status_ = TerminationStatus::Completed;
    return std::move(traj_);
  }

  Trajectory run_fixed(double t_end, long n_steps) {
    if (!(t_end > 0.0) || n_steps < 1) {
      throw std::invalid_argument("integrate_fixed: bad arguments");
    }
    init_trajectory();
    if (!eval_rhs(y_.data(), k1_.data(), params_, xi_, opt_.y_form)) {
      throw std::overflow_error("integrate_fixed: right-hand side failed at initial state");
    }
    const double h = t_end / static_cast<double>(n_steps);
    for (long i = 0; i < n_steps; ++i) {
      State5 ynew, err, k7;
      if (!try_step(h, ynew, err, k7) || !(ynew[0] > 0.0)) {
        throw std::overflow_error("integrate_fixed: step evaluation failed");
      }
      push_segment(h, ynew, k7);
      t_ = (i + 1 == n_steps) ? t_end : (i + 1) * h;
      y_ = ynew;
      k1_ = k7;
      push_state();
    }
    traj_.status_ = TerminationStatus::Completed;
    return std::move(traj_);
  }

 private:
  void init_trajectory() {
    traj_.rtol_ = opt_.rtol;
    traj_.atol_ = opt_.atol;
    traj_.collapse_threshold_ = collapse_threshold_;
    t_ = 0.0;
    push_state();
  }

  void push_state() {
    traj_.states_.push_back({t_, y_[0], y_[1], y_[2], y_[3], y_[4]});
  }

  // One RK step from (t_, y_) with stored k1_. Returns false on a stage
  // evaluation failure. On success fills ynew, the embedded error estimate
  // and k7 = f(t+h, ynew).
  bool try_step(double h, State5& ynew, State5& err, State5& k7) {
    State5 tmp;
    auto stage = [&](State5& k) {
      return eval_rhs(tmp.data(), k.data(), params_, xi_, opt_.y_form);
    };
    for (int i = 0; i < 5; ++i) tmp[i] = y_[i] + h * kA21 * k1_[i];
    if (!stage(k2_)) return false;
    for (int i = 0; i < 5; ++i) tmp[i] = y_[i] + h * (kA31 * k1_[i] + kA32 * k2_[i]);
    if (!stage(k3_)) return false;
    for (int i = 0; i < 5; ++i)
      tmp[i] = y_[i] + h * (kA41 * k1_[i] + kA42 * k2_[i] + kA43 * k3_[i]);
    if (!stage(k4_)) return false;
    for (int i = 0; i < 5; ++i)
      tmp[i] = y_[i] + h * (kA51 * k1_[i] + kA52 * k2_[i] + kA53 * k3_[i] + kA54 * k4_[i]);
    if (!stage(k5_)) return false;
    for (int i = 0; i < 5; ++i)
      tmp[i] = y_[i] + h * (kA61 * k1_[i] + kA62 * k2_[i] + kA63 * k3_[i] + kA64 * k4_[i] +
                            kA65 * k5_[i]);
    if (!stage(k6_)) return false;
    for (int i = 0; i < 5; ++i) {
      ynew[i] = y_[i] + h * (kA71 * k1_[i] + kA73 * k3_[i] + kA74 * k4_[i] +
                             kA75 * k5_[i] + kA76 * k6_[i]);
    }
    tmp = ynew;
    if (!stage(k7)) return false;
    for (int i = 0; i < 5; ++i) {
      err[i] = h * (kE1 * k1_[i] + kE3 * k3_[i] + kE4 * k4_[i] + kE5 * k5_[i] +
                    kE6 * k6_[i] + kE7 * k7[i]);
    }
    return true;
  }

  void push_segment(double h, const State5& ynew, const State5& k7) {
    DenseSegment seg;
    seg.t0 = t_;
    seg.h = h;
    for (int i = 0; i < 5; ++i) {
      const double ydiff = ynew[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      seg.r[0][i] = y_[i];
      seg.r[1][i] = ydiff;
      seg.r[2][i] = bspl;
      seg.r[3][i] = ydiff - h * k7[i] - bspl;
      seg.r[4][i] = h * (kD1 * k1_[i] + kD3 * k3_[i] + kD4 * k4_[i] + kD5 * k5_[i] +
                         kD6 * k6_[i] + kD7 * k7[i]);
    }
    traj_.segments_.push_back(seg);
  }

  // The step just pushed crossed the collapse threshold: truncate the
  // trajectory at the crossing and attach the refined collapse time.
  void finish_blowup() {
    const DenseSegment& seg = traj_.segments_.back();
    const double t_event = bisect_collapse(seg, collapse_threshold_);
    const double theta = std::clamp((t_event - seg.t0) / seg.h, 0.0, 1.0);
    TrajectoryState st{};
    st.t = t_event;
    st.a = eval_dense(seg, 0, theta);
    st.adot = eval_dense(seg, 1, theta);
    st.b = eval_dense(seg, 2, theta);
    st.bdot = eval_dense(seg, 3, theta);
    st.y = eval_dense(seg, 4, theta);
    traj_.states_.push_back(st);
    traj_.status_ = TerminationStatus::BlowupDetected;
    traj_.event_time_ = t_event;
    traj_.blowup_time_ = t_event + ((st.adot < 0.0) ? st.a / -st.adot : 0.0);
  }

  ModelParams params_;
  double xi_;
  IntegrateOptions opt_;
  Trajectory traj_;
  State5 y_{};
  State5 k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{};
  double t_ = 0.0;
  double collapse_threshold_ = 0.0;
};

Trajectory integrate(const SeedData& seed, const ModelParams& params, double t_end,
                     const IntegrateOptions& options) {
  return Integrator(seed, params, options).run(t_end);
}

Trajectory integrate(const SeedData& seed, const ModelParams& params, double t_end,
                     double rtol, double atol) {
  IntegrateOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  return integrate(seed, params, t_end, opt);
}

Trajectory integrate_fixed(const SeedData& seed, const ModelParams& params, double t_end,
                           long n_steps, const IntegrateOptions& options) {
  return Integrator(seed, params, options).run_fixed(t_end, n_steps);
}

double refine_collapse_time(const Trajectory& trajectory) {
  if (trajectory.status() != TerminationStatus::BlowupDetected) {
    throw NotABlowupTrajectory("refine_collapse_time: trajectory did not blow up");
  }
  return trajectory.blowup_time();
}

}  // namespace eulerlab
