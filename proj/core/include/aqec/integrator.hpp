#pragma once

// Adaptive Dormand-Prince 5(4) stepper with FSAL, generic over Eigen dense
// types (matrices, vectors). Used for density matrices, kets, and the
// five-level population/coherence ODEs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "aqec/error.hpp"

namespace aqec::integrate {

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Absolute floor on the step size; below it the stepper throws StiffnessError.
  double h_min = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

template <class State>
double scaled_error_norm(const State& err, const State& y0, const State& y1, const Tolerances& tol) {
  // RMS of err / (atol + rtol * max(|y0|, |y1|)), elementwise.
  const auto scale =
      (y0.cwiseAbs().cwiseMax(y1.cwiseAbs()) * tol.rtol).array() + tol.atol;
  const auto ratio = err.cwiseAbs().array() / scale;
  return std::sqrt(ratio.square().mean());
}

/// Single-trajectory stepper. Holds the FSAL derivative between steps, so one
/// instance must follow one continuous solution.
template <class State, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, Tolerances tol) : rhs_(std::move(rhs)), tol_(tol) {}

  const StepStats& stats() const noexcept { return stats_; }
  const Tolerances& tolerances() const noexcept { return tol_; }

  /// Drops the cached derivative, e.g. after the state was modified externally.
  void reset() { have_k1_ = false; }

  /// Initial step heuristic (Hairer, Norsett & Wanner, II.4).
  double initial_step(double t, const State& y) {
    const State f0 = eval(t, y);
    const double d0 = rms_scaled(y, y);
    const double d1 = rms_scaled(f0, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, tol_.h_max);
    const State y1 = y + h0 * f0;
    const State f1 = eval(t + h0, y1);
    const double d2 = rms_scaled(State(f1 - f0), y) / h0;
    const double h1 = (std::max(d1, d2) <= 1e-15)
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::min({100 * h0, h1, tol_.h_max});
  }

  /// Advances (t, y) by one accepted step not exceeding t_end. `h` is the
  /// proposed step on input and the suggested next step on output.
  void step(double& t, State& y, double& h, double t_end) {
    if (!have_k1_) {
      k1_ = eval(t, y);
      have_k1_ = true;
    }
    for (;;) {
      const double remaining = t_end - t;
      bool clipped = false;
      double hs = std::min(h, tol_.h_max);
      if (hs >= remaining) {
        hs = remaining;
        clipped = true;
      }
      if (hs < tol_.h_min) {
        if (remaining <= tol_.h_min) {
          // Landing on t_end within the floor; take the tiny step directly.
          hs = remaining;
        } else {
          throw StiffnessError(t, "step size underflow (h=" + std::to_string(hs) +
                                      ") at t=" + std::to_string(t));
        }
      }
      attempt(t, y, hs);
      const double err = scaled_error_norm(err_, y, y_new_, tol_);
      if (err <= 1.0 || hs <= tol_.h_min) {
        ++stats_.accepted;
        t = clipped ? t_end : t + hs;
        y = y_new_;
        k1_ = k7_;
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clipped step says nothing about the natural step size; keep h.
        h = clipped ? std::max(h, hs * fac) : hs * fac;
        return;
      }
      ++stats_.rejected;
      h = hs * std::max(0.2, 0.9 * std::pow(err, -0.25));
    }
  }

  /// Integrates from t0 to t1, calling `on_accept(t, y)` after each accepted step.
  /// on_accept may modify y (e.g. re-symmetrization); the FSAL cache is refreshed.
  template <class OnAccept>
  void integrate(double& t, State& y, double& h, double t1, OnAccept&& on_accept) {
    while (t < t1) {
      step(t, y, h, t1);
      if (on_accept(t, y)) reset();
    }
  }

  /// One uncontrolled 5th-order step of size hs from (t, y). Leaves the FSAL
  /// cache untouched; used to re-evaluate inside an already accepted step.
  State dp5_step(double t, const State& y, double hs) {
    const State saved = have_k1_ ? k1_ : State();
    const bool had = have_k1_;
    k1_ = eval(t, y);
    attempt(t, y, hs);
    State out = y_new_;
    if (had) k1_ = saved;
    have_k1_ = had;
    return out;
  }

  /// Single classical RK4 step, used by the fixed-step cross-check path.
  State rk4_step(double t, const State& y, double hs) {
    const State a = eval(t, y);
    const State b = eval(t + 0.5 * hs, State(y + 0.5 * hs * a));
    const State c = eval(t + 0.5 * hs, State(y + 0.5 * hs * b));
    const State d = eval(t + hs, State(y + hs * c));
    return y + (hs / 6.0) * (a + 2.0 * b + 2.0 * c + d);
  }

 private:
  State eval(double t, const State& y) {
    ++stats_.rhs_evaluations;
    return rhs_(t, y);
  }

  double rms_scaled(const State& v, const State& y) const {
    const auto scale = (y.cwiseAbs() * tol_.rtol).array() + tol_.atol;
    return std::sqrt((v.cwiseAbs().array() / scale).square().mean());
  }

  void attempt(double t, const State& y, double hs) {
    // Dormand-Prince 5(4) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State& k1 = k1_;
    k2_ = eval(t + c2 * hs, State(y + hs * a21 * k1));
    k3_ = eval(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2_)));
    k4_ = eval(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2_ + a43 * k3_)));
    k5_ = eval(t + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2_ + a53 * k3_ + a54 * k4_)));
    k6_ = eval(t + hs,
               State(y + hs * (a61 * k1 + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_)));
    y_new_ = y + hs * (b1 * k1 + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    k7_ = eval(t + hs, y_new_);
    err_ = hs * (e1 * k1 + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
  }

  Rhs rhs_;
  Tolerances tol_;
  StepStats stats_;
  bool have_k1_ = false;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, y_new_, err_;
};

}  // namespace aqec::integrate
