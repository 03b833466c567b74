#pragma once

// Adaptive Runge-Kutta-Fehlberg 4(5) integration with event location.
//
// The embedded pair estimates the local error from the difference of the
// fourth- and fifth-order solutions; the fifth-order solution is propagated.
// Events are located by bisection on the substep that brackets a sign change,
// re-taking a single RKF step of the trial length from the start of that
// substep.

#include "core/types.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace rhomb::integrate {

struct IntegratorConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.05;
  // Escape bound on |coordinate|, applied to the first guard_dims components
  // (all of them when guard_dims < 0).
  double guard = 1000.0;
  int guard_dims = -1;
  long max_steps = 20'000'000;

  void validate() const {
    if (!(abs_tol > 0 && rel_tol > 0)) throw InvalidArgument("tolerances must be positive");
    if (!(h_min > 0 && h_min <= h_init && h_init <= h_max)) {
      throw InvalidArgument("require 0 < h_min <= h_init <= h_max");
    }
  }
};

inline IntegratorConfig with_tolerance(double tol) {
  IntegratorConfig c;
  c.abs_tol = c.rel_tol = tol;
  return c;
}

enum class Direction { Rising, Falling, Both };

template <class State>
struct EventSpec {
  std::function<double(double, const State&)> g;
  Direction direction = Direction::Both;
  double refine_tol = 1e-13;
  // Optional extra escape test, checked after every accepted step.
  std::function<bool(const State&)> escape;
};

template <class State>
struct Sample {
  double s;
  State y;
};

template <class State>
struct Trajectory {
  std::vector<Sample<State>> samples;
  bool escaped = false;
  long steps = 0;

  const Sample<State>& back() const { return samples.back(); }
};

template <class State>
struct EventHit {
  double s;
  State y;
};

namespace detail {

// Fehlberg coefficients.
inline constexpr double c2 = 1.0 / 4, c3 = 3.0 / 8, c4 = 12.0 / 13, c6 = 1.0 / 2;
inline constexpr double a21 = 1.0 / 4;
inline constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
inline constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
inline constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513,
                        a54 = -845.0 / 4104;
inline constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565,
                        a64 = 1859.0 / 4104, a65 = -11.0 / 40;
inline constexpr double b1 = 16.0 / 135, b3 = 6656.0 / 12825, b4 = 28561.0 / 56430,
                        b5 = -9.0 / 50, b6 = 2.0 / 55;
// Fifth-order minus fourth-order weights.
inline constexpr double e1 = 1.0 / 360, e3 = -128.0 / 4275, e4 = -2197.0 / 75240,
                        e5 = 1.0 / 50, e6 = 2.0 / 55;

}  // namespace detail

// Single-step machinery shared by the drivers below. Rhs is a callable
// State(const State&); the flows integrated here are autonomous.
template <class State, class Rhs>
class Rkf45 {
 public:
  Rkf45(Rhs rhs, IntegratorConfig cfg) : rhs_(std::move(rhs)), cfg_(cfg) {
    cfg_.validate();
  }

  const IntegratorConfig& config() const { return cfg_; }

  struct Trial {
    State y;
    double err;  // scaled max-norm error, accept when <= 1
  };

  Trial attempt(const State& y, double h) const {
    using namespace detail;
    const State k1 = rhs_(y);
    const State k2 = rhs_(State(y + h * (a21 * k1)));
    const State k3 = rhs_(State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = rhs_(State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = rhs_(State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        rhs_(State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    Trial t{State(y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)), 0.0};
    const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(t.y[i]));
      worst = std::max(worst, std::abs(e[i]) / scale);
    }
    t.err = std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
    return t;
  }

  // Advance (s, y) by one accepted step no longer than h_cap. h is the
  // proposed step on entry and the proposal for the next step on exit.
  // Returns the length of the accepted step.
  double advance(double& s, State& y, double& h, double h_cap) const {
    for (;;) {
      const double step = std::min({h, h_cap, cfg_.h_max});
      Trial t = attempt(y, step);
      const double factor =
          t.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(t.err, -0.2), 0.2, 5.0);
      if (t.err <= 1.0) {
        s += step;
        y = std::move(t.y);
        // A step shortened only to land on h_cap should not shrink the next one.
        h = std::max(h, step * factor);
        h = std::min(h, cfg_.h_max);
        if (step < h_cap) h = std::min(h, step * factor);
        return step;
      }
      h = step * factor;
      if (h < cfg_.h_min) {
        throw StepUnderflow("integrator step fell below h_min at s = " +
                            std::to_string(s));
      }
    }
  }

  bool escaped(const State& y) const {
    const Eigen::Index n = cfg_.guard_dims < 0 ? y.size() : cfg_.guard_dims;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(std::abs(y[i]) <= cfg_.guard)) return true;
    }
    return false;
  }

 private:
  Rhs rhs_;
  IntegratorConfig cfg_;
};

template <class State, class Rhs>
Rkf45<State, Rhs> make_stepper(Rhs rhs, IntegratorConfig cfg) {
  return Rkf45<State, Rhs>(std::move(rhs), cfg);
}

// Integrate from s = 0 to s_end, recording every accepted step. Escape past
// the guard ends the run early with escaped = true.
template <class State, class Rhs>
Trajectory<State> integrate(Rhs rhs, const State& y0, double s_end,
                            const IntegratorConfig& cfg, bool record = true) {
  auto stepper = make_stepper<State>(std::move(rhs), cfg);
  Trajectory<State> out;
  out.samples.push_back({0.0, y0});
  double s = 0.0;
  State y = y0;
  double h = cfg.h_init;
  while (s < s_end) {
    const double remaining = s_end - s;
    stepper.advance(s, y, h, remaining);
    if (s_end - s < 1e-14 * std::max(1.0, std::abs(s_end))) s = s_end;
    ++out.steps;
    if (record) {
      out.samples.push_back({s, y});
    }
    if (stepper.escaped(y)) {
      out.escaped = true;
      break;
    }
    if (out.steps > cfg.max_steps) throw ConvergenceError("integrate: step budget exhausted");
  }
  if (!record) out.samples.push_back({s, y});
  return out;
}

// Endpoint only.
template <class State, class Rhs>
State integrate_to(Rhs rhs, const State& y0, double s_end, const IntegratorConfig& cfg) {
  auto tr = integrate<State>(std::move(rhs), y0, s_end, cfg, false);
  if (tr.escaped) throw DomainError("integrate_to: trajectory escaped the guard");
  return tr.back().y;
}

namespace detail {

inline bool crosses(double g0, double g1, Direction dir) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Both: return rising || falling;
  }
  return false;
}

// Bisect on [0, h] from (s0, y0), where the event changes sign, down to
// refine_tol.
template <class State, class Stepper>
EventHit<State> refine(const Stepper& stepper, const EventSpec<State>& ev, double s0,
                       const State& y0, double g0, double h) {
  double lo = 0.0, hi = h;
  State y_hi = stepper.attempt(y0, h).y;
  while (hi - lo > ev.refine_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    State y_mid = stepper.attempt(y0, mid).y;
    const double gm = ev.g(s0 + mid, y_mid);
    if ((gm < 0.0) == (g0 < 0.0) && gm != 0.0) {
      lo = mid;
    } else {
      hi = mid;
      y_hi = std::move(y_mid);
    }
  }
  return {s0 + hi, y_hi};
}

}  // namespace detail

enum class StopReason { Event, Escaped };

template <class State>
struct UntilResult {
  StopReason reason = StopReason::Event;
  double s = 0.0;
  State y;
};

// First s > 0 at which the event function crosses zero in the requested
// direction. Escape past the guard is returned as StopReason::Escaped with
// the last state; reaching the horizon first throws ConvergenceError.
template <class State, class Rhs>
UntilResult<State> integrate_until(Rhs rhs, const State& y0, const EventSpec<State>& ev,
                                   const IntegratorConfig& cfg, double horizon) {
  if (!(ev.refine_tol > 0)) throw InvalidArgument("refine_tol must be positive");
  auto stepper = make_stepper<State>(std::move(rhs), cfg);
  double s = 0.0;
  State y = y0;
  double h = cfg.h_init;
  double g = ev.g(s, y);
  long steps = 0;
  while (s < horizon) {
    const double s_prev = s;
    const State y_prev = y;
    const double g_prev = g;
    const double taken = stepper.advance(s, y, h, horizon - s);
    g = ev.g(s, y);
    if (g_prev != 0.0 && detail::crosses(g_prev, g, ev.direction)) {
      auto hit = detail::refine(stepper, ev, s_prev, y_prev, g_prev, taken);
      return {StopReason::Event, hit.s, std::move(hit.y)};
    }
    if (stepper.escaped(y) || (ev.escape && ev.escape(y))) return {StopReason::Escaped, s, y};
    if (++steps > cfg.max_steps) throw ConvergenceError("integrate_until: step budget exhausted");
  }
  throw ConvergenceError("integrate_until: no event before the horizon");
}

// States at the given increasing grid of s values (grid[0] must be 0). The
// step size carries over between grid points.
template <class State, class Rhs>
std::vector<State> integrate_grid(Rhs rhs, const State& y0, const std::vector<double>& grid,
                                  const IntegratorConfig& cfg) {
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("grid must start at 0");
  auto stepper = make_stepper<State>(std::move(rhs), cfg);
  std::vector<State> out;
  out.reserve(grid.size());
  out.push_back(y0);
  double s = 0.0;
  State y = y0;
  double h = cfg.h_init;
  long steps = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double target = grid[k];
    if (!(target >= s)) throw InvalidArgument("grid must be increasing");
    while (target - s > 1e-14 * std::max(1.0, std::abs(target))) {
      stepper.advance(s, y, h, target - s);
      if (stepper.escaped(y)) throw DomainError("integrate_grid: trajectory escaped");
      if (++steps > cfg.max_steps) throw ConvergenceError("integrate_grid: step budget exhausted");
    }
    s = target;
    out.push_back(y);
  }
  return out;
}

}  // namespace rhomb::integrate
