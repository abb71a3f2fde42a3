#pragma once

namespace dqr {

// One classical fourth-order Runge-Kutta step of dy/dt = f(t, y).
// State must support +, scalar * and copy; works for double, std::complex and Eigen types.
template <class State, class Rhs>
State rk4_step(Rhs&& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace dqr
