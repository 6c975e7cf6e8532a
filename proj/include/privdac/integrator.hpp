#pragma once

#include <string>

#include <Eigen/Dense>

#include "privdac/errors.hpp"
#include "privdac/trace.hpp"

namespace privdac {

/**
 * @brief One classical fourth-order Runge-Kutta step.
 *
 * rhs(t, y) returns y'. Stages are combined in a fixed order so repeated
 * calls with equal inputs give bit-identical results. Throws
 * IntegrationError if any stage or the result is non-finite.
 */
template <class Rhs>
Eigen::VectorXd rk4_step(Rhs&& rhs, double t, const Eigen::VectorXd& y, double dt) {
  auto check = [&](const Eigen::VectorXd& v, const char* stage) {
    if (!v.allFinite()) {
      throw IntegrationError(std::string("non-finite RK4 stage ") + stage + " at t=" + format_double(t));
    }
  };
  const double half = 0.5 * dt;
  const Eigen::VectorXd k1 = rhs(t, y);
  check(k1, "k1");
  const Eigen::VectorXd k2 = rhs(t + half, Eigen::VectorXd(y + half * k1));
  check(k2, "k2");
  const Eigen::VectorXd k3 = rhs(t + half, Eigen::VectorXd(y + half * k2));
  check(k3, "k3");
  const Eigen::VectorXd k4 = rhs(t + dt, Eigen::VectorXd(y + dt * k3));
  check(k4, "k4");
  Eigen::VectorXd next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check(next, "update");
  return next;
}

}  // namespace privdac
