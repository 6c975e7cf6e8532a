#pragma once

#include <optional>

#include <Eigen/Dense>

namespace privdac {

/// Unicycle pose; theta is unwrapped.
struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct PoseRate {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// varpi in (0, 1], integrated as varpi' = -|v_d| varpi from varpi(0) = 1.
struct FormationAux {
  double varpi = 1.0;
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
};

/// Body-frame tracking errors. e_theta_bar == e_theta - rho always.
struct FormationErrors {
  double e_x = 0.0;
  double e_y = 0.0;
  double e_theta = 0.0;
  double e_theta_bar = 0.0;
  double rho = 0.0;

  /// Copy with rho set and e_theta_bar recomputed.
  FormationErrors with_rho(double value) const {
    FormationErrors out = *this;
    out.rho = value;
    out.e_theta_bar = e_theta - value;
    return out;
  }
};

/**
 * @brief Controller gains.
 *
 * gamma3 must dominate sup |theta_d'|; this is checked after a run, not
 * here. sgn_epsilon > 0 replaces sgn(e) by tanh(e / sgn_epsilon).
 */
struct ControllerGains {
  double gamma1 = 1.5;
  double gamma2 = 2.0;
  double gamma3 = 1.0;
  double gamma4 = 5.0;
  double iota0 = 1.0;
  double iota1 = 1.0;
  double iota2 = 1.0;
  double sgn_epsilon = 0.1;

  void validate() const;
  bool operator==(const ControllerGains&) const = default;
};

/// s' = v [cos theta, sin theta], theta' = omega.
PoseRate unicycle_rhs(const RobotPose& pose, double v, double omega);

struct HeadingVelocity {
  double theta_d = 0.0;
  double v_d = 0.0;
};

/**
 * @brief theta_d = atan2(c'_y, c'_x), v_d = ||c'||.
 *
 * With a previous heading the result is shifted by a multiple of 2 pi to the
 * nearest equivalent of it, so theta_d stays continuous. Below v_d = 1e-9
 * the previous heading is held (0 when there is none).
 */
HeadingVelocity desired_heading_velocity(const Eigen::Vector2d& c_alpha_dot,
                                         std::optional<double> previous_theta_d = std::nullopt);

/// Rotate s - c - b into the body frame; e_theta = theta - theta_d, rho = 0.
FormationErrors compute_errors(const RobotPose& pose, const Eigen::Vector2d& c_alpha, const Eigen::Vector2d& bias,
                               double theta_d);

struct RhoValue {
  double rho = 0.0;
  double rho_dot = 0.0;
};

/**
 * @brief rho = iota0 varpi tanh(iota1 ||e||) sin(iota2 t) and its time derivative.
 *
 * Chain rule with varpi' = -|v_d| varpi and
 * d||e||/dt = (e_x e_x' + e_y e_y') / ||e||; the radial term is dropped when
 * ||e|| < 1e-9.
 */
RhoValue rho_and_derivative(double t, double e_x, double e_y, double varpi, double v_d, double de_x, double de_y,
                            const ControllerGains& gains);

struct VelocityCommand {
  double v = 0.0;
  double omega = 0.0;
};

/**
 * @brief Tracking law.
 *
 *   v     = -g1 tanh(e_x) + cos(e_theta) v_d
 *   omega = -g2 tanh(eb) + rho' - g3 sgn(eb) - g4 [(sin e_theta - sin rho) / eb] v_d e_y
 *
 * with eb = e_theta_bar. The bracket is evaluated as
 * cos((e_theta + rho) / 2) sinc(eb / 2), which has no 0/0 at eb = 0.
 * Throws ValidationError on non-finite input.
 */
VelocityCommand control_law(const FormationErrors& err, double v_d, double rho_dot, const ControllerGains& gains);

struct LyapunovValues {
  double v = 0.0;
  double w = 0.0;
};

/// V = g4 (e_x^2 + e_y^2) / 2 + eb^2 / 2, W = g1 g4 e_x tanh(e_x) + g2 eb tanh(eb).
LyapunovValues lyapunov_monitor(const FormationErrors& err, const ControllerGains& gains);

/// Upper bound (sqrt(V0) + sqrt(g4 / 2) iota0)^2 on V along a closed-loop run.
double lyapunov_bound(double v0, const ControllerGains& gains);

/// Everything one robot's closed loop produces at one instant.
struct RobotEvaluation {
  PoseRate pose_rate;
  double varpi_rate = 0.0;
  HeadingVelocity heading;
  FormationErrors errors;
  double rho_dot = 0.0;
  VelocityCommand command;
  LyapunovValues lyapunov;
};

/**
 * @brief Closed-loop evaluation of one robot tracking c_alpha + bias.
 *
 * e_x', e_y' fed to rho_and_derivative omit the omega terms, which cancel in
 * the radial derivative, so omega is never needed to compute rho'.
 */
RobotEvaluation evaluate_robot(double t, const RobotPose& pose, const FormationAux& aux,
                               const Eigen::Vector2d& c_alpha, const Eigen::Vector2d& c_alpha_dot,
                               std::optional<double> previous_theta_d, const ControllerGains& gains);

}  // namespace privdac
