#include "privdac/formation.hpp"

#include <cmath>
#include <numbers>

#include "privdac/errors.hpp"

namespace privdac {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double signum(double x, double epsilon) {
  if (epsilon > 0.0) return std::tanh(x / epsilon);
  return static_cast<double>((x > 0.0) - (x < 0.0));
}

}  // namespace

void ControllerGains::validate() const {
  if (!(gamma1 > 0.0 && gamma2 > 0.0 && gamma3 > 0.0 && gamma4 > 0.0)) {
    throw ValidationError("controller gains gamma1..gamma4 must be positive");
  }
  if (!(iota0 > 0.0 && iota1 > 0.0 && iota2 > 0.0)) {
    throw ValidationError("rho parameters iota0..iota2 must be positive");
  }
  if (!(sgn_epsilon >= 0.0) || !std::isfinite(sgn_epsilon)) {
    throw ValidationError("sgn smoothing epsilon must be a finite non-negative number");
  }
}

PoseRate unicycle_rhs(const RobotPose& pose, double v, double omega) {
  return {v * std::cos(pose.theta), v * std::sin(pose.theta), omega};
}

HeadingVelocity desired_heading_velocity(const Eigen::Vector2d& c_alpha_dot, std::optional<double> previous_theta_d) {
  HeadingVelocity out;
  out.v_d = c_alpha_dot.norm();
  if (out.v_d < 1e-9) {
    out.theta_d = previous_theta_d.value_or(0.0);
    return out;
  }
  const double raw = std::atan2(c_alpha_dot.y(), c_alpha_dot.x());
  if (previous_theta_d) {
    out.theta_d = *previous_theta_d + std::remainder(raw - *previous_theta_d, 2.0 * std::numbers::pi);
  } else {
    out.theta_d = raw;
  }
  return out;
}

FormationErrors compute_errors(const RobotPose& pose, const Eigen::Vector2d& c_alpha, const Eigen::Vector2d& bias,
                               double theta_d) {
  const double dx = pose.x - c_alpha.x() - bias.x();
  const double dy = pose.y - c_alpha.y() - bias.y();
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  FormationErrors e;
  e.e_x = c * dx + s * dy;
  e.e_y = -s * dx + c * dy;
  e.e_theta = pose.theta - theta_d;
  e.e_theta_bar = e.e_theta;
  e.rho = 0.0;
  return e;
}

RhoValue rho_and_derivative(double t, double e_x, double e_y, double varpi, double v_d, double de_x, double de_y,
                            const ControllerGains& gains) {
  const double radius = std::hypot(e_x, e_y);
  const double th = std::tanh(gains.iota1 * radius);
  const double sn = std::sin(gains.iota2 * t);
  const double cs = std::cos(gains.iota2 * t);
  const double varpi_dot = -std::abs(v_d) * varpi;
  double radius_dot = 0.0;
  if (radius >= 1e-9) radius_dot = (e_x * de_x + e_y * de_y) / radius;
  const double sech2 = 1.0 - th * th;

  RhoValue out;
  out.rho = gains.iota0 * varpi * th * sn;
  out.rho_dot = gains.iota0 * (varpi_dot * th * sn + varpi * gains.iota1 * sech2 * radius_dot * sn +
                               varpi * th * gains.iota2 * cs);
  return out;
}

VelocityCommand control_law(const FormationErrors& err, double v_d, double rho_dot, const ControllerGains& gains) {
  if (!std::isfinite(err.e_x) || !std::isfinite(err.e_y) || !std::isfinite(err.e_theta) ||
      !std::isfinite(err.e_theta_bar) || !std::isfinite(err.rho) || !std::isfinite(v_d) || !std::isfinite(rho_dot)) {
    throw ValidationError("control law received a non-finite input");
  }
  const double eb = err.e_theta_bar;
  const double bracket = std::cos(0.5 * (err.e_theta + err.rho)) * sinc(0.5 * eb);
  VelocityCommand out;
  out.v = -gains.gamma1 * std::tanh(err.e_x) + std::cos(err.e_theta) * v_d;
  out.omega = -gains.gamma2 * std::tanh(eb) + rho_dot - gains.gamma3 * signum(eb, gains.sgn_epsilon) -
              gains.gamma4 * bracket * v_d * err.e_y;
  return out;
}

LyapunovValues lyapunov_monitor(const FormationErrors& err, const ControllerGains& gains) {
  const double eb = err.e_theta_bar;
  return {0.5 * gains.gamma4 * (err.e_x * err.e_x + err.e_y * err.e_y) + 0.5 * eb * eb,
          gains.gamma1 * gains.gamma4 * err.e_x * std::tanh(err.e_x) + gains.gamma2 * eb * std::tanh(eb)};
}

double lyapunov_bound(double v0, const ControllerGains& gains) {
  const double root = std::sqrt(v0) + std::sqrt(0.5 * gains.gamma4) * gains.iota0;
  return root * root;
}

RobotEvaluation evaluate_robot(double t, const RobotPose& pose, const FormationAux& aux,
                               const Eigen::Vector2d& c_alpha, const Eigen::Vector2d& c_alpha_dot,
                               std::optional<double> previous_theta_d, const ControllerGains& gains) {
  RobotEvaluation out;
  out.heading = desired_heading_velocity(c_alpha_dot, previous_theta_d);
  const double v_d = out.heading.v_d;
  FormationErrors err = compute_errors(pose, c_alpha, aux.bias, out.heading.theta_d);

  // v does not depend on rho, so it is available before omega.
  const double v = -gains.gamma1 * std::tanh(err.e_x) + std::cos(err.e_theta) * v_d;
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double de_x = v - (c * c_alpha_dot.x() + s * c_alpha_dot.y());
  const double de_y = s * c_alpha_dot.x() - c * c_alpha_dot.y();
  const RhoValue rho = rho_and_derivative(t, err.e_x, err.e_y, aux.varpi, v_d, de_x, de_y, gains);

  out.errors = err.with_rho(rho.rho);
  out.rho_dot = rho.rho_dot;
  out.command = control_law(out.errors, v_d, rho.rho_dot, gains);
  out.pose_rate = unicycle_rhs(pose, out.command.v, out.command.omega);
  out.varpi_rate = -std::abs(v_d) * aux.varpi;
  out.lyapunov = lyapunov_monitor(out.errors, gains);
  return out;
}

}  // namespace privdac
