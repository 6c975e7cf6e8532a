#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace privdac {

class SignalDescriptor;

/// c on one component.
struct ConstantTerm {
  std::size_t component = 0;
  double value = 0.0;
  bool operator==(const ConstantTerm&) const = default;
};

/// slope * t on one component. Unbounded; only allowed where a drift is intended.
struct RampTerm {
  std::size_t component = 0;
  double slope = 0.0;
  bool operator==(const RampTerm&) const = default;
};

enum class Wave { Cos, Sin };

/// amplitude * cos(omega t + phase) or amplitude * sin(omega t + phase).
struct SinusoidTerm {
  std::size_t component = 0;
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  Wave wave = Wave::Cos;
  bool operator==(const SinusoidTerm&) const = default;
};

/**
 * @brief Amplitude-modulated rotating unit vector on components (c, c+1).
 *
 *   (base - swing cos(swing_omega t)) * [cos(phi(t)), sin(phi(t))]
 *   phi(t) = heading + wobble sin(wobble_omega t)
 *
 * This is the shape of the common target velocity q0(t). The antiderivative
 * uses the Jacobi-Anger expansion e^{i z sin x} = sum_k J_k(z) e^{ikx}.
 */
struct RotatingTerm {
  std::size_t component = 0;
  double base = 0.0;
  double swing = 0.0;
  double swing_omega = 0.0;
  double heading = 0.0;
  double wobble = 0.0;
  double wobble_omega = 0.0;
  bool operator==(const RotatingTerm&) const = default;
};

/// scale * integral_0^t inner(s) ds, on every component of inner.
struct AccumulatedTerm {
  std::shared_ptr<const SignalDescriptor> inner;
  double scale = 1.0;
  bool operator==(const AccumulatedTerm& other) const;
};

using SignalTerm = std::variant<ConstantTerm, RampTerm, SinusoidTerm, RotatingTerm, AccumulatedTerm>;

/// Value and exact time derivative at one instant.
struct SignalSample {
  Eigen::VectorXd value;
  Eigen::VectorXd derivative;
};

/**
 * @brief Closed-form vector signal: a sum of terms.
 *
 * value(), derivative() and integral() (from 0 to t) are all analytic.
 * Terms are evaluated in insertion order so results are reproducible to the
 * bit. integral() is unavailable when an AccumulatedTerm is present.
 */
class SignalDescriptor {
 public:
  explicit SignalDescriptor(std::size_t dimension = 1);
  SignalDescriptor(std::size_t dimension, std::vector<SignalTerm> terms);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<SignalTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  SignalDescriptor& add(SignalTerm term);

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;
  Eigen::VectorXd integral(double t) const;
  SignalSample eval(double t) const { return {value(t), derivative(t)}; }

  /// Finite for all t >= 0 (no ramp; accumulated terms only of zero-mean signals).
  bool bounded() const;
  /// The antiderivative is bounded too (only zero-mean sinusoids).
  bool bounded_integral() const;

  SignalDescriptor scaled(double factor) const;

  friend SignalDescriptor operator+(const SignalDescriptor& a, const SignalDescriptor& b);
  friend SignalDescriptor operator-(const SignalDescriptor& a, const SignalDescriptor& b);

  bool operator==(const SignalDescriptor& other) const {
    return dimension_ == other.dimension_ && terms_ == other.terms_;
  }

 private:
  std::size_t dimension_;
  std::vector<SignalTerm> terms_;
};

/// Private reference r(t) = initial + integral_0^t rate, with r' = rate exactly.
struct Reference {
  Eigen::VectorXd initial;
  SignalDescriptor rate;

  Eigen::VectorXd value(double t) const { return initial + rate.integral(t); }
  bool operator==(const Reference& other) const {
    return initial == other.initial && rate == other.rate;
  }
};

/// Common target velocity (0.75 - 0.25 cos 0.24t)[cos(pi/9 + 0.5 sin 0.2t), sin(...)].
SignalDescriptor target_base_velocity();

/// The four mobile targets: initial positions and velocities q_i(t).
std::array<Reference, 4> paper_targets();

/// Ranges used when a reference is split into alpha / beta halves.
struct SplitOptions {
  std::pair<double, double> initial_range{-10.0, 10.0};
  std::pair<double, double> amplitude_range{-2.0, 2.0};
  std::pair<double, double> frequency_range{0.1, 1.0};
  bool operator==(const SplitOptions&) const = default;
};

/**
 * @brief alpha / beta halves of one reference.
 *
 * alpha_initial + beta_initial == 2 r(0) and alpha + beta == 2 f.
 */
struct SplitPair {
  SignalDescriptor alpha;
  SignalDescriptor beta;
  Eigen::VectorXd alpha_initial;
  Eigen::VectorXd beta_initial;
  bool operator==(const SplitPair& other) const {
    return alpha == other.alpha && beta == other.beta && alpha_initial == other.alpha_initial &&
           beta_initial == other.beta_initial;
  }
};

/**
 * @brief Split a reference rate f with initial value r0.
 *
 * Draw order from SplitMix64(seed): alpha_initial per component; then per
 * component two sinusoids (amplitude, frequency, phase in [0, 2pi)). The
 * perturbation w is their sum; alpha = f + w, beta = f - w,
 * beta_initial = 2 r0 - alpha_initial. Zero-amplitude draws add no term, so
 * amplitude_range = {0, 0} gives alpha = beta = f. Throws ValidationError if
 * f is unbounded.
 */
SplitPair split(const SignalDescriptor& rate, const Eigen::VectorXd& initial, std::uint64_t seed,
                const SplitOptions& options = {});

}  // namespace privdac
