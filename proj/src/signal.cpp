#include "privdac/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "privdac/errors.hpp"
#include "privdac/rng.hpp"

namespace privdac {

bool AccumulatedTerm::operator==(const AccumulatedTerm& other) const {
  if (scale != other.scale) return false;
  if (inner == other.inner) return true;
  return inner && other.inner && *inner == *other.inner;
}

namespace {

// sin(x) / x with the removable point filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// integral_0^t e^{i w s} ds = t e^{i w t / 2} sinc(w t / 2); exact at w = 0.
std::complex<double> exp_integral(double w, double t) {
  return t * sinc(0.5 * w * t) * std::polar(1.0, 0.5 * w * t);
}

double bessel_j(int order, double z) {
  // J_{-k}(z) = (-1)^k J_k(z), J_k(-z) = (-1)^k J_k(z)
  const int k = std::abs(order);
  double sign = 1.0;
  if (order < 0 && (k % 2) == 1) sign = -sign;
  if (z < 0.0 && (k % 2) == 1) sign = -sign;
  return sign * std::cyl_bessel_j(static_cast<double>(k), std::abs(z));
}

std::complex<double> rotating_integral(const RotatingTerm& r, double t) {
  // (base - swing cos(nu s)) e^{i h} sum_k J_k(a) e^{i k mu s}, integrated termwise.
  const int terms = static_cast<int>(std::ceil(std::abs(r.wobble))) + 30;
  std::complex<double> acc{0.0, 0.0};
  for (int k = -terms; k <= terms; ++k) {
    const double jk = bessel_j(k, r.wobble);
    if (jk == 0.0) continue;
    const double w = k * r.wobble_omega;
    std::complex<double> part = r.base * exp_integral(w, t);
    if (r.swing != 0.0) {
      part -= 0.5 * r.swing * (exp_integral(w + r.swing_omega, t) + exp_integral(w - r.swing_omega, t));
    }
    acc += jk * part;
  }
  return std::polar(1.0, r.heading) * acc;
}

void check_component(std::size_t component, std::size_t width, std::size_t dimension) {
  if (component + width > dimension) {
    throw ValidationError("signal term on component " + std::to_string(component) +
                          " does not fit dimension " + std::to_string(dimension));
  }
}

struct ValueVisitor {
  double t;
  Eigen::VectorXd& out;
  void operator()(const ConstantTerm& c) const { out(c.component) += c.value; }
  void operator()(const RampTerm& r) const { out(r.component) += r.slope * t; }
  void operator()(const SinusoidTerm& s) const {
    const double arg = s.omega * t + s.phase;
    out(s.component) += s.amplitude * (s.wave == Wave::Cos ? std::cos(arg) : std::sin(arg));
  }
  void operator()(const RotatingTerm& r) const {
    const double amp = r.base - r.swing * std::cos(r.swing_omega * t);
    const double phi = r.heading + r.wobble * std::sin(r.wobble_omega * t);
    out(r.component) += amp * std::cos(phi);
    out(r.component + 1) += amp * std::sin(phi);
  }
  void operator()(const AccumulatedTerm& a) const { out += a.scale * a.inner->integral(t); }
};

struct DerivativeVisitor {
  double t;
  Eigen::VectorXd& out;
  void operator()(const ConstantTerm&) const {}
  void operator()(const RampTerm& r) const { out(r.component) += r.slope; }
  void operator()(const SinusoidTerm& s) const {
    const double arg = s.omega * t + s.phase;
    out(s.component) += s.amplitude * s.omega * (s.wave == Wave::Cos ? -std::sin(arg) : std::cos(arg));
  }
  void operator()(const RotatingTerm& r) const {
    const double amp = r.base - r.swing * std::cos(r.swing_omega * t);
    const double amp_dot = r.swing * r.swing_omega * std::sin(r.swing_omega * t);
    const double phi = r.heading + r.wobble * std::sin(r.wobble_omega * t);
    const double phi_dot = r.wobble * r.wobble_omega * std::cos(r.wobble_omega * t);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    out(r.component) += amp_dot * c - amp * phi_dot * s;
    out(r.component + 1) += amp_dot * s + amp * phi_dot * c;
  }
  void operator()(const AccumulatedTerm& a) const { out += a.scale * a.inner->value(t); }
};

struct IntegralVisitor {
  double t;
  Eigen::VectorXd& out;
  void operator()(const ConstantTerm& c) const { out(c.component) += c.value * t; }
  void operator()(const RampTerm& r) const { out(r.component) += 0.5 * r.slope * t * t; }
  void operator()(const SinusoidTerm& s) const {
    // cos(w t + p) integrates to t cos(p + w t / 2) sinc(w t / 2), sin likewise.
    const double half = 0.5 * s.omega * t;
    const double mid = s.phase + half;
    const double f = t * sinc(half);
    out(s.component) += s.amplitude * f * (s.wave == Wave::Cos ? std::cos(mid) : std::sin(mid));
  }
  void operator()(const RotatingTerm& r) const {
    const auto z = rotating_integral(r, t);
    out(r.component) += z.real();
    out(r.component + 1) += z.imag();
  }
  void operator()(const AccumulatedTerm&) const {
    throw std::logic_error("second antiderivative of an accumulated term is not available");
  }
};

struct ScaleVisitor {
  double k;
  SignalTerm operator()(ConstantTerm c) const { c.value *= k; return c; }
  SignalTerm operator()(RampTerm r) const { r.slope *= k; return r; }
  SignalTerm operator()(SinusoidTerm s) const { s.amplitude *= k; return s; }
  SignalTerm operator()(RotatingTerm r) const { r.base *= k; r.swing *= k; return r; }
  SignalTerm operator()(AccumulatedTerm a) const { a.scale *= k; return a; }
};

}  // namespace

SignalDescriptor::SignalDescriptor(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("signal dimension must be positive");
}

SignalDescriptor::SignalDescriptor(std::size_t dimension, std::vector<SignalTerm> terms)
    : SignalDescriptor(dimension) {
  for (auto& term : terms) add(std::move(term));
}

SignalDescriptor& SignalDescriptor::add(SignalTerm term) {
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, AccumulatedTerm>) {
          if (!t.inner || t.inner->dimension() != dimension_) {
            throw ValidationError("accumulated term dimension mismatch");
          }
        } else if constexpr (std::is_same_v<T, RotatingTerm>) {
          check_component(t.component, 2, dimension_);
        } else {
          check_component(t.component, 1, dimension_);
        }
        if constexpr (std::is_same_v<T, ConstantTerm>) {
          if (!std::isfinite(t.value)) throw ValidationError("non-finite constant term");
        } else if constexpr (std::is_same_v<T, RampTerm>) {
          if (!std::isfinite(t.slope)) throw ValidationError("non-finite ramp term");
        } else if constexpr (std::is_same_v<T, SinusoidTerm>) {
          if (!std::isfinite(t.amplitude) || !std::isfinite(t.omega) || !std::isfinite(t.phase))
            throw ValidationError("non-finite sinusoid term");
        } else if constexpr (std::is_same_v<T, RotatingTerm>) {
          if (!std::isfinite(t.base) || !std::isfinite(t.swing) || !std::isfinite(t.swing_omega) ||
              !std::isfinite(t.heading) || !std::isfinite(t.wobble) || !std::isfinite(t.wobble_omega))
            throw ValidationError("non-finite rotating term");
        }
      },
      term);
  terms_.push_back(std::move(term));
  return *this;
}

Eigen::VectorXd SignalDescriptor::value(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& term : terms_) std::visit(ValueVisitor{t, out}, term);
  return out;
}

Eigen::VectorXd SignalDescriptor::derivative(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& term : terms_) std::visit(DerivativeVisitor{t, out}, term);
  return out;
}

Eigen::VectorXd SignalDescriptor::integral(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& term : terms_) std::visit(IntegralVisitor{t, out}, term);
  return out;
}

bool SignalDescriptor::bounded() const {
  for (const auto& term : terms_) {
    if (std::holds_alternative<RampTerm>(term) && std::get<RampTerm>(term).slope != 0.0) return false;
    if (const auto* a = std::get_if<AccumulatedTerm>(&term)) {
      if (!a->inner->bounded_integral()) return false;
    }
  }
  return true;
}

bool SignalDescriptor::bounded_integral() const {
  for (const auto& term : terms_) {
    if (const auto* c = std::get_if<ConstantTerm>(&term)) {
      if (c->value != 0.0) return false;
    } else if (const auto* s = std::get_if<SinusoidTerm>(&term)) {
      if (s->omega == 0.0 && s->amplitude != 0.0) return false;
    } else {
      return false;
    }
  }
  return true;
}

SignalDescriptor SignalDescriptor::scaled(double factor) const {
  SignalDescriptor out(dimension_);
  out.terms_.reserve(terms_.size());
  for (const auto& term : terms_) out.terms_.push_back(std::visit(ScaleVisitor{factor}, term));
  return out;
}

SignalDescriptor operator+(const SignalDescriptor& a, const SignalDescriptor& b) {
  if (a.dimension_ != b.dimension_) throw ValidationError("signal dimension mismatch");
  SignalDescriptor out = a;
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  return out;
}

SignalDescriptor operator-(const SignalDescriptor& a, const SignalDescriptor& b) {
  return a + b.scaled(-1.0);
}

SignalDescriptor target_base_velocity() {
  return SignalDescriptor(2, {RotatingTerm{.component = 0,
                                           .base = 0.75,
                                           .swing = 0.25,
                                           .swing_omega = 0.24,
                                           .heading = std::numbers::pi / 9.0,
                                           .wobble = 0.5,
                                           .wobble_omega = 0.2}});
}

std::array<Reference, 4> paper_targets() {
  auto cosine = [](std::size_t component, double amplitude, double omega) {
    return SinusoidTerm{.component = component, .amplitude = amplitude, .omega = omega, .phase = 0.0, .wave = Wave::Cos};
  };
  auto target = [&](double px, double py, SinusoidTerm x_term, SinusoidTerm y_term) {
    SignalDescriptor rate = target_base_velocity();
    rate.add(x_term).add(y_term);
    return Reference{Eigen::Vector2d(px, py), std::move(rate)};
  };
  return {
      target(1.8, 1.2, cosine(0, 0.1, 0.2), cosine(1, -0.2, 0.4)),
      target(-1.2, 1.8, cosine(0, -0.2, 0.4), cosine(1, 0.1, 0.2)),
      target(-1.8, -1.2, cosine(0, -0.1, 0.2), cosine(1, 0.2, 0.4)),
      target(1.2, -1.8, cosine(0, 0.2, 0.4), cosine(1, -0.1, 0.2)),
  };
}

SplitPair split(const SignalDescriptor& rate, const Eigen::VectorXd& initial, std::uint64_t seed,
                const SplitOptions& options) {
  if (!rate.bounded()) {
    throw ValidationError("cannot split an unbounded reference rate");
  }
  const auto m = static_cast<Eigen::Index>(rate.dimension());
  if (initial.size() != m) {
    throw ValidationError("initial value dimension does not match the reference rate");
  }
  SplitMix64 rng(seed);
  Eigen::VectorXd alpha0(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    alpha0(c) = rng.uniform(options.initial_range.first, options.initial_range.second);
  }
  SignalDescriptor w(rate.dimension());
  for (Eigen::Index c = 0; c < m; ++c) {
    for (int k = 0; k < 2; ++k) {
      const double amplitude = rng.uniform(options.amplitude_range.first, options.amplitude_range.second);
      const double omega = rng.uniform(options.frequency_range.first, options.frequency_range.second);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      if (amplitude == 0.0) continue;
      w.add(SinusoidTerm{.component = static_cast<std::size_t>(c),
                         .amplitude = amplitude,
                         .omega = omega,
                         .phase = phase,
                         .wave = Wave::Sin});
    }
  }
  return SplitPair{rate + w, rate - w, alpha0, 2.0 * initial - alpha0};
}

}  // namespace privdac
