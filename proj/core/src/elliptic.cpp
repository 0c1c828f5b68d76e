#include "cscb/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cscb::elliptic {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// The AGM converges quadratically; 10 rungs cover every admissible modulus.
constexpr int kMaxRungs = 16;

[[noreturn]] void throw_range(double value, const char* what) {
  throw std::domain_error(std::string("elliptic modulus ") + what + " " +
                          std::to_string(value) +
                          " outside admissible range [0, 1 - 1e-12]");
}

}  // namespace

Modulus::Modulus(double k, double k_sq, double kc_sq)
    : k_(k), k_sq_(k_sq), kc_sq_(kc_sq), kc_(std::sqrt(kc_sq)) {}

Modulus::Modulus(double k) {
  if (!(k >= 0.0 && k <= kMaxModulus)) throw_range(k, "k =");
  k_ = k;
  k_sq_ = k * k;
  kc_sq_ = (1.0 - k) * (1.0 + k);
  kc_ = std::sqrt(kc_sq_);
}

Modulus Modulus::from_squared(double k_sq) {
  if (!(k_sq >= 0.0 && k_sq <= kMaxModulus * kMaxModulus)) {
    throw_range(k_sq, "k^2 =");
  }
  return Modulus(std::sqrt(k_sq), k_sq, 1.0 - k_sq);
}

double quarter_period(Modulus k) {
  double a = 1.0;
  double b = k.complement();
  for (int i = 0; i < kMaxRungs && std::abs(a - b) > 2.0 * kEps * a; ++i) {
    const double next_a = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next_a;
  }
  return std::numbers::pi / (a + b);
}

JacobiValues jacobi(double t, Modulus k) {
  if (t == 0.0) return {t, 1.0, 0.0, 1.0};
  if (k.value() == 0.0) return {t, std::cos(t), std::sin(t), 1.0};

  // Descending ladder a_n, c_n; then recover the amplitude phi_0 by
  // phi_{n-1} = (phi_n + asin(c_n / a_n * sin(phi_n))) / 2.
  std::array<double, kMaxRungs + 1> a{};
  std::array<double, kMaxRungs + 1> c{};
  a[0] = 1.0;
  double b = k.complement();
  c[0] = k.value();
  int n = 0;
  while (n < kMaxRungs && std::abs(c[n]) > kEps * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * t, n);
  for (int i = n; i > 0; --i) {
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // 1 - k^2 sn^2 rewritten as k'^2 + k^2 cn^2 keeps both terms positive.
  const double dn = std::sqrt(k.complement_squared() + k.squared() * cn * cn);
  return {t, cn, sn, dn};
}

JacobiDerivatives jacobi_derivatives(const JacobiValues& v, Modulus k) {
  const double k2 = k.squared();
  return {
      -v.sn * v.dn,
      -2.0 * k2 * v.cn * v.cn * v.cn - (1.0 - 2.0 * k2) * v.cn,
      v.cn * v.dn,
      2.0 * k2 * v.sn * v.sn * v.sn - (1.0 + k2) * v.sn,
  };
}

JacobiDerivatives jacobi_derivatives(double t, Modulus k) {
  return jacobi_derivatives(jacobi(t, k), k);
}

}  // namespace cscb::elliptic
