// Barenblatt self-similar solution of the porous medium / fast diffusion
// equation  d_t u = div(grad |u|^{m-1}u)  in two space dimensions:
//   u(t, x) = t^(-1/m) * ( C - gamma |x|^2 t^(-1/m) )^{1/(m-1)},
//   gamma = (m - 1) / (4 m^2),
// truncated at zero for m > 1 (compactly supported profile with an expanding
// front) and globally positive for m < 1 (algebraic tails).
#pragma once

#include <cmath>

#include "pme/common.hpp"

namespace pme {

class Barenblatt {
 public:
  Barenblatt(double m, double profile_constant) : m_(m), c_(profile_constant) {
    if (!(m > 0.0)) throw misuse_error("Barenblatt: exponent must be positive");
    if (m == 1.0) throw misuse_error("Barenblatt: exponent one is the heat equation");
    if (!(profile_constant > 0.0))
      throw misuse_error("Barenblatt: profile constant must be positive");
  }

  double m() const { return m_; }
  double profile_constant() const { return c_; }
  double alpha() const { return 1.0 / m_; }               ///< time decay exponent
  double rho() const { return 0.5 / m_; }                 ///< front growth exponent
  double gamma() const { return (m_ - 1.0) / (4.0 * m_ * m_); }

  /// Value at absolute time t > 0.
  double value(double t, const Vec2& x) const {
    if (!(t > 0.0)) throw misuse_error("Barenblatt: time must be positive");
    const double r2 = dot(x, x);
    const double inner = c_ - gamma() * r2 * std::pow(t, -2.0 * rho());
    if (m_ > 1.0) {
      if (inner <= 0.0) return 0.0;
      return std::pow(t, -alpha()) * std::pow(inner, 1.0 / (m_ - 1.0));
    }
    // m < 1: inner = c + |gamma| r^2 t^{-1/m} > 0, negative exponent
    return std::pow(t, -alpha()) / std::pow(inner, 1.0 / (1.0 - m_));
  }

  /// Radius of the support at absolute time t > 0 (only defined for m > 1).
  double front_radius(double t) const {
    if (!(m_ > 1.0)) throw misuse_error("Barenblatt: no front for exponents below one");
    if (!(t > 0.0)) throw misuse_error("Barenblatt: time must be positive");
    return std::sqrt(c_ / gamma()) * std::pow(t, rho());
  }

 private:
  double m_;
  double c_;
};

}  // namespace pme
