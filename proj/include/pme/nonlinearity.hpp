// The scalar power-law nonlinearity beta(s) = |s|^{m-1} s driving the porous
// medium (m > 1) and fast diffusion (m < 1) equations, together with its
// inverse, derivative, primitive, and the Lipschitz truncations used by the
// uniform-convergence estimates.
#pragma once

#include <cmath>

#include "pme/common.hpp"

namespace pme {

class PowerLaw {
 public:
  explicit PowerLaw(double m) : m_(m) {
    if (!(m > 0.0)) throw misuse_error("PowerLaw: exponent m must be positive");
  }

  double m() const { return m_; }
  /// max(1, 1/m); the exponent 1 + m_hat is the natural Lebesgue index for u.
  double m_hat() const { return std::max(1.0, 1.0 / m_); }
  bool linear() const { return m_ == 1.0; }

  /// beta(s) = sign(s) |s|^m, with an explicit 0 -> 0 branch.
  double beta(double s) const { return signed_pow(s, m_); }

  /// beta^{-1}(w) = sign(w) |w|^{1/m}.
  double beta_inv(double w) const { return signed_pow(w, 1.0 / m_); }

  /// beta'(s) = m |s|^{m-1}; for m < 1 this blows up at s = 0 (use the guarded
  /// variant inside Newton loops that cross the degeneracy).
  double beta_prime(double s) const {
    if (m_ == 1.0) return 1.0;
    return m_ * std::pow(std::abs(s), m_ - 1.0);
  }

  /// beta' with |s| floored away from zero; the floor only matters for m < 1.
  double beta_prime_guarded(double s, double floor = 1e-8) const {
    if (m_ >= 1.0) return beta_prime(s);
    return m_ * std::pow(std::max(std::abs(s), floor), m_ - 1.0);
  }

  /// Derivative of the inverse: (1/m) |w|^{1/m - 1}; vanishes at 0 when m < 1.
  double beta_inv_prime(double w) const {
    if (m_ == 1.0) return 1.0;
    return (1.0 / m_) * std::pow(std::abs(w), 1.0 / m_ - 1.0);
  }

  /// Primitive zeta(z) = int_0^z beta = |z|^{m+1} / (m+1).
  double zeta(double z) const { return std::pow(std::abs(z), m_ + 1.0) / (m_ + 1.0); }

  /// Fast-diffusion truncation (m < 1): linear with slope k^{1-m} on
  /// [-1/k, 1/k], beta outside; globally Lipschitz with constant k^{1-m}.
  double cutoff_fast(double r, double k) const {
    require_fast(k);
    if (std::abs(r) <= 1.0 / k) return std::pow(k, 1.0 - m_) * r;
    return beta(r);
  }

  /// Slow-diffusion truncation (m > 1): beta on (-k, k), frozen at +-k^m
  /// outside; globally Lipschitz with constant m k^{m-1}.
  double cutoff_slow(double r, double k) const {
    require_slow(k);
    if (r >= k) return std::pow(k, m_);
    if (r <= -k) return -std::pow(k, m_);
    return beta(r);
  }

  double lipschitz_fast(double k) const {
    require_fast(k);
    return std::pow(k, 1.0 - m_);
  }

  double lipschitz_slow(double k) const {
    require_slow(k);
    return m_ * std::pow(k, m_ - 1.0);
  }

 private:
  static double signed_pow(double s, double p) {
    if (s == 0.0) return 0.0;
    const double a = std::pow(std::abs(s), p);
    return s > 0.0 ? a : -a;
  }
  void require_fast(double k) const {
    if (!(m_ < 1.0)) throw misuse_error("cutoff_fast: requires m < 1");
    if (!(k > 0.0)) throw misuse_error("cutoff_fast: requires k > 0");
  }
  void require_slow(double k) const {
    if (!(m_ > 1.0)) throw misuse_error("cutoff_slow: requires m > 1");
    if (!(k > 0.0)) throw misuse_error("cutoff_slow: requires k > 0");
  }

  double m_;
};

}  // namespace pme
