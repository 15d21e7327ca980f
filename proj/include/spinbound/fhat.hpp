#pragma once

#include <memory>
#include <vector>

namespace spinbound {

/// Radial 2D Fourier transform of f_a(x) = exp(-|x|^a / 2):
/// fhat_a(rho) = \int_0^inf r J0(rho r) exp(-r^a / 2) dr.
///
/// Closed forms at a = 1 and a = 2. Otherwise a table of log fhat over log rho, filled from
/// the large-rho series where it is well conditioned and from quadrature elsewhere, with
/// 6-point interpolation. Below the table fhat(0)(1 - rho^2 <r^2> / 4); above it the series.
class FhatProfile {
 public:
  static constexpr double kMinWidth = 0.02;

  explicit FhatProfile(double a);

  double a() const { return a_; }
  double operator()(double rho) const;
  double at_zero() const { return f0_; }
  double log_at_zero() const { return log_f0_; }
  /// Upper end of the table; rho beyond it uses the series.
  double rho_max() const { return rho_hi_; }
  double rho_min() const { return rho_lo_; }
  std::size_t table_size() const { return logf_.size(); }

  /// c_k of fhat ~ sum_{k>=1} c_k rho^{-2-ak} (convergent for a < 1, asymptotic for a > 1).
  const std::vector<double>& tail_coefficients() const { return ck_; }

  /// Untabulated evaluation (series or quadrature).
  double evaluate(double rho) const;

  /// Series value if it is usable at rho (returns false otherwise).
  bool series(double rho, double& log_value) const;
  /// Quadrature value: rotated contour for a < 1, direct Hankel integral for 1 < a < 2.
  double quadrature(double rho) const;

 private:
  double a_;
  double f0_ = 0.0;
  double log_f0_ = 0.0;
  double log_r2_ = 0.0;  // log <r^2>
  double rho_lo_ = 0.0;
  double rho_hi_ = 0.0;
  double t0_ = 0.0, dt_ = 0.0;
  std::vector<double> logf_;
  std::vector<double> ck_;
  std::vector<double> log_ck_;
  std::vector<int> sign_ck_;
};

/// Shared, cached profile per width.
std::shared_ptr<const FhatProfile> fhat_profile(double a);

/// \int |grad f_a|^2 dx = pi a / 2.
double grad_norm_sq(double a);
/// The same integral by radial quadrature.
double grad_norm_sq_quadrature(double a);

}  // namespace spinbound
