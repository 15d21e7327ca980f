#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "spinbound/error.hpp"
#include "spinbound/fhat.hpp"
#include "spinbound/types.hpp"

using namespace spinbound;

namespace {

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// \int_0^inf rho^k fhat(rho)^2 d rho in s = ln rho; the tail beyond rho_hi uses the series
// fhat ~ c1 rho^{-2-a}, whose contribution is added in closed form.
double moment(const FhatProfile& f, int k) {
  const double lo = std::log(f.rho_min()) - 10.0, hi = std::log(f.rho_max());
  const int n = 400000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(lo + i * h);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double v = f(r);
    s += w * h * std::pow(r, k + 1) * v * v;
  }
  const double c1 = f.tail_coefficients().front();
  const double e = k + 1 - 2.0 * (2.0 + f.a());
  return s - c1 * c1 * std::pow(f.rho_max(), e) / e;
}

}  // namespace

TEST_CASE("closed forms at a = 2 and a = 1") {
  const auto f2 = fhat_profile(2.0);
  const auto f1 = fhat_profile(1.0);
  for (double rho : {0.0, 1e-6, 0.3, 1.0, 2.5, 7.0}) {
    CHECK(std::abs((*f2)(rho) - std::exp(-0.5 * rho * rho)) < 1e-8);
    CHECK(rel((*f1)(rho), 0.5 / std::pow(0.25 + rho * rho, 1.5)) < 1e-12);
  }
  CHECK(std::abs(f1->at_zero() - 4.0) < 1e-12);
}

TEST_CASE("value at zero is the Gamma integral") {
  for (double a : {0.1, 0.25, 0.4, 0.7, 1.3, 1.8}) {
    const auto f = fhat_profile(a);
    const double ref = std::pow(2.0, 2.0 / a) * std::tgamma(2.0 / a) / a;
    CHECK(rel(f->at_zero(), ref) < 1e-12);
    CHECK(rel((*f)(0.0), ref) < 1e-12);
  }
}

TEST_CASE("table agrees with the power series and quadrature for a > 1") {
  // the series cancels badly once (rho/2)^2 2^{2/a} grows, so it is only used near 0
  for (double a : {1.25, 1.5, 1.8}) {
    const auto f = fhat_profile(a);
    for (double rho : {0.05, 0.4, 1.0}) {
      INFO("a = " << a << " rho = " << rho);
      CHECK(rel((*f)(rho), oracle::fhat_power_series(a, rho)) < 1e-12);
    }
    for (double rho : {2.0, 3.0, 6.0}) {
      INFO("a = " << a << " rho = " << rho);
      CHECK(rel((*f)(rho), oracle::fhat_brute(a, rho, std::pow(110.0, 1.0 / a))) < 1e-9);
    }
  }
}

TEST_CASE("table agrees with brute-force Hankel quadrature for a < 1") {
  for (double a : {0.5, 0.8}) {
    const auto f = fhat_profile(a);
    const double r_max = std::pow(110.0, 1.0 / a);
    for (double rho : {0.2, 1.0, 3.0}) {
      INFO("a = " << a << " rho = " << rho);
      CHECK(rel((*f)(rho), oracle::fhat_brute(a, rho, r_max)) < 1e-8);
    }
  }
}

TEST_CASE("table interpolation matches direct evaluation") {
  for (double a : {0.05, 0.2, 0.6, 1.4}) {
    const auto f = fhat_profile(a);
    for (int i = 0; i < 40; ++i) {
      const double rho = std::exp(oracle::uniform(std::log(f->rho_min()), std::log(f->rho_max())));
      CHECK(rel((*f)(rho), f->evaluate(rho)) < 1e-9);
    }
  }
}

TEST_CASE("fhat is positive and decays") {
  for (double a : {0.025, 0.1, 0.4, 1.0, 1.6, 2.0}) {
    const auto f = fhat_profile(a);
    double prev = f->at_zero();
    const double top = a == 2.0 ? 30.0 : 1e6;  // exp(-rho^2/2) underflows beyond
    for (double rho = 1e-3; rho < top; rho *= 1.7) {
      const double v = (*f)(rho);
      CHECK(v > 0.0);
      CHECK(v <= prev * (1.0 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("large-rho tail follows the leading coefficient") {
  for (double a : {0.1, 0.4, 0.9}) {
    const auto f = fhat_profile(a);
    const double c1 = f->tail_coefficients().front();
    // c1 = 2^{1+a} Gamma(1 + a/2)^2 sin(pi a / 2) / (2 pi)
    CHECK(rel(c1, std::pow(2.0, 1.0 + a) * std::pow(std::tgamma(1.0 + 0.5 * a), 2) *
                      std::sin(0.5 * kPi * a) / (2.0 * kPi)) < 1e-12);
    const double rho = 1e60;
    CHECK(rel((*f)(rho) * std::pow(rho, 2.0 + a), c1) < 1e-3);
  }
}

TEST_CASE("Parseval: L2 norm and gradient moment") {
  for (double a : {0.1, 0.4, 1.5}) {
    INFO("a = " << a);
    const auto f = fhat_profile(a);
    // 2 pi \int rho fhat^2 = \int exp(-r^a) dx = 2 pi Gamma(2/a) / a
    CHECK(rel(moment(*f, 1), std::tgamma(2.0 / a) / a) < 1e-7);
    // 2 pi \int rho^3 fhat^2 = pi a / 2
    CHECK(rel(moment(*f, 3), a / 4.0) < 1e-7);
  }
}

TEST_CASE("gradient norm closed form and quadrature") {
  CHECK(std::abs(grad_norm_sq(1.0) - kPi / 2.0) < 1e-15);
  CHECK(std::abs(grad_norm_sq(2.0) - kPi) < 1e-15);
  for (double a : {0.25, 0.5, 1.0, 2.0}) CHECK(std::abs(grad_norm_sq_quadrature(a) - kPi * a / 2.0) < 1e-6);
  CHECK_THROWS_AS(grad_norm_sq(0.0), DomainError);
  CHECK_THROWS_AS(grad_norm_sq(2.5), DomainError);
}

TEST_CASE("width outside the supported range") {
  CHECK_THROWS_AS(FhatProfile(0.0), DomainError);
  CHECK_THROWS_AS(FhatProfile(-1.0), DomainError);
  CHECK_THROWS_AS(FhatProfile(2.01), DomainError);
  CHECK_THROWS_AS(FhatProfile(0.5 * FhatProfile::kMinWidth), DomainError);
  CHECK_THROWS_AS(FhatProfile(std::nan("")), DomainError);
}
