#include "spinbound/fhat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "spinbound/error.hpp"
#include "spinbound/quadrature.hpp"
#include "spinbound/types.hpp"

namespace spinbound {

namespace {

constexpr std::size_t kMaxTerms = 600;
constexpr double kLn2 = 0.69314718055994530942;

double bessel_k0(double z) {
  if (z > 700.0) return 0.0;
  return std::cyl_bessel_k(0.0, z);
}

}  // namespace

FhatProfile::FhatProfile(double a) : a_(a) {
  if (!(a >= kMinWidth && a <= 2.0))
    throw DomainError("bump width a must lie in [" + std::to_string(kMinWidth) + ", 2]");

  log_f0_ = (2.0 / a) * kLn2 + std::lgamma(2.0 / a) - std::log(a);
  f0_ = std::exp(log_f0_);
  log_r2_ = (2.0 / a) * kLn2 + std::lgamma(4.0 / a) - std::lgamma(2.0 / a);

  // c_k = -(-1/2)^k 2^{1+ak} Gamma(1+ak/2)^2 sin(pi ak/2) / (pi k!)
  ck_.resize(kMaxTerms);
  log_ck_.resize(kMaxTerms);
  sign_ck_.resize(kMaxTerms);
  for (std::size_t i = 0; i < kMaxTerms; ++i) {
    const double k = static_cast<double>(i + 1);
    const double z = 0.5 * a * k;
    double s = std::sin(kPi * z);
    if (std::abs(z - std::round(z)) < 1e-12) s = 0.0;
    if (s == 0.0) {
      log_ck_[i] = -std::numeric_limits<double>::infinity();
      sign_ck_[i] = 0;
      ck_[i] = 0.0;
      continue;
    }
    log_ck_[i] = (1.0 + a * k) * kLn2 - k * kLn2 + 2.0 * std::lgamma(1.0 + z) -
                 std::lgamma(k + 1.0) - std::log(kPi) + std::log(std::abs(s));
    const int parity = (i + 1) % 2 == 0 ? 1 : -1;
    sign_ck_[i] = -parity * (s > 0.0 ? 1 : -1);
    ck_[i] = log_ck_[i] < 700.0 ? sign_ck_[i] * std::exp(log_ck_[i]) : 0.0;
  }

  rho_lo_ = std::exp(std::log(2e-8) - 0.5 * log_r2_);
  rho_hi_ = std::max(1e3, std::pow(1e3, 1.0 / a));
  if (a == 1.0 || a == 2.0) return;

  t0_ = std::log(rho_lo_);
  const double t1 = std::log(rho_hi_);
  const auto n = std::max<std::size_t>(
      4096, static_cast<std::size_t>(std::ceil((t1 - t0_) / (std::log(10.0) / 64.0))) + 1);
  dt_ = (t1 - t0_) / static_cast<double>(n - 1);
  logf_.resize(n);
  // Top down: once the series stops being usable it stays unusable at smaller rho.
  bool use_series = true;
  for (std::size_t i = n; i-- > 0;) {
    const double rho = std::exp(t0_ + dt_ * static_cast<double>(i));
    double lv = 0.0;
    if (use_series && series(rho, lv)) {
      logf_[i] = lv;
      continue;
    }
    use_series = false;
    const double q = quadrature(rho);
    if (!(q > 0.0) || !std::isfinite(q))
      throw QuadratureError("bump transform quadrature failed at rho = " + std::to_string(rho));
    logf_[i] = std::log(q);
  }
}

bool FhatProfile::series(double rho, double& log_value) const {
  if (!(rho > 0.0)) return false;
  const double lx = -a_ * std::log(rho);
  double sum = 0.0, sum_abs = 0.0;
  double prev_log = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t i = 0; i < kMaxTerms; ++i) {
    if (sign_ck_[i] == 0) continue;
    const double lt = log_ck_[i] + static_cast<double>(i + 1) * lx;
    if (lt > 700.0) return false;
    if (a_ > 1.0 && lt > prev_log) {
      // asymptotic series: stop at the smallest term
      converged = std::exp(prev_log) < 1e-15 * std::abs(sum);
      break;
    }
    const double t = sign_ck_[i] * std::exp(lt);
    sum += t;
    sum_abs += std::abs(t);
    if (i > 4 && std::exp(lt) < 1e-17 * std::abs(sum) && lt < prev_log) {
      converged = true;
      break;
    }
    prev_log = lt;
  }
  if (!converged || !(sum > 0.0) || sum_abs > 1e4 * sum) return false;
  log_value = std::log(sum) - 2.0 * std::log(rho);
  return true;
}

double FhatProfile::quadrature(double rho) const {
  const auto& rule = quad::gauss_legendre(8);
  const double a = a_;
  double total = 0.0;
  if (a < 1.0) {
    // (2/pi) \int y K0(rho y) e^{-c y^a} sin(d y^a) dy, integrated in s = ln y
    const double c = 0.5 * std::cos(0.5 * kPi * a);
    const double d = 0.5 * std::sin(0.5 * kPi * a);
    const double s_decay = std::log(45.0 / c) / a;
    const double s_hi = rho > 0.0 ? std::min(std::log(60.0 / rho), s_decay) : s_decay;
    const double s_scale = std::min(rho > 0.0 ? -std::log(rho) : s_decay, std::log(1.0 / c) / a);
    double s = std::min(s_scale, s_hi) - 20.0;
    while (s < s_hi) {
      const double y = std::exp(s);
      const double ya = std::pow(y, a);
      double w = 0.25;
      w = std::min(w, 1.2 / (a * (c + d) * ya));
      if (rho > 0.0) w = std::min(w, 1.2 / (rho * y));
      const double e = std::min(s + w, s_hi);
      const double mid = 0.5 * (s + e), half = 0.5 * (e - s);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double sq = mid + half * rule.nodes[q];
        const double yq = std::exp(sq);
        const double yqa = std::pow(yq, a);
        const double k0 = rho > 0.0 ? bessel_k0(rho * yq) : 0.0;
        total += half * rule.weights[q] * yq * yq * k0 * std::exp(-c * yqa) * std::sin(d * yqa);
      }
      s = e;
    }
    return 2.0 / kPi * total;
  }
  // direct Hankel integral; the r^a cusp at 0 gets geometric panels
  const double R = std::pow(90.0, 1.0 / a);
  const double r_g = std::min(1.0, 1.0 / std::max(rho, 1e-300));
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = mid + half * rule.nodes[q];
      acc += rule.weights[q] * r * std::cyl_bessel_j(0.0, rho * r) * std::exp(-0.5 * std::pow(r, a));
    }
    return half * acc;
  };
  total += panel(0.0, r_g * std::ldexp(1.0, -40));
  for (int l = 40; l > 0; --l) total += panel(r_g * std::ldexp(1.0, -l), r_g * std::ldexp(1.0, -l + 1));
  const double width = std::min(0.5, 1.5 / std::max(rho, 1e-300));
  const auto panels = static_cast<std::size_t>(std::ceil((R - r_g) / width));
  const double w = (R - r_g) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p)
    total += panel(r_g + w * static_cast<double>(p), r_g + w * static_cast<double>(p + 1));
  return total;
}

double FhatProfile::evaluate(double rho) const {
  rho = std::abs(rho);
  if (a_ == 2.0) return std::exp(-0.5 * rho * rho);
  if (a_ == 1.0) return 4.0 / std::pow(1.0 + 4.0 * rho * rho, 1.5);
  if (rho == 0.0) return f0_;
  double lv = 0.0;
  if (series(rho, lv)) return std::exp(lv);
  return quadrature(rho);
}

double FhatProfile::operator()(double rho) const {
  rho = std::abs(rho);
  if (a_ == 2.0) return std::exp(-0.5 * rho * rho);
  if (a_ == 1.0) return 4.0 / std::pow(1.0 + 4.0 * rho * rho, 1.5);
  if (rho <= rho_lo_) {
    if (rho == 0.0) return f0_;
    return f0_ * (1.0 - 0.25 * std::exp(2.0 * std::log(rho) + log_r2_));
  }
  if (rho >= rho_hi_) return evaluate(rho);
  const double u = (std::log(rho) - t0_) / dt_;
  const auto n = static_cast<std::ptrdiff_t>(logf_.size());
  auto i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 2;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 6);
  const double x = u - static_cast<double>(i0);
  double acc = 0.0;
  for (int j = 0; j < 6; ++j) {
    double l = 1.0;
    for (int m = 0; m < 6; ++m)
      if (m != j) l *= (x - m) / static_cast<double>(j - m);
    acc += l * logf_[static_cast<std::size_t>(i0 + j)];
  }
  return std::exp(acc);
}

std::shared_ptr<const FhatProfile> fhat_profile(double a) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const FhatProfile>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(a); it != cache.end()) return it->second;
  }
  auto p = std::make_shared<const FhatProfile>(a);
  std::lock_guard lock(mu);
  return cache.emplace(a, std::move(p)).first->second;
}

double grad_norm_sq(double a) {
  if (!(a > 0.0 && a <= 2.0)) throw DomainError("bump width a must lie in (0, 2]");
  return 0.5 * kPi * a;
}

double grad_norm_sq_quadrature(double a) {
  if (!(a > 0.0 && a <= 2.0)) throw DomainError("bump width a must lie in (0, 2]");
  // |grad f_a|^2 = (a^2/4) r^{2a-2} e^{-r^a}; integrate 2 pi r (...) dr in s = ln r
  const double lo = -40.0 / a, hi = std::log(60.0) / a;
  const auto nodes = quad::composite(lo, hi, static_cast<std::size_t>(std::ceil((hi - lo) * a / 0.25)));
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double r = std::exp(nodes.x[i]);
    const double ra = std::pow(r, a);
    s += nodes.w[i] * 0.25 * a * a * std::pow(r, 2.0 * a) * std::exp(-ra);
  }
  return kTwoPi * s;
}

}  // namespace spinbound
