#include "spinbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinbound/error.hpp"

namespace spinbound {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

}  // namespace

cplx coupling_value(const CouplingSpec& model, const Vec2& p) {
  const cplx a = std::visit(
      overloaded{
          [&](const Rashba& m) { return m.alpha * cplx(p.y(), p.x()); },
          [&](const Dresselhaus& m) { return -m.alpha * cplx(p.x(), p.y()); },
          [&](const CustomCoupling& m) {
            if (!m.evaluator) throw NumericalInputError("custom coupling has no evaluator");
            return m.evaluator(p);
          },
      },
      model);
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
    throw NumericalInputError("coupling A(p) is not finite at p = (" + std::to_string(p.x()) +
                              ", " + std::to_string(p.y()) + ")");
  }
  return a;
}

GrowthConstants growth_constants(const CouplingSpec& model) {
  return std::visit(
      overloaded{
          [](const Rashba& m) { return GrowthConstants{0.5, std::max(2.0 * std::abs(m.alpha), 1.0)}; },
          [](const Dresselhaus& m) {
            return GrowthConstants{0.5, std::max(2.0 * std::abs(m.alpha), 1.0)};
          },
          [](const CustomCoupling& m) { return GrowthConstants{m.a_growth, m.r_growth}; },
      },
      model);
}

bool is_builtin(const CouplingSpec& model) { return !std::holds_alternative<CustomCoupling>(model); }

SymbolMatrix symbol(const CouplingSpec& model, const Vec2& p) {
  const cplx a = coupling_value(model, p);
  const double p2 = p.squaredNorm();
  SymbolMatrix s;
  s.value << p2, a, std::conj(a), p2;
  s.p = p;
  return s;
}

BandPair bands(const CouplingSpec& model, const Vec2& p) {
  const double mod = std::abs(coupling_value(model, p));
  const double p2 = p.squaredNorm();
  return {p2 + mod, p2 - mod};
}

double lower_band(const CouplingSpec& model, const Vec2& p) {
  return p.squaredNorm() - std::abs(coupling_value(model, p));
}

cplx lower_band_phase(const CouplingSpec& model, const Vec2& p) {
  const cplx a = coupling_value(model, p);
  const double mod = std::abs(a);
  if (mod == 0.0) return {-1.0, 0.0};
  return -a / mod;
}

BandBasis band_basis(const CouplingSpec& model, const Vec2& p) {
  const cplx a = coupling_value(model, p);
  const double mod = std::abs(a);
  const double s = 1.0 / std::sqrt(2.0);
  const cplx phase = mod == 0.0 ? cplx(1.0, 0.0) : a / mod;
  BandBasis b;
  b.u_minus << -phase * s, s;
  b.u_plus << phase * s, s;
  return b;
}

double ThresholdData::minset_tolerance() const {
  return std::visit(overloaded{
                        [&](const CircleSet&) { return 1e-12 * std::max(1.0, std::abs(kappa)); },
                        [](const PointCloud& c) { return c.tolerance; },
                    },
                    minset);
}

std::optional<double> ThresholdData::quad_constant_at(const Vec2& p0) const {
  for (const auto& q : quad_constants) {
    if ((q.p0 - p0).norm() <= 1e-9 * std::max(1.0, p0.norm())) return q.c;
  }
  return std::nullopt;
}

PointList sample_minset(const MinSet& minset, std::size_t n) {
  PointList out;
  out.reserve(n);
  std::visit(overloaded{
                 [&](const CircleSet& c) {
                   for (std::size_t k = 0; k < n; ++k) {
                     out.push_back(c.center + polar(c.radius, kTwoPi * static_cast<double>(k) /
                                                                  static_cast<double>(n)));
                   }
                 },
                 [&](const PointCloud& c) {
                   if (c.points.empty()) return;
                   const std::size_t m = std::min(n, c.points.size());
                   for (std::size_t k = 0; k < m; ++k) {
                     out.push_back(c.points[k * c.points.size() / m]);
                   }
                 },
             },
             minset);
  return out;
}

BandExcess::BandExcess(const CouplingSpec& model, double kappa, const Vec2& p0)
    : model_(&model), kappa_(kappa), p0_(p0) {
  if (const auto* r = std::get_if<Rashba>(&model)) radius_ = 0.5 * std::abs(r->alpha);
  if (const auto* d = std::get_if<Dresselhaus>(&model)) radius_ = 0.5 * std::abs(d->alpha);
  if (radius_ >= 0.0) {
    // the centre stands for the exact point of S nearest to it; a rounding offset would be
    // amplified by |fhat|^2, whose integral grows like Gamma(2/a)
    p0_ = p0.norm() > 0.0 ? Vec2(p0 * (radius_ / p0.norm())) : Vec2(radius_, 0.0);
    return;
  }
  taylor_below_ = 1e-5 * (1.0 + p0.norm());
  const double h = 1e-3 * (1.0 + p0.norm());
  auto f = [&](double dx, double dy) { return lower_band(model, p0 + Vec2(dx, dy)); };
  const double f0 = f(0.0, 0.0);
  hxx_ = (f(h, 0.0) - 2.0 * f0 + f(-h, 0.0)) / (h * h);
  hyy_ = (f(0.0, h) - 2.0 * f0 + f(0.0, -h)) / (h * h);
  hxy_ = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
}

double BandExcess::operator()(const Vec2& q) const {
  if (radius_ >= 0.0) {
    // lambda_- - kappa = (|p| - r)^2 with |p| - r = (|p|^2 - r^2) / (|p| + r)
    const Vec2 p = p0_ + q;
    const double pn = p.norm();
    if (radius_ == 0.0) return pn * pn;
    const double d = (2.0 * p0_.dot(q) + q.squaredNorm()) / (pn + radius_);
    return d * d;
  }
  if (q.norm() < taylor_below_)
    return std::max(0.0, 0.5 * (hxx_ * q.x() * q.x() + 2.0 * hxy_ * q.x() * q.y() + hyy_ * q.y() * q.y()));
  return std::max(0.0, lower_band(*model_, p0_ + q) - kappa_);
}

double quadratic_constant(const CouplingSpec& model, double kappa, const Vec2& p0,
                          std::size_t angles, std::size_t radii) {
  const GrowthConstants g = growth_constants(model);
  const double p0n = p0.norm();
  const double disk = std::max(4.0 * p0n, 4.0 * g.r_growth);
  const double r_lo = 1e-3 * std::max(1.0, p0n);
  const double r_hi = disk + p0n;
  const double theta0 = p0n > 0.0 ? std::atan2(p0.y(), p0.x()) : 0.0;
  const double log_step = std::log(r_hi / r_lo) / static_cast<double>(radii - 1);

  double best = 0.0;
  for (std::size_t i = 0; i < radii; ++i) {
    const double r = r_lo * std::exp(log_step * static_cast<double>(i));
    for (std::size_t k = 0; k < angles; ++k) {
      const Vec2 p = p0 + polar(r, theta0 + kTwoPi * static_cast<double>(k) / static_cast<double>(angles));
      if (p.norm() > disk) continue;
      const double excess = std::max(0.0, lower_band(model, p) - kappa);
      best = std::max(best, excess / (r * r));
    }
  }
  // Outside the disk lambda_- <= p^2, |p - p0| >= |p| - |p0|, and (p^2 - kappa)/(|p| - |p0|)^2
  // decreases in |p| because kappa <= 0.
  const double tail = (disk * disk - kappa) / ((disk - p0n) * (disk - p0n));
  return std::max(best, tail);
}

namespace {

double band_along(const CouplingSpec& model, double r, double theta) {
  return lower_band(model, polar(r, theta));
}

// Safeguarded Newton on the radial profile inside [lo, hi]; returns argmin.
double refine_radial(const CouplingSpec& model, double theta, double r, double lo, double hi,
                     std::size_t steps) {
  for (std::size_t it = 0; it < steps; ++it) {
    const double h = std::max(1e-7, 1e-4 * (hi - lo));
    const double fm = band_along(model, std::max(0.0, r - h), theta);
    const double f0 = band_along(model, r, theta);
    const double fp = band_along(model, r + h, theta);
    const double d1 = (fp - fm) / (r + h - std::max(0.0, r - h));
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (d1 > 0.0) hi = r;
    else lo = r;
    double next = (d2 > 0.0) ? r - d1 / d2 : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - r) < 1e-15 * std::max(1.0, r);
    r = next;
    if (done) break;
  }
  return r;
}

// Damped 2D Newton with finite differences; keeps p if the Hessian is not positive definite.
Vec2 refine_planar(const CouplingSpec& model, Vec2 p, std::size_t steps) {
  const double h = 1e-5 * std::max(1.0, p.norm());
  for (std::size_t it = 0; it < steps; ++it) {
    auto f = [&](double dx, double dy) { return lower_band(model, p + Vec2(dx, dy)); };
    const double f0 = f(0, 0);
    const double fxp = f(h, 0), fxm = f(-h, 0), fyp = f(0, h), fym = f(0, -h);
    Eigen::Vector2d grad((fxp - fxm) / (2 * h), (fyp - fym) / (2 * h));
    Eigen::Matrix2d hess;
    hess(0, 0) = (fxp - 2 * f0 + fxm) / (h * h);
    hess(1, 1) = (fyp - 2 * f0 + fym) / (h * h);
    hess(0, 1) = hess(1, 0) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    if (es.eigenvalues()(0) <= 1e-8 * std::max(1.0, std::abs(es.eigenvalues()(1)))) break;
    Vec2 step = -hess.ldlt().solve(grad);
    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      if (lower_band(model, p + t * step) <= f0) {
        p += t * step;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved || (t * step).norm() < 1e-14 * std::max(1.0, p.norm())) break;
  }
  return p;
}

ThresholdData custom_threshold(const CouplingSpec& model, const SearchSettings& s) {
  const GrowthConstants g = growth_constants(model);
  const double r_search = 2.0 * g.r_growth;
  const std::size_t na = std::max<std::size_t>(s.angular, 8);
  const std::size_t nr = std::max<std::size_t>(s.radial, 8);

  std::vector<Vec2> best_point(na);
  std::vector<double> best_value(na);
  std::vector<bool> at_edge(na, false);
  for (std::size_t i = 0; i < na; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(na);
    std::size_t kmin = 0;
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= nr; ++k) {
      const double v = band_along(model, r_search * static_cast<double>(k) / static_cast<double>(nr), theta);
      if (v < vmin) {
        vmin = v;
        kmin = k;
      }
    }
    at_edge[i] = (kmin == nr);
    const double dr = r_search / static_cast<double>(nr);
    double r = dr * static_cast<double>(kmin);
    if (kmin > 0 && kmin < nr) {
      r = refine_radial(model, theta, r, r - dr, r + dr, s.newton_steps);
    }
    best_point[i] = polar(r, theta);
    best_value[i] = band_along(model, r, theta);
  }

  // Planar refinement from each angular local minimum (catches isolated minima off the grid).
  for (std::size_t i = 0; i < na; ++i) {
    const double prev = best_value[(i + na - 1) % na];
    const double next = best_value[(i + 1) % na];
    if (best_value[i] <= prev && best_value[i] <= next && !at_edge[i]) {
      const Vec2 q = refine_planar(model, best_point[i], s.newton_steps);
      const double v = lower_band(model, q);
      if (v < best_value[i]) {
        best_point[i] = q;
        best_value[i] = v;
      }
    }
  }

  const auto it = std::min_element(best_value.begin(), best_value.end());
  const std::size_t imin = static_cast<std::size_t>(it - best_value.begin());
  if (at_edge[imin]) {
    throw SearchDomainError("lower band minimum not bracketed inside |p| <= " +
                            std::to_string(r_search));
  }
  const double kappa = *it;
  const double tol = s.tolerance * std::max(1.0, std::abs(kappa));

  PointCloud cloud;
  cloud.tolerance = tol;
  for (std::size_t i = 0; i < na; ++i) {
    if (best_value[i] - kappa > tol) continue;
    const bool dup = std::any_of(cloud.points.begin(), cloud.points.end(),
                                 [&](const Vec2& q) { return (q - best_point[i]).norm() < 1e-6; });
    if (!dup) cloud.points.push_back(best_point[i]);
  }
  if (cloud.points.size() > s.cloud_points) {
    PointList thinned;
    for (std::size_t k = 0; k < s.cloud_points; ++k) {
      thinned.push_back(cloud.points[k * cloud.points.size() / s.cloud_points]);
    }
    cloud.points = std::move(thinned);
  }
  ThresholdData out;
  out.kappa = kappa;
  out.minset = std::move(cloud);
  return out;
}

}  // namespace

ThresholdData threshold(const CouplingSpec& model, const SearchSettings& search) {
  ThresholdData out;
  if (is_builtin(model)) {
    const double alpha = std::visit(overloaded{
                                        [](const Rashba& m) { return m.alpha; },
                                        [](const Dresselhaus& m) { return m.alpha; },
                                        [](const CustomCoupling&) { return 0.0; },
                                    },
                                    model);
    out.kappa = -alpha * alpha / 4.0;
    if (alpha == 0.0) {
      out.minset = PointCloud{{Vec2::Zero()}, 0.0};
    } else {
      out.minset = CircleSet{Vec2::Zero(), std::abs(alpha) / 2.0};
    }
  } else {
    out = custom_threshold(model, search);
  }

  const PointList probes =
      search.probes.empty() ? sample_minset(out.minset, search.probe_samples) : search.probes;
  for (const Vec2& p0 : probes) {
    out.quad_constants.push_back(
        {p0, quadratic_constant(model, out.kappa, p0, search.c_angles, search.c_radii)});
  }
  return out;
}

double check_a1(const CouplingSpec& model, const std::vector<double>& radii) {
  if (radii.empty()) return 0.0;
  const double r = radii.back();
  constexpr std::size_t kAngles = 720;
  double worst = 0.0;
  for (std::size_t k = 0; k < kAngles; ++k) {
    const Vec2 p = polar(r, kTwoPi * static_cast<double>(k) / kAngles);
    worst = std::max(worst, std::abs(coupling_value(model, p)) / (r * r));
  }
  return worst;
}

double relative_bound_lambda(const CouplingSpec& model) {
  const GrowthConstants g = growth_constants(model);
  if (!(g.a_growth < 1.0)) {
    throw DomainError("relative bound needs a_growth < 1");
  }
  // |A| on the disk |p| <= r_growth; outside, |A|/(p^2 + lambda) < a_growth < 1.
  constexpr std::size_t kRadii = 128, kAngles = 256;
  std::vector<std::pair<double, double>> samples;  // (p^2, |A|)
  samples.reserve(kRadii * kAngles + 1);
  samples.emplace_back(0.0, std::abs(coupling_value(model, Vec2::Zero())));
  for (std::size_t i = 1; i <= kRadii; ++i) {
    const double r = g.r_growth * static_cast<double>(i) / kRadii;
    for (std::size_t k = 0; k < kAngles; ++k) {
      const Vec2 p = polar(r, kTwoPi * static_cast<double>(k) / kAngles);
      samples.emplace_back(r * r, std::abs(coupling_value(model, p)));
    }
  }
  double lambda = std::ldexp(1.0, -10);
  for (int it = 0; it < 80; ++it, lambda *= 2.0) {
    double sup = 0.0;
    for (const auto& [p2, mod] : samples) sup = std::max(sup, mod / (p2 + lambda));
    if (sup < 1.0) return lambda;
  }
  throw NoConvergenceError("relative bound: sup |A|/(p^2+lambda) never dropped below 1");
}

}  // namespace spinbound
