#include "spinbound/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spinbound/error.hpp"
#include "spinbound/parallel.hpp"
#include "spinbound/quadrature.hpp"

namespace spinbound {

namespace {

constexpr double kRho8 = 8.0;  // exponent of the two-centre partition of unity

double dist_floor() { return 1e-6; }

struct Node2 {
  double rho, phi, w;  // w: rho * drho * dphi weight (polar Jacobian included)
};

// Panels on [t_lo, t_hi] of width <= width, with geometric refinement toward each break.
std::vector<double> graded_edges(double lo, double hi, double width,
                                 const std::vector<double>& breaks, int levels) {
  std::vector<double> e;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / width)));
  for (std::size_t i = 0; i <= n; ++i)
    e.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  for (double b : breaks) {
    if (!(b > lo && b < hi)) continue;
    e.push_back(b);
    for (int l = 0; l <= levels; ++l) {
      const double off = width * std::ldexp(1.0, -l);
      if (b - off > lo) e.push_back(b - off);
      if (b + off < hi) e.push_back(b + off);
    }
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end(), [](double x, double y) { return y - x < 1e-15 * (1.0 + std::abs(x)); }),
          e.end());
  return e;
}

void gauss_on_edges(const std::vector<double>& e, std::vector<double>& x, std::vector<double>& w) {
  const auto& rule = quad::gauss_legendre(8);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double mid = 0.5 * (e[i] + e[i + 1]), half = 0.5 * (e[i + 1] - e[i]);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      x.push_back(mid + half * rule.nodes[q]);
      w.push_back(half * rule.weights[q]);
    }
  }
}

struct AngularBreak {
  double dir;     // direction of a singular point seen from the centre
  double radius;  // its distance from the centre
};

// Composite Gauss rule over one period, `base` equal panels, refined toward singular
// directions when rho is close to their radius.
void angular_rule(double rho, std::size_t base, const std::vector<AngularBreak>& breaks,
                  std::vector<double>& phi, std::vector<double>& w) {
  phi.clear();
  w.clear();
  const double start = breaks.empty() ? 0.0 : breaks.front().dir;
  std::vector<double> e;
  for (std::size_t i = 0; i <= base; ++i)
    e.push_back(start + kTwoPi * static_cast<double>(i) / static_cast<double>(base));
  const double step = kTwoPi / static_cast<double>(base);
  for (const auto& b : breaks) {
    if (!(b.radius > 0.0)) continue;
    const double rel = std::abs(rho - b.radius) / b.radius;
    if (rel > 1.0) continue;
    const int levels = std::clamp(static_cast<int>(std::ceil(std::log2(1.0 / std::max(rel, 1e-300)))) + 2, 1, 40);
    double d = b.dir - start;
    d -= kTwoPi * std::floor(d / kTwoPi);
    const double c = start + d;
    for (int l = 1; l <= levels; ++l) {
      const double off = step * std::ldexp(1.0, -l);
      e.push_back(c - off);
      e.push_back(c + off);
      // the wrapped copies keep the rule periodic
      e.push_back(c - off + kTwoPi);
      e.push_back(c + off - kTwoPi);
    }
    e.push_back(c);
  }
  const double end = start + kTwoPi;
  e.erase(std::remove_if(e.begin(), e.end(), [&](double x) { return x < start || x > end; }), e.end());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end(), [](double x, double y) { return y - x < 1e-14; }), e.end());
  gauss_on_edges(e, phi, w);
}

double arg(const Vec2& v) { return std::atan2(v.y(), v.x()); }

// sum_{k,l} c_k c_l R^{-a(k+l)} / (a (k+l))
double tail_series(const FhatProfile& f, double R) {
  const auto& c = f.tail_coefficients();
  const double a = f.a();
  const double lr = std::log(R);
  std::vector<double> t;
  for (std::size_t k = 0; k < c.size() && k < 80; ++k)
    t.push_back(c[k] == 0.0 ? 0.0 : c[k] * std::exp(-a * static_cast<double>(k + 1) * lr));
  double s = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t l = 0; l < t.size(); ++l)
      s += t[k] * t[l] / (a * static_cast<double>(k + l + 2));
  return s;
}

double max_abs_point(const PointList& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, p.norm());
  return m;
}

}  // namespace

std::string to_string(PointStrategy s) {
  return s == PointStrategy::Equispaced ? "equispaced" : "farthest_point";
}

std::string to_string(PotentialForm f) { return f == PotentialForm::Exact ? "exact" : "dropped"; }

TrialBasis make_trial_basis(const CouplingSpec& model, const ThresholdData& thr, PointList points,
                            double a) {
  if (points.empty()) throw InputError("trial basis needs at least one point");
  const double tol = thr.minset_tolerance();
  for (const auto& p : points) {
    const double excess = lower_band(model, p) - thr.kappa;
    if (!(excess < tol + 1e-12 * std::max(1.0, std::abs(thr.kappa))))
      throw InputError("trial point is not on the minimum set");
  }
  for (std::size_t j = 0; j < points.size(); ++j)
    for (std::size_t k = j + 1; k < points.size(); ++k)
      if (!((points[j] - points[k]).norm() > dist_floor()))
        throw DegenerateInputError("trial points must be separated by more than 1e-6");
  return TrialBasis{std::move(points), a, fhat_profile(a)};
}

PointList select_points(const MinSet& minset, std::size_t n, PointStrategy strategy) {
  if (n == 0) throw InputError("need at least one point");
  PointList pool;
  if (const auto* c = std::get_if<CircleSet>(&minset)) {
    if (c->radius == 0.0) {
      pool.push_back(c->center);
    } else if (strategy == PointStrategy::Equispaced) {
      return sample_minset(minset, n);
    } else {
      pool = sample_minset(minset, std::max<std::size_t>(720, 8 * n));
    }
  } else {
    const auto& cloud = std::get<PointCloud>(minset).points;
    for (const auto& p : cloud) {
      bool fresh = true;
      for (const auto& q : pool)
        if ((p - q).norm() <= dist_floor()) fresh = false;
      if (fresh) pool.push_back(p);
    }
    if (strategy == PointStrategy::Equispaced) {
      if (n > pool.size())
        throw CapacityError("requested " + std::to_string(n) + " points but the minimum set has " +
                            std::to_string(pool.size()));
      PointList out;
      for (std::size_t i = 0; i < n; ++i) out.push_back(pool[i * pool.size() / n]);
      return out;
    }
  }
  if (n > pool.size())
    throw CapacityError("requested " + std::to_string(n) + " points but the minimum set has " +
                        std::to_string(pool.size()));
  PointList out{pool.front()};
  std::vector<double> dmin(pool.size(), std::numeric_limits<double>::infinity());
  while (out.size() < n) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      dmin[i] = std::min(dmin[i], (pool[i] - out.back()).norm());
      if (dmin[i] > dmin[best]) best = i;
    }
    out.push_back(pool[best]);
  }
  return out;
}

Definiteness definiteness(const CMatrix& m, double tol_rel) {
  if (m.rows() != m.cols()) throw InputError("matrix is not square");
  if (m.size() == 0) return {0.0, false};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw InputError("matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  Definiteness d;
  d.lambda_max = es.eigenvalues().maxCoeff();
  d.negative_definite = d.lambda_max < -tol_rel * std::max(1.0, m.norm());
  return d;
}

DefiniteSearch find_definite_points(const RadonMeasureSpec& nu, const MinSet& minset,
                                    std::size_t n, std::size_t budget, std::uint64_t seed) {
  if (n == 0) throw InputError("need at least one point");
  std::mt19937_64 rng(seed);
  DefiniteSearch best;
  best.lambda_max = std::numeric_limits<double>::infinity();

  const auto* circle = std::get_if<CircleSet>(&minset);
  PointList cloud;
  if (!circle) {
    for (const auto& p : std::get<PointCloud>(minset).points) {
      bool fresh = true;
      for (const auto& q : cloud)
        if ((p - q).norm() <= dist_floor()) fresh = false;
      if (fresh) cloud.push_back(p);
    }
    if (n > cloud.size()) {
      best.lambda_max = 0.0;
      return best;
    }
  } else if (circle->radius == 0.0 && n > 1) {
    best.lambda_max = 0.0;
    return best;
  }

  // coordinates: angles on a circle, indices into the cloud
  auto to_points = [&](const std::vector<double>& c) {
    PointList pts;
    for (double v : c) {
      if (circle)
        pts.push_back(circle->center + circle->radius * Vec2(std::cos(v), std::sin(v)));
      else
        pts.push_back(cloud[static_cast<std::size_t>(v)]);
    }
    return pts;
  };
  auto evaluate = [&](const std::vector<double>& c, double& lam) {
    const PointList pts = to_points(c);
    for (std::size_t j = 0; j < pts.size(); ++j)
      for (std::size_t k = j + 1; k < pts.size(); ++k)
        if ((pts[j] - pts[k]).norm() <= dist_floor()) return false;
    const CMatrix F = fourier_matrix(nu, pts);
    const Definiteness d = definiteness(F);
    lam = d.lambda_max;
    ++best.evaluations;
    if (lam < best.lambda_max) {
      best.lambda_max = lam;
      best.points = pts;
      best.success = d.negative_definite;
    }
    return true;
  };

  std::vector<double> cur(n);
  if (circle) {
    for (std::size_t i = 0; i < n; ++i) cur[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  } else {
    const PointList init = select_points(PointCloud{cloud, 0.0}, n, PointStrategy::FarthestPoint);
    for (std::size_t i = 0; i < n; ++i)
      cur[i] = static_cast<double>(std::find_if(cloud.begin(), cloud.end(), [&](const Vec2& p) {
                                     return (p - init[i]).norm() == 0.0;
                                   }) - cloud.begin());
  }
  double cur_lam = 0.0;
  if (!evaluate(cur, cur_lam)) cur_lam = std::numeric_limits<double>::infinity();
  if (best.success || budget <= 1) return best;

  const double span = circle ? kTwoPi : static_cast<double>(cloud.size());
  double step = span / (4.0 * static_cast<double>(n));
  const double min_step = circle ? 1e-6 : 1.0;
  while (best.evaluations < budget && !best.success) {
    bool improved = false;
    for (std::size_t j = 0; j < n && best.evaluations < budget && !best.success; ++j) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> trial = cur;
        double v = trial[j] + sgn * step;
        if (circle) {
          v = std::fmod(v, kTwoPi);
          if (v < 0.0) v += kTwoPi;
        } else {
          v = std::round(v);
          v = std::fmod(std::fmod(v, span) + span, span);
        }
        trial[j] = v;
        double lam = 0.0;
        if (evaluate(trial, lam) && lam < cur_lam) {
          cur = trial;
          cur_lam = lam;
          improved = true;
          break;
        }
        if (best.evaluations >= budget) break;
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < min_step) {
        // random restart
        std::uniform_real_distribution<double> u(0.0, span);
        for (auto& v : cur) v = circle ? u(rng) : std::floor(u(rng));
        std::sort(cur.begin(), cur.end());
        if (!evaluate(cur, cur_lam)) cur_lam = std::numeric_limits<double>::infinity();
        step = span / (4.0 * static_cast<double>(n));
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- kinetic

namespace {

struct KineticSetup {
  const CouplingSpec* model;
  double kappa;
  const FhatProfile* f;
  double t_min, t_max;
};

// \int w_c(p) (lambda_- - kappa) fhat(|p - pc|) fhat(|p - po|) dp over |p - pc| < R,
// w_c = 1 when po == pc.
double kinetic_piece(const KineticSetup& s, const Vec2& pc, const Vec2& po) {
  const bool diag = (pc - po).norm() == 0.0;
  const double d = (pc - po).norm();
  std::vector<double> tb;
  std::vector<AngularBreak> ab;
  if (pc.norm() > 0.0) {
    tb.push_back(std::log(pc.norm()));
    ab.push_back({arg(-pc), pc.norm()});
  }
  if (!diag) {
    tb.push_back(std::log(d));
    ab.push_back({arg(po - pc), d});
  }
  const BandExcess excess(*s.model, s.kappa, pc);
  auto edges = graded_edges(s.t_min, s.t_max, 0.5, tb, 30);
  // fast (Gaussian-like) decay at a near 2 is smooth in rho but not in log rho
  for (int i = 1; i <= 60; ++i) edges.push_back(std::log(1.0 + 0.25 * i));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double x, double y) { return y - x < 1e-12; }),
              edges.end());
  std::vector<double> tn, tw;
  gauss_on_edges(edges, tn, tw);
  std::vector<double> ph, pw;
  double total = 0.0;
  for (std::size_t i = 0; i < tn.size(); ++i) {
    const double rho = std::exp(tn[i]);
    const double rf = rho * (*s.f)(rho);
    angular_rule(rho, !diag && rho * d < 200.0 ? 32 : 8, ab, ph, pw);
    double ring = 0.0;
    for (std::size_t q = 0; q < ph.size(); ++q) {
      const Vec2 dq = rho * Vec2(std::cos(ph[q]), std::sin(ph[q]));
      const Vec2 p = pc + dq;
      const double e = excess(dq);
      double v;
      if (diag) {
        v = e * rf * rf;
      } else {
        const double ro = (p - po).norm();
        const double ratio = rho / ro;
        const double wc = 1.0 / (1.0 + std::pow(ratio, kRho8));
        v = wc * e * rf * (rho * (*s.f)(ro));
      }
      ring += pw[q] * v;
    }
    total += tw[i] * ring;  // rho^2 dt = rho drho; rf * rf carries rho^2
  }
  return total;
}

}  // namespace

CMatrix kinetic_matrix(const CouplingSpec& model, const ThresholdData& thr,
                       const TrialBasis& basis) {
  const auto n = basis.points.size();
  const FhatProfile& f = *basis.profile;
  KineticSetup s{&model, thr.kappa, &f, 0.0, 0.0};
  s.t_min = std::min(std::log(1e-8), (std::log(1e-20) - 2.0 * f.log_at_zero()) / 4.0);
  const double R = std::max(f.rho_max(), 1e4 * (1.0 + max_abs_point(basis.points)));
  s.t_max = std::log(R);

  const double tail = tail_series(f, R);
  std::vector<double> tails(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int q = 0; q < 64; ++q) {
      const double ph = kTwoPi * q / 64.0;
      const Vec2 p = basis.points[j] + R * Vec2(std::cos(ph), std::sin(ph));
      acc += (lower_band(model, p) - thr.kappa) / (R * R);
    }
    tails[j] = kTwoPi * (acc / 64.0) * tail;
  }

  CMatrix T = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) pairs.emplace_back(j, k);
  std::vector<double> vals(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [j, k] = pairs[i];
    const Vec2& pj = basis.points[j];
    const Vec2& pk = basis.points[k];
    if (j == k) {
      vals[i] = kinetic_piece(s, pj, pj) + tails[j];
    } else {
      vals[i] = kinetic_piece(s, pj, pk) + kinetic_piece(s, pk, pj) + 0.5 * (tails[j] + tails[k]);
    }
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [j, k] = pairs[i];
    if (!std::isfinite(vals[i])) throw ResolutionError("kinetic quadrature is not finite", 0);
    T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = vals[i];
    T(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = vals[i];
  }
  return T;
}

// ---------------------------------------------------------------- potential

CMatrix potential_matrix_dropped(const RadonMeasureSpec& nu, const TrialBasis& basis) {
  const auto n = basis.points.size();
  CMatrix W = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (nu.is_zero()) return W;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      const Vec2 dp = basis.points[j] - basis.points[k];
      const MeasureNodes nodes = discretize(nu, dp, 1, kNodeCap, true);
      cplx s = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double f2 = std::exp(-std::pow(nodes.x[i].norm(), basis.a));
        s += nodes.weight(i) * f2 * std::polar(1.0, -dp.dot(nodes.x[i]));
      }
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw QuadratureError("potential quadrature is not finite");
      W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = s;
      W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(s);
    }
  return W;
}

namespace {

// Momentum nodes k_n and weights c_n with D_j(x) = sum_n c_n exp(i <k_n, x>), where
// D_j(x) = (1/2pi) \int e^{i<p_j+q, x>} [omega(p_j+q) - omega_j] eta(|q|) fhat(|q|) dq.
struct PlaneWaves {
  std::vector<double> kx, ky;
  std::vector<cplx> c;
};

PlaneWaves correction_waves(const CouplingSpec& model, const TrialBasis& basis, std::size_t j,
                            double extent, double cut, double width, double q_max) {
  const Vec2& pj = basis.points[j];
  const cplx wj = lower_band_phase(model, pj);
  const FhatProfile& f = *basis.profile;
  const double pn = pj.norm();

  std::vector<AngularBreak> ab;
  if (pn > 0.0) ab.push_back({arg(-pj), pn});

  // log-radial inner part, then linear panels refined toward |p_j|
  double rho1 = 0.5 / extent;
  if (pn > 0.0) rho1 = std::min(rho1, 0.5 * pn);
  rho1 = std::min(rho1, 1.0);
  std::vector<double> rn, rw;
  {
    std::vector<double> tn, tw;
    gauss_on_edges(graded_edges(std::log(1e-13), std::log(rho1), 1.0, {}, 0), tn, tw);
    for (std::size_t i = 0; i < tn.size(); ++i) {
      const double r = std::exp(tn[i]);
      rn.push_back(r);
      rw.push_back(tw[i] * r);
    }
    std::vector<double> br;
    if (pn > rho1) br.push_back(pn);
    const double h = std::min(2.0, 3.0 / extent);
    gauss_on_edges(graded_edges(rho1, q_max, h, br, 30), rn, rw);
  }

  PlaneWaves out;
  std::vector<double> ph, pw;
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const double rho = rn[i];
    const double eta = 0.5 * std::erfc((rho - cut) / width);
    const double amp = eta * f(rho) * rho * rw[i] / kTwoPi;
    if (amp == 0.0) continue;
    const auto base = static_cast<std::size_t>(
        std::max(4.0, std::ceil((1.3 * rho * extent + 16.0) / 8.0)));
    angular_rule(rho, base, ab, ph, pw);
    for (std::size_t q = 0; q < ph.size(); ++q) {
      const Vec2 k = pj + rho * Vec2(std::cos(ph[q]), std::sin(ph[q]));
      const cplx diff = lower_band_phase(model, k) - wj;
      if (diff == 0.0) continue;
      out.kx.push_back(k.x());
      out.ky.push_back(k.y());
      out.c.push_back(amp * pw[q] * diff);
    }
  }
  return out;
}

}  // namespace

CMatrix potential_matrix_exact(const CouplingSpec& model, const RadonMeasureSpec& nu,
                               const TrialBasis& basis, const ExactFormSettings& settings) {
  const auto n = basis.points.size();
  CMatrix W = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (nu.is_zero()) return W;

  // geometry of the support: oscillation extent and distance from the origin
  const MeasureNodes coarse = discretize(nu, Vec2::Zero(), 4);
  double extent = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (const auto& x : coarse.x) {
    extent = std::max(extent, x.norm());
    dmin = std::min(dmin, x.norm());
  }
  extent = std::max(extent, 1e-3);
  const double width = settings.sharpness / std::max(dmin, settings.min_distance);
  const double cut = 5.0 * width;
  const double q_max = cut + 6.0 * width;
  const double pmax = max_abs_point(basis.points);

  std::vector<PlaneWaves> waves(n);
  std::vector<cplx> omega(n);
  bool corrected = false;
  for (std::size_t j = 0; j < n; ++j) {
    waves[j] = correction_waves(model, basis, j, extent, cut, width, q_max);
    omega[j] = lower_band_phase(model, basis.points[j]);
    corrected = corrected || !waves[j].c.empty();
  }
  // the node set must resolve products of the highest frequencies present
  const double band = (corrected ? q_max : 0.0) + pmax;
  const MeasureNodes nodes = discretize(nu, Vec2(band, band), 1, settings.cap, true);

  // first and second spinor components at every node, times sqrt 2
  const std::size_t m = nodes.size();
  std::vector<cplx> first(n * m), second(n * m);
  parallel_for(m, [&](std::size_t i) {
    const Vec2& x = nodes.x[i];
    const double f = std::exp(-0.5 * std::pow(x.norm(), basis.a));
    for (std::size_t j = 0; j < n; ++j) {
      const cplx g = f * std::polar(1.0, basis.points[j].dot(x));
      const PlaneWaves& pw = waves[j];
      double re = 0.0, im = 0.0;
      for (std::size_t q = 0; q < pw.c.size(); ++q) {
        const double th = pw.kx[q] * x.x() + pw.ky[q] * x.y();
        const double cs = std::cos(th), sn = std::sin(th);
        re += pw.c[q].real() * cs - pw.c[q].imag() * sn;
        im += pw.c[q].real() * sn + pw.c[q].imag() * cs;
      }
      first[j * m + i] = omega[j] * g + cplx(re, im);
      second[j * m + i] = g;
    }
  });

  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        s += nodes.weight(i) * (std::conj(first[j * m + i]) * first[k * m + i] +
                                std::conj(second[j * m + i]) * second[k * m + i]);
      s *= 0.5;
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw QuadratureError("potential quadrature is not finite");
      W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = s;
      W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(s);
    }
  return W;
}

// ---------------------------------------------------------------- certify

CertificateResult certify(const CouplingSpec& model, const ThresholdData& thr,
                          const RadonMeasureSpec& nu, const CertifyOptions& opt) {
  if (opt.a_schedule.empty()) throw ConfigError("a_schedule is empty");
  for (std::size_t i = 0; i < opt.a_schedule.size(); ++i) {
    const double a = opt.a_schedule[i];
    if (!(a > 0.0 && a <= 2.0)) throw ConfigError("a_schedule entries must lie in (0, 2]");
    if (i > 0 && !(a < opt.a_schedule[i - 1]))
      throw ConfigError("a_schedule must be strictly decreasing");
  }
  if (opt.n == 0) throw ConfigError("N must be at least 1");

  CertificateResult res;
  res.n = opt.n;
  res.points = select_points(thr.minset, opt.n, opt.strategy);
  res.precheck = definiteness(fourier_matrix(nu, res.points), opt.tol_def);
  if (!res.precheck.negative_definite) {
    res.search = find_definite_points(nu, thr.minset, opt.n, opt.search_budget, opt.seed);
    if (res.search->success) res.points = res.search->points;
  }

  double best_lam = std::numeric_limits<double>::infinity();
  for (double a : opt.a_schedule) {
    const TrialBasis basis = make_trial_basis(model, thr, res.points, a);
    const CMatrix T = kinetic_matrix(model, thr, basis);
    const CMatrix Wd = potential_matrix_dropped(nu, basis);
    WidthDiagnostics diag;
    diag.a = a;
    CMatrix W = Wd;
    if (opt.form == PotentialForm::Exact) {
      W = potential_matrix_exact(model, nu, basis, opt.exact);
      diag.form_gap = (W - Wd).cwiseAbs().maxCoeff();
    }
    const CMatrix Q = T + W;
    const Definiteness dq = definiteness(Q, opt.tol_def);
    diag.lambda_max_q = dq.lambda_max;
    diag.lambda_max_t = definiteness(T, opt.tol_def).lambda_max;
    diag.lambda_max_w = definiteness(W, opt.tol_def).lambda_max;
    diag.negative_definite = dq.negative_definite;
    for (std::size_t j = 0; j < opt.n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      diag.kinetic_diag_max = std::max(diag.kinetic_diag_max, T(jj, jj).real());
      const auto c = thr.quad_constant_at(res.points[j]);
      const double cj = c ? *c : quadratic_constant(model, thr.kappa, res.points[j]);
      diag.kinetic_bound = std::max(diag.kinetic_bound, 0.5 * kPi * cj * a);
    }
    res.diagnostics.push_back(diag);
    if (dq.lambda_max < best_lam) {
      best_lam = dq.lambda_max;
      res.matrices_a = a;
      res.kinetic = T;
      res.potential = W;
      res.q = Q;
    }
    if (dq.negative_definite) {
      res.certified = true;
      res.a_star = a;
      break;
    }
  }
  res.lambda_max_q = best_lam;
  if (res.certified) {
    res.certified_count = opt.n;
  } else {
    for (std::size_t m = opt.n - 1; m >= 1; --m) {
      const auto mm = static_cast<Eigen::Index>(m);
      if (definiteness(res.q.topLeftCorner(mm, mm), opt.tol_def).negative_definite) {
        res.certified_count = m;
        break;
      }
    }
  }
  return res;
}

}  // namespace spinbound
