#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "spinbound/certificate.hpp"
#include "spinbound/error.hpp"

using namespace spinbound;

namespace {

const double kE1 = std::exp(-1.0);

RadonMeasureSpec unit_circle(double h = -1.0) {
  return RadonMeasureSpec::curve_delta(Curve::circle(Vec2::Zero(), 1.0), h);
}

RadonMeasureSpec well() {
  return RadonMeasureSpec::gaussian_well(2.0, 1.0, Vec2::Zero(), Box{Vec2(-9.0, -9.0), Vec2(9.0, 9.0)});
}

CouplingSpec free_model() {
  return CustomCoupling{[](const Vec2&) { return cplx(0.0); }, 0.5, 1.0};
}

double herm_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

// \int_0^r_max g(r) dr by Gauss-Legendre panels of width h, geometric toward 0 for r^a cusps
template <class F>
double radial(F g, double r_max, double h = 0.05) {
  static const double xg[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double wg[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  auto panel = [&](double lo, double hi) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += 0.5 * (hi - lo) * wg[q] * g(lo + 0.5 * (hi - lo) * (1.0 + xg[q]));
    return s;
  };
  double s = 0.0, lo = 0.0;
  for (double hi = h * std::ldexp(1.0, -80); hi < h; lo = hi, hi *= 1.5) s += panel(lo, hi);
  for (; lo < r_max; lo += h) s += panel(lo, std::min(lo + h, r_max));
  return s;
}

}  // namespace

TEST_CASE("point selection") {
  const MinSet circle = CircleSet{Vec2::Zero(), 1.0};
  const auto two = select_points(circle, 2, PointStrategy::Equispaced);
  CHECK((two[0] - Vec2(1.0, 0.0)).norm() < 1e-15);
  CHECK((two[1] - Vec2(-1.0, 0.0)).norm() < 1e-15);
  const auto four = select_points(circle, 4, PointStrategy::Equispaced);
  for (int i = 0; i < 4; ++i)
    CHECK((four[i] - Vec2(std::cos(i * kPi / 2), std::sin(i * kPi / 2))).norm() < 1e-15);

  const MinSet cloud = PointCloud{{Vec2(0, 0), Vec2(1, 0), Vec2(0.1, 0), Vec2(0, 2)}, 0.0};
  CHECK_THROWS_AS(select_points(cloud, 5, PointStrategy::FarthestPoint), CapacityError);
  const auto fp = select_points(cloud, 3, PointStrategy::FarthestPoint);
  CHECK((fp[1] - Vec2(0, 2)).norm() == 0.0);
  CHECK((fp[2] - Vec2(1, 0)).norm() == 0.0);
  const MinSet three = PointCloud{{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, 0.0};
  CHECK_THROWS_AS(select_points(three, 4, PointStrategy::Equispaced), CapacityError);
  CHECK_THROWS_AS(select_points(circle, 0, PointStrategy::Equispaced), InputError);
}

TEST_CASE("definiteness") {
  CMatrix m(2, 2);
  m << -1.0, -std::exp(-2.0), -std::exp(-2.0), -1.0;
  auto d = definiteness(m);
  CHECK(std::abs(d.lambda_max - (-1.0 + std::exp(-2.0))) < 1e-14);
  CHECK(d.negative_definite);

  d = definiteness(CMatrix::Zero(3, 3));
  CHECK(d.lambda_max == 0.0);
  CHECK_FALSE(d.negative_definite);

  m << -1.0, -1.0, -1.0, -1.0;
  d = definiteness(m);
  CHECK(std::abs(d.lambda_max) < 1e-14);
  CHECK_FALSE(d.negative_definite);

  m << -1.0, 0.5, 0.4, -1.0;
  CHECK_THROWS_AS(definiteness(m), InputError);
}

TEST_CASE("trial basis validation") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  CHECK_NOTHROW(make_trial_basis(model, thr, {Vec2(1, 0), Vec2(0, 1)}, 0.4));
  CHECK_THROWS_AS(make_trial_basis(model, thr, {Vec2(1.1, 0)}, 0.4), InputError);
  CHECK_THROWS_AS(make_trial_basis(model, thr, {Vec2(1, 0), Vec2(1, 0)}, 0.4), DegenerateInputError);
  CHECK_THROWS_AS(make_trial_basis(model, thr, {}, 0.4), InputError);
  CHECK_THROWS_AS(make_trial_basis(model, thr, {Vec2(1, 0)}, 0.0), DomainError);
}

TEST_CASE("definite point search") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);

  auto s = find_definite_points(well(), thr.minset, 3, 1);
  CHECK(s.success);
  CHECK(s.lambda_max < 0.0);

  s = find_definite_points(unit_circle(), thr.minset, 5, 200);
  CHECK(s.success);
  CHECK(s.lambda_max < 0.0);
  CHECK(s.points.size() == 5);
  const auto d = definiteness(fourier_matrix(unit_circle(), s.points));
  CHECK(std::abs(d.lambda_max - s.lambda_max) < 1e-14);

  s = find_definite_points(RadonMeasureSpec::zero(), thr.minset, 2, 30);
  CHECK_FALSE(s.success);
  CHECK(s.lambda_max == 0.0);
  CHECK(s.evaluations <= 30);
}

TEST_CASE("kinetic matrix: free case equals the gradient norm") {
  const CouplingSpec model = free_model();
  const auto thr = threshold(model);
  for (double a : {2.0, 1.0, 0.4, 0.1, 0.025}) {
    const auto T = kinetic_matrix(model, thr, make_trial_basis(model, thr, {Vec2::Zero()}, a));
    CHECK(std::abs(T(0, 0).real() - kPi * a / 2.0) < 1e-10 * a);
  }
}

TEST_CASE("kinetic matrix: Gaussian oracle at a = 2") {
  // fhat_2 = exp(-rho^2/2): T_jk = exp(-|d|^2/4) \int (|p| - 1)^2 exp(-|p - m|^2) dp with
  // m = (p_j + p_k)/2, the angular integral giving 2 pi I0(2 r |m|)
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const PointList pts = {Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0)};
  const auto T = kinetic_matrix(model, thr, make_trial_basis(model, thr, pts, 2.0));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const Vec2 m = 0.5 * (pts[j] + pts[k]);
      const double d = (pts[j] - pts[k]).norm(), mn = m.norm();
      const double ref =
          std::exp(-0.25 * d * d) *
          radial([&](double r) {
            return 2.0 * kPi * r * (r - 1.0) * (r - 1.0) *
                   std::exp(-(r - mn) * (r - mn)) * std::exp(-2.0 * r * mn) * std::cyl_bessel_i(0.0, 2.0 * r * mn);
          }, 12.0);
      INFO("j = " << j << " k = " << k);
      CHECK(std::abs(T(j, k) - ref) < 1e-10);
    }
}

TEST_CASE("kinetic matrix: bound, decay and symmetry for the built-ins") {
  for (const CouplingSpec& model : {CouplingSpec(Rashba{2.0}), CouplingSpec(Dresselhaus{3.0})}) {
    const auto thr = threshold(model);
    const auto pts = select_points(thr.minset, 3, PointStrategy::Equispaced);
    std::vector<double> prev(3, std::numeric_limits<double>::infinity());
    for (double a : {0.4, 0.2, 0.1}) {
      const auto T = kinetic_matrix(model, thr, make_trial_basis(model, thr, pts, a));
      CHECK(herm_defect(T) < 1e-10);
      for (int j = 0; j < 3; ++j) {
        const double c = quadratic_constant(model, thr.kappa, pts[j]);
        const double t = T(j, j).real();
        CHECK(std::abs(T(j, j).imag()) == 0.0);
        CHECK(t >= 0.0);
        CHECK(t <= 0.5 * kPi * c * a);
        CHECK(t <= prev[j] + 1e-9);
        prev[j] = t;
      }
    }
  }
}

TEST_CASE("kinetic matrix: the small-width limit needs the exact band excess") {
  // lambda_- - kappa = (|p| - 1)^2 averages to |q|^2 / 2 near the centre and to |q|^2 far away,
  // so T_jj / (pi a / 2) must stay between the two regimes
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const PointList pts = {Vec2(std::cos(0.3), std::sin(0.3))};
  for (double a : {0.05, 0.025}) {
    const auto T = kinetic_matrix(model, thr, make_trial_basis(model, thr, pts, a));
    const double ratio = T(0, 0).real() / (kPi * a / 2.0);
    CHECK(ratio > 0.5);
    CHECK(ratio < 1.0);
  }
}

TEST_CASE("dropped potential: circle closed form") {
  // |f_a|^2 = e^{-1} on the unit circle, so W_jk = -2 pi e^{-1} J0(|p_j - p_k|) for every a
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const auto pts = select_points(thr.minset, 4, PointStrategy::Equispaced);
  for (double a : {2.0, 0.4, 0.1}) {
    const auto W = potential_matrix_dropped(unit_circle(), make_trial_basis(model, thr, pts, a));
    CHECK(herm_defect(W) < 1e-10);
    CHECK(std::abs(W(0, 0) + 2.0 * kPi * kE1) < 1e-12);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        CHECK(std::abs(W(j, k) + 2.0 * kPi * kE1 * oracle::bessel_j0_series((pts[j] - pts[k]).norm())) <
              1e-12);
  }
  const auto Z = potential_matrix_dropped(RadonMeasureSpec::zero(), make_trial_basis(model, thr, pts, 0.4));
  CHECK(Z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dropped potential: Gaussian well against a radial integral") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const auto pts = select_points(thr.minset, 3, PointStrategy::Equispaced);
  const double d = (pts[0] - pts[1]).norm();
  for (double a : {0.4, 0.1}) {
    const auto W = potential_matrix_dropped(well(), make_trial_basis(model, thr, pts, a));
    auto ref = [&](double dist) {
      return radial([&](double r) {
        return -2.0 * std::exp(-0.5 * r * r) * std::exp(-std::pow(r, a)) * 2.0 * kPi * r *
               std::cyl_bessel_j(0.0, dist * r);
      }, 10.0, 0.01);
    };
    CHECK(std::abs(W(0, 0).real() - ref(0.0)) < 1e-8);
    CHECK(std::abs(W(0, 1) - ref(d)) < 1e-8);
    CHECK(herm_defect(W) < 1e-10);
  }
}

TEST_CASE("dropped potential approaches its limit along the schedule") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const auto pts = select_points(thr.minset, 3, PointStrategy::Equispaced);
  const auto nu = well();
  const CMatrix F = fourier_matrix(nu, pts);
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {0.4, 0.2, 0.1, 0.05}) {
    const auto W = potential_matrix_dropped(nu, make_trial_basis(model, thr, pts, a));
    const double gap = (W - 2.0 * kPi * kE1 * F).cwiseAbs().maxCoeff();
    CHECK(gap < prev - 1e-9);
    prev = gap;
  }
  CHECK(prev < 0.05 * 2.0 * kPi * kE1 * std::abs(F(0, 0)));
}

TEST_CASE("potentials scale linearly with the weight") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const auto basis = make_trial_basis(model, thr, {Vec2(1, 0), Vec2(0, -1)}, 0.4);
  const auto W1 = potential_matrix_dropped(unit_circle(-1.0), basis);
  const auto W3 = potential_matrix_dropped(unit_circle(-3.0), basis);
  CHECK((W3 - 3.0 * W1).cwiseAbs().maxCoeff() < 1e-12);
  ExactFormSettings cheap;
  cheap.sharpness = 4.0;
  const auto E1 = potential_matrix_exact(model, unit_circle(-1.0), basis, cheap);
  const auto E3 = potential_matrix_exact(model, unit_circle(-3.0), basis, cheap);
  CHECK((E3 - 3.0 * E1).cwiseAbs().maxCoeff() < 1e-12);
  const auto T1 = kinetic_matrix(model, thr, basis);
  CHECK(herm_defect(T1) < 1e-10);
}

TEST_CASE("exact potential: constant band phase reproduces the dropped form") {
  CustomCoupling c;
  c.evaluator = [](const Vec2&) { return cplx(0.0, 0.7); };
  c.a_growth = 0.5;
  c.r_growth = 2.0;
  const CouplingSpec model = c;
  const auto thr = threshold(model);
  const auto pts = select_points(thr.minset, 1, PointStrategy::Equispaced);
  // the minimum set of p^2 - 0.7 is the origin alone; use N = 1
  for (double a : {0.4, 0.1}) {
    const auto basis = make_trial_basis(model, thr, pts, a);
    for (const auto& nu : {unit_circle(), well()}) {
      const auto We = potential_matrix_exact(model, nu, basis, {});
      const auto Wd = potential_matrix_dropped(nu, basis);
      CHECK((We - Wd).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  const auto Z = potential_matrix_exact(Rashba{2.0}, RadonMeasureSpec::zero(),
                                        make_trial_basis(Rashba{2.0}, threshold(Rashba{2.0}), {Vec2(1, 0)}, 0.4));
  CHECK(Z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact potential: approaches the phase-weighted limit, not the dropped form") {
  // as a -> 0 the trial spinors become u_-(p_j) e^{i p_j x} f_a(x), so
  // W_exact -> G o W_dropped with G_jk = <u_-(p_j), u_-(p_k)> = (conj(w_j) w_k + 1) / 2
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const PointList pts = {Vec2(1, 0), Vec2(0, 1)};
  const cplx w0 = lower_band_phase(model, pts[0]), w1 = lower_band_phase(model, pts[1]);
  CMatrix G(2, 2);
  G << 1.0, 0.5 * (std::conj(w0) * w1 + 1.0), 0.5 * (std::conj(w1) * w0 + 1.0), 1.0;
  ExactFormSettings settings;
  settings.sharpness = 6.0;
  double prev = std::numeric_limits<double>::infinity();
  double dropped_gap = 0.0;
  for (double a : {0.4, 0.2, 0.1}) {
    const auto basis = make_trial_basis(model, thr, pts, a);
    const auto We = potential_matrix_exact(model, unit_circle(), basis, settings);
    const auto Wd = potential_matrix_dropped(unit_circle(), basis);
    CHECK(herm_defect(We) < 1e-10);
    const double gap = (We - G.cwiseProduct(Wd)).cwiseAbs().maxCoeff();
    CHECK(gap < prev - 1e-9);
    prev = gap;
    dropped_gap = (We - Wd).cwiseAbs().maxCoeff();
  }
  // the off-diagonal phase factor keeps the two forms apart in the limit
  CHECK(dropped_gap > 0.5 * std::abs(1.0 - G(0, 1)) * 2.0 * kPi * kE1 * oracle::bessel_j0_series(std::sqrt(2.0)));
}

TEST_CASE("certify: trivial and one-point cases") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);

  CertifyOptions opt;
  opt.n = 2;
  opt.form = PotentialForm::Dropped;
  opt.a_schedule = {0.4, 0.2};
  auto r = certify(model, thr, RadonMeasureSpec::zero(), opt);
  CHECK_FALSE(r.certified);
  CHECK(r.certified_count == 0);
  CHECK_FALSE(r.a_star.has_value());
  CHECK(r.diagnostics.size() == 2);

  opt.n = 1;
  opt.a_schedule = {0.4, 0.2, 0.1};
  r = certify(model, thr, well(), opt);
  CHECK(r.certified);
  CHECK(r.certified_count == 1);
  REQUIRE(r.a_star.has_value());
  CHECK(r.lambda_max_q < -opt.tol_def);

  opt.form = PotentialForm::Exact;
  r = certify(model, thr, unit_circle(), opt);
  CHECK(r.certified);
  CHECK(r.diagnostics.front().form_gap.has_value());

  opt.a_schedule = {};
  CHECK_THROWS_AS(certify(model, thr, well(), opt), ConfigError);
  opt.a_schedule = {0.2, 0.4};
  CHECK_THROWS_AS(certify(model, thr, well(), opt), ConfigError);
  opt.a_schedule = {2.5, 0.4};
  CHECK_THROWS_AS(certify(model, thr, well(), opt), ConfigError);
}

TEST_CASE("certify: partial result reports a leading block") {
  // dropped form on the unit circle with N = 4 at a single coarse width
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  CertifyOptions opt;
  opt.n = 4;
  opt.form = PotentialForm::Dropped;
  opt.a_schedule = {1.5};
  const auto r = certify(model, thr, unit_circle(), opt);
  CHECK(r.certified_count <= 4);
  if (!r.certified) {
    CHECK_FALSE(r.a_star.has_value());
    if (r.certified_count > 0) {
      const auto m = static_cast<Eigen::Index>(r.certified_count);
      CHECK(definiteness(r.q.topLeftCorner(m, m)).negative_definite);
    }
  }
  CHECK(herm_defect(r.q) < 1e-10);
}
