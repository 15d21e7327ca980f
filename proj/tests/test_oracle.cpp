#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "spinbound/error.hpp"
#include "spinbound/oracle.hpp"

using namespace spinbound;

namespace {

RadonMeasureSpec unit_circle() { return RadonMeasureSpec::curve_delta(Curve::circle(Vec2::Zero(), 1.0), -1.0); }

RadonMeasureSpec well(double half) {
  return RadonMeasureSpec::gaussian_well(2.0, 1.0, Vec2::Zero(), Box{Vec2(-half, -half), Vec2(half, half)});
}

}  // namespace

TEST_CASE("mode lattice is symmetric and capped") {
  BoxSpec box{6.0, 3.0};
  const auto modes = box_modes(box);
  std::set<std::pair<long, long>> keys;
  const double h = kPi / 6.0;
  for (const auto& k : modes) {
    CHECK(k.norm() <= 3.0 + 1e-12);
    keys.insert({std::lround(k.x() / h), std::lround(k.y() / h)});
  }
  for (const auto& [i, j] : keys) CHECK(keys.count({-i, -j}) == 1);
  box.max_modes = 10;
  CHECK_THROWS_AS(box_modes(box), CapacityError);
  CHECK_THROWS_AS(box_modes(BoxSpec{0.0, 3.0}), DomainError);
  CHECK_THROWS_AS(box_modes(BoxSpec{6.0, -1.0}), DomainError);
}

TEST_CASE("free spectrum is the band set exactly") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const BoxSpec box{6.0, 3.0};
  const auto r = eigen_count_below(thr, assemble(model, RadonMeasureSpec::zero(), box), box);
  std::vector<double> ref;
  for (const auto& k : box_modes(box)) {
    const auto b = bands(model, k);
    ref.push_back(b.lambda_minus);
    ref.push_back(b.lambda_plus);
  }
  std::sort(ref.begin(), ref.end());
  REQUIRE(ref.size() == r.eigenvalues.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(ref[i] - r.eigenvalues[i]) < 1e-10);
  CHECK(r.count_below == 0);
  CHECK(r.eigenvalues.size() == 2 * r.mode_count);
}

TEST_CASE("assembly: normalization, Hermiticity and support check") {
  const CouplingSpec model = Rashba{2.0};
  const BoxSpec box{12.0, 4.0};
  const auto H = assemble(model, unit_circle(), box);
  CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  const auto modes = box_modes(box);
  for (std::size_t a = 0; a < modes.size(); a += 97) {
    const auto i = static_cast<Eigen::Index>(2 * a);
    CHECK(std::abs(H(i, i) - (modes[a].squaredNorm() - kTwoPi / (4.0 * 144.0))) < 1e-12);
    CHECK(std::abs(H(i + 1, i + 1) - H(i, i)) < 1e-12);
  }
  // spin is not mixed by the potential
  CHECK(std::abs(H(0, 3)) == 0.0);
  CHECK_THROWS_AS(assemble(model, well(13.0), box), DomainError);
}

TEST_CASE("enlarging the mode set never raises an eigenvalue") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const auto nu = well(5.0);
  const BoxSpec small{6.0, 2.0}, large{6.0, 3.0};
  const auto a = eigen_count_below(thr, assemble(model, nu, small), small);
  const auto b = eigen_count_below(thr, assemble(model, nu, large), large);
  REQUIRE(b.eigenvalues.size() > a.eigenvalues.size());
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) CHECK(b.eigenvalues[i] <= a.eigenvalues[i] + 1e-10);
}

TEST_CASE("Kramers pairing for a scalar well") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const BoxSpec box{8.0, 3.0};
  const auto r = eigen_count_below(thr, assemble(model, well(7.0), box), box);
  CHECK(r.count_below >= 2);
  CHECK(r.all_paired());
  for (const auto& p : r.pairing) CHECK(p.gap < 1e-6);
}

TEST_CASE("pairing logic on a synthetic spectrum") {
  ThresholdData thr;
  thr.kappa = -1.0;
  CMatrix m = CMatrix::Zero(6, 6);
  const double d[6] = {-3.0, -3.0 * (1.0 - 1e-9), -2.0, -1.00001, 0.5, 2.0};
  for (int i = 0; i < 6; ++i) m(i, i) = d[i];
  BoxSpec box;
  const auto r = eigen_count_below(thr, m, box);
  CHECK(r.count_below == 3);
  CHECK(r.marginal == 1);
  REQUIRE(r.pairing.size() == 2);
  CHECK(r.pairing[0].partner == std::optional<std::size_t>(1));
  CHECK_FALSE(r.pairing[1].partner.has_value());
  CHECK_FALSE(r.all_paired());
  CHECK_THROWS_AS(eigen_count_below(thr, CMatrix::Zero(3, 3), box), InputError);
}

TEST_CASE("convergence sweep") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  auto s = convergence_sweep(model, thr, RadonMeasureSpec::zero(), 6.0, {2.0, 3.0});
  for (const auto& r : s.runs) CHECK(r.count_below == 0);
  CHECK(s.stable);

  s = convergence_sweep(model, thr, unit_circle(), 12.0, {3.0, 4.0, 5.0});
  CHECK(s.nondecreasing);
  CHECK(s.stable);
  CHECK(s.runs.back().count_below >= 4);

  CHECK_THROWS_AS(convergence_sweep(model, thr, unit_circle(), 12.0, {4.0, 3.0}), InputError);
}

TEST_CASE("box size barely moves deep eigenvalues") {
  const CouplingSpec model = Rashba{2.0};
  const auto thr = threshold(model);
  const BoxSpec a{8.0, 3.0}, b{16.0, 3.0};
  const auto ra = eigen_count_below(thr, assemble(model, well(7.0), a), a);
  const auto rb = eigen_count_below(thr, assemble(model, well(7.0), b), b);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(ra.eigenvalues[i] - rb.eigenvalues[i]) < 1e-3);
}
