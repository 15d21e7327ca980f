#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "spinbound/types.hpp"

namespace spinbound {

/// A(p) = alpha (p_y + i p_x)
struct Rashba {
  double alpha = 0.0;
};

/// A(p) = -alpha (p_x + i p_y)
struct Dresselhaus {
  double alpha = 0.0;
};

/// User coupling. The growth constants witness limsup |A(p)|/p^2 < 1:
/// |A(p)| <= a_growth * p^2 whenever |p| > r_growth.
struct CustomCoupling {
  std::function<cplx(const Vec2&)> evaluator;
  double a_growth = 0.5;
  double r_growth = 1.0;
};

using CouplingSpec = std::variant<Rashba, Dresselhaus, CustomCoupling>;

struct GrowthConstants {
  double a_growth;
  double r_growth;
};

/// Off-diagonal entry A(p) of the symbol. Throws NumericalInputError on NaN/Inf.
cplx coupling_value(const CouplingSpec& model, const Vec2& p);

/// Growth constants; the built-ins use a_growth = 1/2, r_growth = max(2|alpha|, 1).
GrowthConstants growth_constants(const CouplingSpec& model);

bool is_builtin(const CouplingSpec& model);

struct SymbolMatrix {
  Eigen::Matrix2cd value;
  Vec2 p;
};

struct BandPair {
  double lambda_plus;
  double lambda_minus;
};

/// Eigenvectors of the symbol. For A(p) != 0 the second component of both
/// vectors is exactly 1/sqrt(2).
struct BandBasis {
  Spinor u_minus;
  Spinor u_plus;
};

SymbolMatrix symbol(const CouplingSpec& model, const Vec2& p);
BandPair bands(const CouplingSpec& model, const Vec2& p);
double lower_band(const CouplingSpec& model, const Vec2& p);
BandBasis band_basis(const CouplingSpec& model, const Vec2& p);

/// Phase -A/|A| of the first component of u_minus (times sqrt 2); -1 where A = 0.
cplx lower_band_phase(const CouplingSpec& model, const Vec2& p);

struct CircleSet {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct PointCloud {
  PointList points;
  double tolerance = 0.0;
};

using MinSet = std::variant<CircleSet, PointCloud>;

struct QuadConstant {
  Vec2 p0;
  double c;
};

struct ThresholdData {
  double kappa = 0.0;
  MinSet minset;
  std::vector<QuadConstant> quad_constants;

  /// Band excess allowed for a point to count as lying on the minimum set.
  double minset_tolerance() const;
  /// c(p0) for a probed point (nearest probe within 1e-9), if present.
  std::optional<double> quad_constant_at(const Vec2& p0) const;
};

struct SearchSettings {
  std::size_t angular = 512;
  std::size_t radial = 1024;
  std::size_t newton_steps = 20;
  /// Relative band tolerance for minimum-set membership.
  double tolerance = 1e-9;
  std::size_t cloud_points = 512;
  /// Points at which c(p0) is estimated; empty = sample the minimum set.
  PointList probes;
  std::size_t probe_samples = 8;
  std::size_t c_angles = 256;
  std::size_t c_radii = 400;
};

ThresholdData threshold(const CouplingSpec& model, const SearchSettings& search = {});

/// lambda_-(p0 + q) - kappa evaluated without cancellation at small |q|: exact for the
/// built-ins, second-order Taylor (finite-difference Hessian) below |q| = 1e-5 (1 + |p0|) for
/// custom couplings.
class BandExcess {
 public:
  BandExcess(const CouplingSpec& model, double kappa, const Vec2& p0);
  double operator()(const Vec2& q) const;

 private:
  const CouplingSpec* model_;
  double kappa_;
  Vec2 p0_;
  double radius_ = -1.0;  // built-in minimum circle radius; negative for custom couplings
  double taylor_below_ = 0.0;
  double hxx_ = 0.0, hxy_ = 0.0, hyy_ = 0.0;
};

/// Smallest c with 0 <= lambda_-(p) - kappa <= c |p - p0|^2 everywhere: grid maximum over a
/// disk of radius max(4|p0|, 4 r_growth) combined with the analytic tail bound outside it.
double quadratic_constant(const CouplingSpec& model, double kappa, const Vec2& p0,
                          std::size_t angles = 256, std::size_t radii = 400);

/// n points spread over the minimum set (uniform angles for a circle, strided for a cloud).
PointList sample_minset(const MinSet& minset, std::size_t n);

/// Max of |A(p)|/p^2 over the outermost radius, sampled angularly.
double check_a1(const CouplingSpec& model, const std::vector<double>& radii);

/// lambda_0 with sup_p |A(p)|/(p^2 + lambda_0) < 1, by doubling from 2^-10.
double relative_bound_lambda(const CouplingSpec& model);

}  // namespace spinbound
