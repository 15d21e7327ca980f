#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "spinbound/types.hpp"

namespace spinbound {

/// Regular parametrized curve t in [0, 1] -> R^2 with exact first and second derivatives.
class Curve {
 public:
  enum class Kind { Circle, Segment, Sampled };

  static Curve circle(const Vec2& center, double radius);
  static Curve segment(const Vec2& from, const Vec2& to);
  /// Cubic spline through nodes at uniform parameter values; periodic when closed.
  static Curve sampled(PointList nodes, bool closed);

  Kind kind() const { return kind_; }
  Vec2 point(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;
  double length() const { return length_; }

  /// Number of smooth pieces (spline intervals); quadrature panels align with them.
  std::size_t pieces() const;

  // Circle / segment data (meaningful only for the matching kind).
  const Vec2& center() const { return a_; }
  double radius() const { return radius_; }
  const Vec2& from() const { return a_; }
  const Vec2& to() const { return b_; }
  const PointList& nodes() const { return nodes_; }
  bool closed() const { return closed_; }

 private:
  Curve() = default;
  void compute_length();
  // spline evaluation: derivative order 0,1,2
  Vec2 spline(double t, int order) const;

  Kind kind_ = Kind::Segment;
  Vec2 a_ = Vec2::Zero();
  Vec2 b_ = Vec2::Zero();
  double radius_ = 0.0;
  PointList nodes_;
  bool closed_ = false;
  // second-derivative coefficients of the spline, one per node
  PointList moments_;
  double length_ = 0.0;
};

using ScalarField = std::function<double(const Vec2&)>;

struct Box {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  bool contains(const Vec2& x) const {
    return x.x() >= lo.x() && x.x() <= hi.x() && x.y() >= lo.y() && x.y() <= hi.y();
  }
  double diagonal() const { return (hi - lo).norm(); }
};

/// delta measure on a curve (arclength) times a weight h.
struct CurveDelta {
  Curve curve;
  ScalarField weight;
  bool nonpositive = false;
};

/// Absolutely continuous measure V(x) dx, supported on the box.
struct Density {
  ScalarField value;
  Box box;
  bool nonpositive = false;
  /// Minimum Gauss panels per axis (resolution of V itself).
  std::size_t min_panels = 8;
};

class RadonMeasureSpec;
using MeasureSum = std::vector<RadonMeasureSpec>;

/// Finite signed measure nu = h m: a curve delta, a density, or a sum of those.
class RadonMeasureSpec {
 public:
  using Variant = std::variant<CurveDelta, Density, MeasureSum>;

  RadonMeasureSpec() : v_(MeasureSum{}) {}
  explicit RadonMeasureSpec(Variant v) : v_(std::move(v)) {}

  static RadonMeasureSpec zero() { return RadonMeasureSpec(MeasureSum{}); }
  static RadonMeasureSpec curve_delta(Curve curve, double weight);
  static RadonMeasureSpec curve_delta(Curve curve, ScalarField weight, bool nonpositive);
  static RadonMeasureSpec density(ScalarField value, Box box, bool nonpositive);
  /// -depth * exp(-|x - center|^2 / (2 width^2)) on the box.
  static RadonMeasureSpec gaussian_well(double depth, double width, const Vec2& center, Box box);
  static RadonMeasureSpec sum(std::vector<RadonMeasureSpec> terms);

  const Variant& variant() const { return v_; }
  bool nonpositive() const;
  bool is_zero() const;

 private:
  Variant v_;
};

/// Quadrature nodes of a measure: nu(dx) ~ sum_i m_i h_i delta_{x_i}.
struct MeasureNodes {
  std::vector<Vec2> x;
  std::vector<double> m;
  std::vector<double> h;

  std::size_t size() const { return x.size(); }
  double weight(std::size_t i) const { return m[i] * h[i]; }
};

inline constexpr std::size_t kNodeCap = 2'000'000;

/// Gauss–Legendre discretization resolving phases exp(-i <p, x>) for |p_x| <= freq.x(),
/// |p_y| <= freq.y() at >= 10 nodes per period; `refine` multiplies the panel counts.
/// grade_origin adds geometric density panels toward x = 0 (for integrands with a cusp there).
MeasureNodes discretize(const RadonMeasureSpec& nu, const Vec2& freq, std::size_t refine = 1,
                        std::size_t cap = kNodeCap, bool grade_origin = false);

/// Bounding box of the support.
Box support_box(const RadonMeasureSpec& nu);

double total_mass(const RadonMeasureSpec& nu);

/// nu^(p) = (1/2pi) \int exp(-i <p, x>) nu(dx).
cplx fourier(const RadonMeasureSpec& nu, const Vec2& p, std::size_t refine = 1);

/// Entries nu^(p_j - p_k).
CMatrix fourier_matrix(const RadonMeasureSpec& nu, const PointList& points);

/// nu^(spacing * (n1, n2)) for |n1|, |n2| <= nmax; element (n1 + nmax, n2 + nmax).
CMatrix fourier_lattice(const RadonMeasureSpec& nu, double spacing, int nmax);

enum class DecayClass { Decaying, NonDecaying, Inconclusive };
std::string to_string(DecayClass c);

struct DecayProfile {
  double direction_angle = 0.0;
  std::vector<double> radii;
  std::vector<double> magnitudes;
  /// least-squares slope of log(envelope) against log r over the tail
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  /// mean magnitude over the tail
  double tail_level = 0.0;
  std::size_t tail_start = 0;
  DecayClass classification = DecayClass::Inconclusive;
};

/// |nu^| along the ray r (cos alpha, sin alpha), r in (0, r_max], and its decay class.
DecayProfile decay_scan(const RadonMeasureSpec& nu, double alpha, double r_max, std::size_t samples);

/// Angle in [0, pi) along which the transform of a segment delta does not decay.
double segment_nondecay_direction(const Curve& segment);

/// min_t |x'y'' - x''y'| / |gamma'|^3 over midpoint samples.
double curvature_min(const Curve& curve, std::size_t samples);

/// exp(i <k, x>) exp(-|x - x0|^2 / (2 sigma^2))
struct WavePacket {
  Vec2 k = Vec2::Zero();
  Vec2 x0 = Vec2::Zero();
  double sigma = 1.0;
};

struct FormBoundReport {
  double a_form = 0.0;
  double b_form = 0.0;
  double worst_ratio = 0.0;
  WavePacket worst_packet;
  bool violated = false;
};

/// Packets over a grid of (k, x0, sigma) covering the support.
std::vector<WavePacket> default_packet_family(const RadonMeasureSpec& nu);

/// Falsification test of \int (1+h^2)|f|^2 dm <= a \int|grad f|^2 + b \int |f|^2.
FormBoundReport form_bound_check(const RadonMeasureSpec& nu, double a_form, double b_form,
                                 const std::vector<WavePacket>& family);

}  // namespace spinbound
