#include "spinbound/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Sparse>

#include "spinbound/error.hpp"
#include "spinbound/parallel.hpp"
#include "spinbound/quadrature.hpp"

namespace spinbound {

// ---------------------------------------------------------------- Curve

Curve Curve::circle(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.allFinite())
    throw DegenerateInputError("circle needs a finite positive radius");
  Curve c;
  c.kind_ = Kind::Circle;
  c.a_ = center;
  c.radius_ = radius;
  c.length_ = kTwoPi * radius;
  return c;
}

Curve Curve::segment(const Vec2& from, const Vec2& to) {
  if (!from.allFinite() || !to.allFinite())
    throw NumericalInputError("segment endpoints must be finite");
  if ((to - from).norm() == 0.0) throw DegenerateInputError("zero-length segment");
  Curve c;
  c.kind_ = Kind::Segment;
  c.a_ = from;
  c.b_ = to;
  c.length_ = (to - from).norm();
  return c;
}

Curve Curve::sampled(PointList nodes, bool closed) {
  if (closed && nodes.size() >= 2 && (nodes.front() - nodes.back()).norm() == 0.0)
    nodes.pop_back();
  const std::size_t n = nodes.size();
  if (n < (closed ? 3u : 2u)) throw DegenerateInputError("sampled curve needs more nodes");
  for (const auto& p : nodes)
    if (!p.allFinite()) throw NumericalInputError("sampled curve node is not finite");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if ((nodes[i + 1] - nodes[i]).norm() == 0.0)
      throw DegenerateInputError("sampled curve repeats a node");

  Curve c;
  c.kind_ = Kind::Sampled;
  c.closed_ = closed;
  c.nodes_ = std::move(nodes);
  const std::size_t segs = closed ? n : n - 1;
  const double h = 1.0 / static_cast<double>(segs);
  const double rhs_scale = 6.0 / (h * h);

  // Second derivatives M_i: M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2,
  // cyclic when closed, M_0 = M_{n-1} = 0 when open.
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  const auto& y = c.nodes_;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<int>(i);
    if (!closed && (i == 0 || i + 1 == n)) {
      trip.emplace_back(ii, ii, 1.0);
      continue;
    }
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    trip.emplace_back(ii, ii, 4.0);
    trip.emplace_back(ii, static_cast<int>(im), 1.0);
    trip.emplace_back(ii, static_cast<int>(ip), 1.0);
    const Vec2 r = rhs_scale * (y[ip] - 2.0 * y[i] + y[im]);
    rhs(ii, 0) = r.x();
    rhs(ii, 1) = r.y();
  }
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw DegenerateInputError("spline system is singular");
  const Eigen::MatrixXd M = lu.solve(rhs);
  c.moments_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.moments_[i] = Vec2(M(static_cast<Eigen::Index>(i), 0), M(static_cast<Eigen::Index>(i), 1));

  c.compute_length();
  // regularity
  const std::size_t probe = 16 * segs;
  for (std::size_t k = 0; k <= probe; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(probe);
    if (!(c.d1(t).norm() > 0.0))
      throw DegenerateInputError("sampled curve is not regular (zero velocity)");
  }
  return c;
}

std::size_t Curve::pieces() const {
  if (kind_ != Kind::Sampled) return 1;
  return closed_ ? nodes_.size() : nodes_.size() - 1;
}

Vec2 Curve::spline(double t, int order) const {
  const std::size_t segs = pieces();
  const std::size_t n = nodes_.size();
  const double h = 1.0 / static_cast<double>(segs);
  t = std::clamp(t, 0.0, 1.0);
  std::size_t i = std::min(static_cast<std::size_t>(t * static_cast<double>(segs)), segs - 1);
  const double s = t * static_cast<double>(segs) - static_cast<double>(i);
  const std::size_t j = (i + 1) % n;
  const Vec2& yi = nodes_[i];
  const Vec2& yj = nodes_[j];
  const Vec2& mi = moments_[i];
  const Vec2& mj = moments_[j];
  const double h2 = h * h;
  switch (order) {
    case 0:
      return mi * (h2 * std::pow(1.0 - s, 3) / 6.0) + mj * (h2 * s * s * s / 6.0) +
             (yi - mi * (h2 / 6.0)) * (1.0 - s) + (yj - mj * (h2 / 6.0)) * s;
    case 1:
      return (-mi * (h2 * (1.0 - s) * (1.0 - s) / 2.0) + mj * (h2 * s * s / 2.0) -
              (yi - mi * (h2 / 6.0)) + (yj - mj * (h2 / 6.0))) /
             h;
    default:
      return mi * (1.0 - s) + mj * s;
  }
}

Vec2 Curve::point(double t) const {
  switch (kind_) {
    case Kind::Circle:
      return a_ + radius_ * Vec2(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
    case Kind::Segment:
      return a_ + t * (b_ - a_);
    case Kind::Sampled:
      break;
  }
  return spline(t, 0);
}

Vec2 Curve::d1(double t) const {
  switch (kind_) {
    case Kind::Circle:
      return kTwoPi * radius_ * Vec2(-std::sin(kTwoPi * t), std::cos(kTwoPi * t));
    case Kind::Segment:
      return b_ - a_;
    case Kind::Sampled:
      break;
  }
  return spline(t, 1);
}

Vec2 Curve::d2(double t) const {
  switch (kind_) {
    case Kind::Circle:
      return -kTwoPi * kTwoPi * radius_ * Vec2(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
    case Kind::Segment:
      return Vec2::Zero();
    case Kind::Sampled:
      break;
  }
  return spline(t, 2);
}

void Curve::compute_length() {
  const std::size_t segs = pieces();
  const auto& rule = quad::gauss_legendre(16);
  double len = 0.0;
  for (std::size_t i = 0; i < segs; ++i) {
    const double lo = static_cast<double>(i) / static_cast<double>(segs);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(segs);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[k];
      len += 0.5 * (hi - lo) * rule.weights[k] * d1(t).norm();
    }
  }
  length_ = len;
}

// ---------------------------------------------------------------- measures

RadonMeasureSpec RadonMeasureSpec::curve_delta(Curve curve, double weight) {
  if (!std::isfinite(weight)) throw NumericalInputError("curve weight must be finite");
  return RadonMeasureSpec(CurveDelta{std::move(curve), [weight](const Vec2&) { return weight; },
                                     weight <= 0.0});
}

RadonMeasureSpec RadonMeasureSpec::curve_delta(Curve curve, ScalarField weight, bool nonpositive) {
  return RadonMeasureSpec(CurveDelta{std::move(curve), std::move(weight), nonpositive});
}

RadonMeasureSpec RadonMeasureSpec::density(ScalarField value, Box box, bool nonpositive) {
  if (!box.lo.allFinite() || !box.hi.allFinite() || !(box.hi.x() > box.lo.x()) ||
      !(box.hi.y() > box.lo.y()))
    throw DegenerateInputError("density box must have positive extent");
  return RadonMeasureSpec(Density{std::move(value), box, nonpositive});
}

RadonMeasureSpec RadonMeasureSpec::gaussian_well(double depth, double width, const Vec2& center,
                                                 Box box) {
  if (!(width > 0.0)) throw DegenerateInputError("gaussian well width must be positive");
  const double s = 1.0 / (2.0 * width * width);
  return density([=](const Vec2& x) { return -depth * std::exp(-(x - center).squaredNorm() * s); },
                 box, depth >= 0.0);
}

RadonMeasureSpec RadonMeasureSpec::sum(std::vector<RadonMeasureSpec> terms) {
  return RadonMeasureSpec(MeasureSum(std::move(terms)));
}

bool RadonMeasureSpec::nonpositive() const {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MeasureSum>) {
          return std::all_of(v.begin(), v.end(), [](const auto& t) { return t.nonpositive(); });
        } else {
          return v.nonpositive;
        }
      },
      v_);
}

bool RadonMeasureSpec::is_zero() const {
  if (const auto* s = std::get_if<MeasureSum>(&v_))
    return std::all_of(s->begin(), s->end(), [](const auto& t) { return t.is_zero(); });
  return false;
}

namespace {

std::size_t oscillation_panels(double freq, double extent) {
  return static_cast<std::size_t>(std::ceil(freq * extent / kTwoPi)) * 4;
}

void check_cap(std::size_t nodes, std::size_t cap) {
  if (nodes > cap) throw ResolutionError("quadrature node cap exceeded", nodes);
}

// breakpoints over [lo, hi], splitting at 0 when it is interior
std::vector<double> axis_breaks(double lo, double hi) {
  if (lo < 0.0 && hi > 0.0) return {lo, 0.0, hi};
  return {lo, hi};
}

quad::Nodes1D axis_nodes(double lo, double hi, std::size_t panels, bool grade_origin = false) {
  const auto br = axis_breaks(lo, hi);
  quad::Nodes1D out;
  out.reserve(panels * 8 + 16);
  for (std::size_t g = 0; g + 1 < br.size(); ++g) {
    const double share = (br[g + 1] - br[g]) / (hi - lo);
    const auto np = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::ceil(share * static_cast<double>(panels))));
    const double w = (br[g + 1] - br[g]) / static_cast<double>(np);
    for (std::size_t k = 0; k < np; ++k) {
      const double a = br[g] + w * static_cast<double>(k);
      const double b = k + 1 == np ? br[g + 1] : br[g] + w * static_cast<double>(k + 1);
      const bool at_zero = grade_origin && (a == 0.0 || b == 0.0);
      if (!at_zero) {
        quad::append_panel(out, a, b);
        continue;
      }
      // geometric panels shrinking toward 0
      const double z = a == 0.0 ? a : b, far = a == 0.0 ? b : a;
      double prev = far;
      for (int l = 1; l <= 40; ++l) {
        const double next = z + (far - z) * std::ldexp(1.0, -l);
        quad::append_panel(out, std::min(prev, next), std::max(prev, next));
        prev = next;
      }
      quad::append_panel(out, std::min(prev, z), std::max(prev, z));
    }
  }
  return out;
}

struct DensityGrid {
  quad::Nodes1D xs, ys;
  // values V(xs[i], ys[j]) at i * ys.size() + j
  std::vector<double> v;
};

DensityGrid density_grid(const Density& d, const Vec2& freq, std::size_t refine, std::size_t cap,
                         bool grade_origin = false) {
  const Vec2 ext = d.box.hi - d.box.lo;
  const std::size_t px =
      std::max(oscillation_panels(std::abs(freq.x()), ext.x()), d.min_panels) * refine;
  const std::size_t py =
      std::max(oscillation_panels(std::abs(freq.y()), ext.y()), d.min_panels) * refine;
  // estimated count before allocating (split at zero adds at most one panel per axis)
  check_cap((px + 1) * (py + 1) * 64, cap);
  DensityGrid g;
  g.xs = axis_nodes(d.box.lo.x(), d.box.hi.x(), px, grade_origin);
  g.ys = axis_nodes(d.box.lo.y(), d.box.hi.y(), py, grade_origin);
  check_cap(g.xs.size() * g.ys.size(), cap);
  const std::size_t ny = g.ys.size();
  g.v.resize(g.xs.size() * ny);
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const double val = d.value(Vec2(g.xs.x[i], g.ys.x[j]));
      if (!std::isfinite(val)) throw QuadratureError("density is not finite at a quadrature node");
      g.v[i * ny + j] = val;
    }
  return g;
}

void discretize_curve(const CurveDelta& c, double freq, std::size_t refine, std::size_t cap,
                      MeasureNodes& out) {
  const Curve& curve = c.curve;
  const std::size_t total = std::max<std::size_t>(oscillation_panels(freq, curve.length()), 4);
  const std::size_t segs = curve.pieces();
  const std::size_t per_piece =
      std::max<std::size_t>(1, (total + segs - 1) / segs) * refine;
  check_cap(out.size() + per_piece * segs * 8, cap);
  const auto& rule = quad::gauss_legendre(8);
  for (std::size_t s = 0; s < segs; ++s) {
    const double lo = static_cast<double>(s) / static_cast<double>(segs);
    const double hi = static_cast<double>(s + 1) / static_cast<double>(segs);
    const double w = (hi - lo) / static_cast<double>(per_piece);
    for (std::size_t k = 0; k < per_piece; ++k) {
      const double a = lo + w * static_cast<double>(k);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = a + 0.5 * w * (1.0 + rule.nodes[q]);
        const Vec2 x = curve.point(t);
        const double h = c.weight(x);
        if (!std::isfinite(h)) throw QuadratureError("curve weight is not finite");
        out.x.push_back(x);
        out.m.push_back(0.5 * w * rule.weights[q] * curve.d1(t).norm());
        out.h.push_back(h);
      }
    }
  }
}

void discretize_into(const RadonMeasureSpec& nu, const Vec2& freq, std::size_t refine,
                     std::size_t cap, bool grade, MeasureNodes& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CurveDelta>) {
          discretize_curve(v, freq.norm(), refine, cap, out);
        } else if constexpr (std::is_same_v<T, Density>) {
          const DensityGrid g =
              density_grid(v, freq, refine, cap - std::min(cap, out.size()), grade);
          const std::size_t ny = g.ys.size();
          for (std::size_t i = 0; i < g.xs.size(); ++i)
            for (std::size_t j = 0; j < ny; ++j) {
              out.x.emplace_back(g.xs.x[i], g.ys.x[j]);
              out.m.push_back(g.xs.w[i] * g.ys.w[j]);
              out.h.push_back(g.v[i * ny + j]);
            }
        } else {
          for (const auto& t : v) discretize_into(t, freq, refine, cap, grade, out);
        }
      },
      nu.variant());
}

Box merge(const Box& a, const Box& b) {
  return Box{a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)};
}

}  // namespace

MeasureNodes discretize(const RadonMeasureSpec& nu, const Vec2& freq, std::size_t refine,
                        std::size_t cap, bool grade_origin) {
  if (!freq.allFinite()) throw NumericalInputError("frequency must be finite");
  MeasureNodes out;
  discretize_into(nu, freq.cwiseAbs(), std::max<std::size_t>(refine, 1), cap, grade_origin, out);
  return out;
}

Box support_box(const RadonMeasureSpec& nu) {
  return std::visit(
      [](const auto& v) -> Box {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CurveDelta>) {
          const Curve& c = v.curve;
          if (c.kind() == Curve::Kind::Circle)
            return Box{c.center().array() - c.radius(), c.center().array() + c.radius()};
          if (c.kind() == Curve::Kind::Segment)
            return Box{c.from().cwiseMin(c.to()), c.from().cwiseMax(c.to())};
          const std::size_t n = 64 * c.pieces();
          Box b{c.point(0.0), c.point(0.0)};
          for (std::size_t k = 1; k <= n; ++k) {
            const Vec2 x = c.point(static_cast<double>(k) / static_cast<double>(n));
            b = merge(b, Box{x, x});
          }
          return b;
        } else if constexpr (std::is_same_v<T, Density>) {
          return v.box;
        } else {
          bool first = true;
          Box b;
          for (const auto& t : v) {
            if (t.is_zero()) continue;
            const Box tb = support_box(t);
            b = first ? tb : merge(b, tb);
            first = false;
          }
          return b;
        }
      },
      nu.variant());
}

double total_mass(const RadonMeasureSpec& nu) {
  const MeasureNodes nodes = discretize(nu, Vec2::Zero());
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += nodes.weight(i);
  if (!std::isfinite(s)) throw QuadratureError("total mass is not finite");
  return s;
}

cplx fourier(const RadonMeasureSpec& nu, const Vec2& p, std::size_t refine) {
  const MeasureNodes nodes = discretize(nu, p, refine);
  cplx s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s += nodes.weight(i) * std::polar(1.0, -p.dot(nodes.x[i]));
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw QuadratureError("transform is not finite");
  return s / kTwoPi;
}

CMatrix fourier_matrix(const RadonMeasureSpec& nu, const PointList& points) {
  const std::size_t n = points.size();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      if ((points[j] - points[k]).norm() == 0.0)
        throw InputError("fourier_matrix points must be pairwise distinct");
  CMatrix F(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n * n, [&](std::size_t idx) {
    const std::size_t j = idx / n, k = idx % n;
    F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
        fourier(nu, points[j] - points[k]);
  });
  const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
  if ((F - F.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw QuadratureError("transform matrix is not Hermitian");
  return F;
}

namespace {

// exp(-i s x n) for n in [-nmax, nmax]
void phase_row(double s, double x, int nmax, std::vector<cplx>& row) {
  row.resize(static_cast<std::size_t>(2 * nmax + 1));
  const cplx step = std::polar(1.0, -s * x);
  row[static_cast<std::size_t>(nmax)] = 1.0;
  cplx up = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    // direct evaluation every few steps limits error growth of the recurrence
    up = (n % 16 == 0) ? std::polar(1.0, -s * x * n) : up * step;
    row[static_cast<std::size_t>(nmax + n)] = up;
    row[static_cast<std::size_t>(nmax - n)] = std::conj(up);
  }
}

void lattice_into(const RadonMeasureSpec& nu, double spacing, int nmax, CMatrix& out) {
  const double fmax = spacing * static_cast<double>(nmax);
  const auto dim = static_cast<std::size_t>(2 * nmax + 1);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CurveDelta>) {
          MeasureNodes nodes;
          discretize_curve(v, fmax * std::sqrt(2.0), 1, kNodeCap, nodes);
          std::vector<cplx> ex, ey;
          for (std::size_t i = 0; i < nodes.size(); ++i) {
            phase_row(spacing, nodes.x[i].x(), nmax, ex);
            phase_row(spacing, nodes.x[i].y(), nmax, ey);
            const double w = nodes.weight(i) / kTwoPi;
            for (std::size_t a = 0; a < dim; ++a) {
              const cplx wa = w * ex[a];
              for (std::size_t b = 0; b < dim; ++b)
                out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += wa * ey[b];
            }
          }
        } else if constexpr (std::is_same_v<T, Density>) {
          const DensityGrid g = density_grid(v, Vec2(fmax, fmax), 1, kNodeCap);
          const std::size_t ny = g.ys.size();
          // rows[j][a] = sum_i w_i V(x_i, y_j) exp(-i s x_i n_a)
          std::vector<std::vector<cplx>> rows(ny, std::vector<cplx>(dim, 0.0));
          std::vector<cplx> ex;
          for (std::size_t i = 0; i < g.xs.size(); ++i) {
            phase_row(spacing, g.xs.x[i], nmax, ex);
            for (std::size_t j = 0; j < ny; ++j) {
              const double w = g.xs.w[i] * g.v[i * ny + j];
              if (w == 0.0) continue;
              for (std::size_t a = 0; a < dim; ++a) rows[j][a] += w * ex[a];
            }
          }
          std::vector<cplx> ey;
          for (std::size_t j = 0; j < ny; ++j) {
            phase_row(spacing, g.ys.x[j], nmax, ey);
            const double w = g.ys.w[j] / kTwoPi;
            for (std::size_t a = 0; a < dim; ++a)
              for (std::size_t b = 0; b < dim; ++b)
                out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    w * rows[j][a] * ey[b];
          }
        } else {
          for (const auto& t : v) lattice_into(t, spacing, nmax, out);
        }
      },
      nu.variant());
}

}  // namespace

CMatrix fourier_lattice(const RadonMeasureSpec& nu, double spacing, int nmax) {
  if (nmax < 0 || !(spacing > 0.0)) throw InputError("lattice needs spacing > 0 and nmax >= 0");
  const auto dim = static_cast<Eigen::Index>(2 * nmax + 1);
  CMatrix out = CMatrix::Zero(dim, dim);
  lattice_into(nu, spacing, nmax, out);
  if (!out.allFinite()) throw QuadratureError("lattice transform is not finite");
  return out;
}

// ---------------------------------------------------------------- decay

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::Decaying:
      return "decaying";
    case DecayClass::NonDecaying:
      return "non_decaying";
    case DecayClass::Inconclusive:
      break;
  }
  return "inconclusive";
}

DecayProfile decay_scan(const RadonMeasureSpec& nu, double alpha, double r_max,
                        std::size_t samples) {
  if (!(r_max > 0.0) || !std::isfinite(r_max) || !std::isfinite(alpha))
    throw InputError("decay scan needs finite alpha and r_max > 0");
  DecayProfile prof;
  prof.direction_angle = std::fmod(alpha, kTwoPi);
  if (prof.direction_angle < 0.0) prof.direction_angle += kTwoPi;
  prof.tail_start = samples / 4;
  if (samples - prof.tail_start < 16) throw InputError("decay scan needs at least 16 tail samples");

  const Vec2 dir(std::cos(alpha), std::sin(alpha));
  const MeasureNodes nodes = discretize(nu, r_max * dir);
  prof.radii.resize(samples);
  prof.magnitudes.resize(samples);
  parallel_for(samples, [&](std::size_t i) {
    const double r = r_max * static_cast<double>(i + 1) / static_cast<double>(samples);
    const Vec2 p = r * dir;
    cplx s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      s += nodes.weight(k) * std::polar(1.0, -p.dot(nodes.x[k]));
    prof.radii[i] = r;
    prof.magnitudes[i] = std::abs(s) / kTwoPi;
  });

  const auto tb = prof.magnitudes.begin() + static_cast<std::ptrdiff_t>(prof.tail_start);
  const double tail_sum = std::accumulate(tb, prof.magnitudes.end(), 0.0);
  prof.tail_level = tail_sum / static_cast<double>(samples - prof.tail_start);

  // Envelope: maxima over blocks at least 1.5 oscillation periods wide.
  const Box box = nu.is_zero() ? Box{} : support_box(nu);
  const double diam = std::max(box.diagonal(), 1e-12);
  const double r_tail = prof.radii[prof.tail_start];
  const double span = r_max - r_tail;
  const double width = std::max(3.0 * kPi / diam, span / 24.0);
  const auto blocks = static_cast<std::size_t>(std::floor(span / width));
  std::vector<double> lx, ly;
  std::size_t i = prof.tail_start;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double hi = r_tail + span * static_cast<double>(b + 1) / static_cast<double>(blocks);
    double best = -1.0, at = 0.0;
    for (; i < samples && (prof.radii[i] <= hi || b + 1 == blocks); ++i)
      if (prof.magnitudes[i] > best) {
        best = prof.magnitudes[i];
        at = prof.radii[i];
      }
    if (best > 0.0) {
      lx.push_back(std::log(at));
      ly.push_back(std::log(best));
    }
  }
  if (lx.size() >= 3) {
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
    }
    prof.fitted_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    prof.fitted_intercept = my - prof.fitted_slope * mx;
  } else {
    prof.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    prof.fitted_intercept = std::numeric_limits<double>::quiet_NaN();
  }

  const auto [mn, mx] = std::minmax_element(tb, prof.magnitudes.end());
  if (prof.fitted_slope <= -0.2 && prof.magnitudes.back() < 0.5 * prof.magnitudes.front()) {
    prof.classification = DecayClass::Decaying;
  } else if (prof.tail_level > 0.0 && (*mx - *mn) / prof.tail_level < 0.1) {
    prof.classification = DecayClass::NonDecaying;
  }
  return prof;
}

double segment_nondecay_direction(const Curve& segment) {
  if (segment.kind() != Curve::Kind::Segment) throw InputError("curve is not a segment");
  const Vec2 d = segment.to() - segment.from();
  if (d.norm() == 0.0) throw DegenerateInputError("zero-length segment");
  double a = std::atan2(d.x(), -d.y());
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double curvature_min(const Curve& curve, std::size_t samples) {
  if (samples == 0) throw InputError("curvature_min needs samples > 0");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
    const Vec2 g1 = curve.d1(t), g2 = curve.d2(t);
    const double speed = g1.norm();
    const double k = std::abs(g1.x() * g2.y() - g2.x() * g1.y()) / (speed * speed * speed);
    if (!std::isfinite(k)) throw NumericalInputError("curve derivatives are not finite");
    best = std::min(best, k);
  }
  return best;
}

// ---------------------------------------------------------------- form bound

namespace {

// \int (1 + h^2) exp(-|x - x0|^2 / sigma^2) dm
double packet_load(const RadonMeasureSpec& nu, const Vec2& x0, double sigma) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        const double inv = 1.0 / (sigma * sigma);
        if constexpr (std::is_same_v<T, CurveDelta>) {
          const Curve& c = v.curve;
          const std::size_t panels = std::max<std::size_t>(
              64, static_cast<std::size_t>(std::ceil(8.0 * c.length() / sigma)));
          MeasureNodes nodes;
          const double freq = kTwoPi * static_cast<double>(panels) / (4.0 * c.length());
          discretize_curve(v, freq, 1, kNodeCap, nodes);
          double s = 0.0;
          for (std::size_t i = 0; i < nodes.size(); ++i)
            s += nodes.m[i] * (1.0 + nodes.h[i] * nodes.h[i]) *
                 std::exp(-(nodes.x[i] - x0).squaredNorm() * inv);
          return s;
        } else if constexpr (std::is_same_v<T, Density>) {
          const double reach = 7.0 * sigma;
          const Vec2 lo = v.box.lo.cwiseMax((x0.array() - reach).matrix());
          const Vec2 hi = v.box.hi.cwiseMin((x0.array() + reach).matrix());
          if (!(hi.x() > lo.x()) || !(hi.y() > lo.y())) return 0.0;
          const std::size_t np = std::max<std::size_t>(v.min_panels, 8);
          const auto xs = axis_nodes(lo.x(), hi.x(), np);
          const auto ys = axis_nodes(lo.y(), hi.y(), np);
          double s = 0.0;
          for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ys.size(); ++j) {
              const Vec2 x(xs.x[i], ys.x[j]);
              const double h = v.value(x);
              s += xs.w[i] * ys.w[j] * (1.0 + h * h) * std::exp(-(x - x0).squaredNorm() * inv);
            }
          return s;
        } else {
          double s = 0.0;
          for (const auto& t : v) s += packet_load(t, x0, sigma);
          return s;
        }
      },
      nu.variant());
}

void collect_support_points(const RadonMeasureSpec& nu, PointList& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CurveDelta>) {
          for (int k = 0; k < 32; ++k) out.push_back(v.curve.point(k / 32.0));
        } else if constexpr (std::is_same_v<T, MeasureSum>) {
          for (const auto& t : v) collect_support_points(t, out);
        }
      },
      nu.variant());
}

}  // namespace

std::vector<WavePacket> default_packet_family(const RadonMeasureSpec& nu) {
  std::vector<WavePacket> fam;
  if (nu.is_zero()) return fam;
  const Box box = support_box(nu);
  PointList centers;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      centers.emplace_back(box.lo.x() + (box.hi.x() - box.lo.x()) * i / 4.0,
                           box.lo.y() + (box.hi.y() - box.lo.y()) * j / 4.0);
  collect_support_points(nu, centers);
  const double sigmas[] = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  const Vec2 ks[] = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 4.0)};
  for (const auto& c : centers)
    for (double s : sigmas)
      for (const auto& k : ks) fam.push_back(WavePacket{k, c, s});
  return fam;
}

FormBoundReport form_bound_check(const RadonMeasureSpec& nu, double a_form, double b_form,
                                 const std::vector<WavePacket>& family) {
  if (!(a_form > 0.0 && a_form < 1.0) || !(b_form > 0.0))
    throw InputError("form bound needs a in (0,1) and b > 0");
  FormBoundReport rep;
  rep.a_form = a_form;
  rep.b_form = b_form;
  std::vector<double> ratio(family.size(), 0.0);
  parallel_for(family.size(), [&](std::size_t i) {
    const WavePacket& f = family[i];
    const double s2 = f.sigma * f.sigma;
    const double grad = kPi * s2 * f.k.squaredNorm() + kPi;
    const double rhs = a_form * grad + b_form * kPi * s2;
    ratio[i] = packet_load(nu, f.x0, f.sigma) / rhs;
  });
  for (std::size_t i = 0; i < family.size(); ++i)
    if (ratio[i] > rep.worst_ratio) {
      rep.worst_ratio = ratio[i];
      rep.worst_packet = family[i];
    }
  rep.violated = rep.worst_ratio > 1.0;
  return rep;
}

}  // namespace spinbound
