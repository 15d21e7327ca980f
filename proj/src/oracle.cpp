#include "spinbound/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "spinbound/error.hpp"
#include "spinbound/parallel.hpp"

namespace spinbound {

namespace {

void check_box(const BoxSpec& box) {
  if (!(box.half_side > 0.0) || !std::isfinite(box.half_side))
    throw DomainError("box half side must be positive");
  if (!(box.cutoff > 0.0) || !std::isfinite(box.cutoff)) throw DomainError("mode cutoff must be positive");
}

int lattice_extent(const BoxSpec& box) {
  return static_cast<int>(std::floor(box.cutoff * box.half_side / kPi + 1e-12));
}

}  // namespace

PointList box_modes(const BoxSpec& box) {
  check_box(box);
  const double h = kPi / box.half_side;
  const int n = lattice_extent(box);
  PointList modes;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      const Vec2 k(h * i, h * j);
      // the integer test keeps the set symmetric under k -> -k
      if (static_cast<double>(i * i + j * j) * h * h <= box.cutoff * box.cutoff * (1.0 + 1e-12))
        modes.push_back(k);
    }
  if (modes.size() > box.max_modes)
    throw CapacityError("mode count " + std::to_string(modes.size()) + " exceeds the cap of " +
                        std::to_string(box.max_modes));
  return modes;
}

CMatrix assemble(const CouplingSpec& model, const RadonMeasureSpec& nu, const BoxSpec& box) {
  check_box(box);
  const Box support = support_box(nu);
  const double L = box.half_side;
  if (!nu.is_zero() &&
      !(support.lo.x() > -L && support.lo.y() > -L && support.hi.x() < L && support.hi.y() < L))
    throw DomainError("support of the measure must lie inside the open box");

  const PointList modes = box_modes(box);
  const auto m = static_cast<Eigen::Index>(modes.size());
  const double h = kPi / L;
  const int n = lattice_extent(box);
  CMatrix lattice;
  if (!nu.is_zero()) lattice = fourier_lattice(nu, h, 2 * n);
  const double scale = kTwoPi / (4.0 * L * L);

  CMatrix H = CMatrix::Zero(2 * m, 2 * m);
  parallel_for(modes.size(), [&](std::size_t a) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto s = symbol(model, modes[a]).value;
    H.block(2 * ia, 2 * ia, 2, 2) += s;
    if (nu.is_zero()) return;
    const int ax = static_cast<int>(std::lround(modes[a].x() / h));
    const int ay = static_cast<int>(std::lround(modes[a].y() / h));
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const int bx = static_cast<int>(std::lround(modes[b].x() / h));
      const int by = static_cast<int>(std::lround(modes[b].y() / h));
      const cplx v = scale * lattice(ax - bx + 2 * n, ay - by + 2 * n);
      const auto ib = static_cast<Eigen::Index>(b);
      H(2 * ia, 2 * ib) += v;
      H(2 * ia + 1, 2 * ib + 1) += v;
    }
  });
  return H;
}

bool SpectrumResult::all_paired() const {
  return std::all_of(pairing.begin(), pairing.end(), [](const KramersPair& p) { return p.partner.has_value(); });
}

SpectrumResult eigen_count_below(const ThresholdData& thr, const CMatrix& matrix, const BoxSpec& box,
                                 double pair_tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() % 2 != 0)
    throw InputError("oracle matrix must be square with even dimension");
  const lapack_int dim = static_cast<lapack_int>(matrix.rows());
  CMatrix a = matrix;
  std::vector<double> w(static_cast<std::size_t>(dim));
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', dim,
                                         reinterpret_cast<lapack_complex_double*>(a.data()), dim, w.data());
  if (info != 0) throw NoConvergenceError("Hermitian eigensolver failed (info " + std::to_string(info) + ")");

  SpectrumResult r;
  r.eigenvalues = std::move(w);
  r.mode_count = static_cast<std::size_t>(dim / 2);
  const double tol = box.edge_tol >= 0.0 ? box.edge_tol : 1e-4 * std::abs(thr.kappa);
  r.threshold = thr.kappa - tol;
  for (double e : r.eigenvalues) {
    if (e < r.threshold)
      ++r.count_below;
    else if (e < thr.kappa)
      ++r.marginal;
  }
  auto rel_gap = [&](std::size_t i, std::size_t j) {
    const double x = r.eigenvalues[i], y = r.eigenvalues[j];
    return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
  };
  for (std::size_t i = 0; i < r.count_below;) {
    if (i + 1 < r.eigenvalues.size() && rel_gap(i, i + 1) < pair_tol) {
      r.pairing.push_back({i, i + 1, rel_gap(i, i + 1)});
      i += 2;
    } else {
      double g = i + 1 < r.eigenvalues.size() ? rel_gap(i, i + 1) : std::numeric_limits<double>::infinity();
      if (i > 0) g = std::min(g, rel_gap(i, i - 1));
      r.pairing.push_back({i, std::nullopt, g});
      ++i;
    }
  }
  return r;
}

SweepResult convergence_sweep(const CouplingSpec& model, const ThresholdData& thr,
                              const RadonMeasureSpec& nu, double half_side,
                              const std::vector<double>& cutoffs, const BoxSpec& base) {
  if (cutoffs.empty()) throw InputError("convergence sweep needs at least one cutoff");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (!(cutoffs[i] > cutoffs[i - 1])) throw InputError("cutoffs must be increasing");
  SweepResult s;
  s.cutoffs = cutoffs;
  for (double K : cutoffs) {
    BoxSpec box = base;
    box.half_side = half_side;
    box.cutoff = K;
    s.runs.push_back(eigen_count_below(thr, assemble(model, nu, box), box));
  }
  for (std::size_t i = 1; i < s.runs.size(); ++i) {
    const long d = static_cast<long>(s.runs[i].count_below) - static_cast<long>(s.runs[i - 1].count_below);
    s.count_changes.push_back(d);
    if (d < 0) s.nondecreasing = false;
  }
  s.stable = s.runs.size() >= 2 && s.count_changes.back() == 0;
  return s;
}

}  // namespace spinbound
