#include "spinbound/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace spinbound::quad {

namespace {

Rule build_rule(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const Rule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

void append_panel(Nodes1D& out, double lo, double hi, std::size_t order) {
  const Rule& r = gauss_legendre(order);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < order; ++i) {
    out.x.push_back(mid + half * r.nodes[i]);
    out.w.push_back(half * r.weights[i]);
  }
}

Nodes1D composite(double lo, double hi, std::size_t panels, std::size_t order) {
  Nodes1D out;
  if (panels == 0) panels = 1;
  out.reserve(panels * order);
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = lo + h * static_cast<double>(k);
    const double b = (k + 1 == panels) ? hi : lo + h * static_cast<double>(k + 1);
    append_panel(out, a, b, order);
  }
  return out;
}

Nodes1D composite(std::span<const double> breaks, std::size_t panels_per_gap, std::size_t order) {
  Nodes1D out;
  if (breaks.size() < 2) return out;
  out.reserve((breaks.size() - 1) * panels_per_gap * order);
  for (std::size_t g = 0; g + 1 < breaks.size(); ++g) {
    const double lo = breaks[g], hi = breaks[g + 1];
    const double h = (hi - lo) / static_cast<double>(panels_per_gap);
    for (std::size_t k = 0; k < panels_per_gap; ++k) {
      append_panel(out, lo + h * static_cast<double>(k),
                   k + 1 == panels_per_gap ? hi : lo + h * static_cast<double>(k + 1), order);
    }
  }
  return out;
}

}  // namespace spinbound::quad
