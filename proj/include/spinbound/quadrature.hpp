#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spinbound::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss–Legendre rule of order n on [-1, 1]; cached per n.
const Rule& gauss_legendre(std::size_t n);

struct Nodes1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void reserve(std::size_t n) {
    x.reserve(n);
    w.reserve(n);
  }
};

/// Composite rule: `panels` equal panels on [lo, hi], `order` nodes each.
Nodes1D composite(double lo, double hi, std::size_t panels, std::size_t order = 8);

/// Composite rule over consecutive breakpoints, `panels_per_gap` panels between each pair.
Nodes1D composite(std::span<const double> breaks, std::size_t panels_per_gap,
                  std::size_t order = 8);

/// Append `order` Gauss nodes mapped to [lo, hi].
void append_panel(Nodes1D& out, double lo, double hi, std::size_t order = 8);

}  // namespace spinbound::quad
